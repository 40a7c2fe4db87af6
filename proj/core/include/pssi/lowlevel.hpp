#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "pssi/image.hpp"

namespace pssi {

// Per-pixel segment id in [0, n_segments). Every id occurs and every
// segment is one 4-connected component.
struct SegmentMap {
  int width = 0;
  int height = 0;
  std::vector<std::int32_t> labels;
  int n_segments = 0;

  std::int32_t at(int row, int col) const { return labels[static_cast<std::size_t>(row) * width + col]; }
  std::vector<std::size_t> areas() const;

  friend bool operator==(const SegmentMap&, const SegmentMap&) = default;
};

struct MeanShiftParams {
  double hs = 8.0;      // spatial bandwidth, pixels
  double hr = 8.0;      // range bandwidth, Luv units
  int min_size = 50;    // pixels
  double eps = 0.1;     // joint-space displacement at which iteration stops
  int max_iter = 50;

  void validate() const;
};

struct SlicParams {
  int k = 400;
  double compactness = 10.0;
};

using Luv = std::array<double, 3>;

// sRGB (D65) to CIE L*u*v*.
Luv rgb_to_luv(std::uint8_t r, std::uint8_t g, std::uint8_t b);
std::vector<Luv> image_to_luv(const Image& image);

// Converged joint-domain mode of one pixel.
struct Mode {
  double x = 0;  // column
  double y = 0;  // row
  Luv color{};
};

// Flat-kernel mean shift in (x, y, L, u, v). Rows are independent and
// evaluated by up to `threads` workers; results do not depend on the count.
std::vector<Mode> meanshift_filter(const Image& image, const MeanShiftParams& params, unsigned threads = 1);

SegmentMap meanshift_segment(const Image& image, const MeanShiftParams& params, unsigned threads = 1);

SegmentMap slic_segment(const Image& image, int k, double compactness);

// Checks coverage, contiguous ids, and 4-connectivity of every segment.
bool is_valid_segment_map(const SegmentMap& segmap);

// Relabels ids to 0..N-1 in order of first appearance (row-major).
void compact_labels(SegmentMap& segmap);

}  // namespace pssi
