#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <span>
#include <vector>

#include "pssi/error.hpp"

namespace pssi {

// Row-major 8-bit RGB raster.
struct Image {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> data;

  Image() = default;
  Image(int w, int h);
  Image(int w, int h, std::vector<std::uint8_t> rgb);

  std::size_t pixel_count() const { return static_cast<std::size_t>(width) * height; }
  std::uint8_t* at(int row, int col) { return data.data() + 3 * (static_cast<std::size_t>(row) * width + col); }
  const std::uint8_t* at(int row, int col) const {
    return data.data() + 3 * (static_cast<std::size_t>(row) * width + col);
  }

  friend bool operator==(const Image&, const Image&) = default;
};

// Per-pixel foreground flag, stored one byte per pixel (0 or 1).
struct Mask {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> bits;

  Mask() = default;
  Mask(int w, int h, bool value = false);

  std::size_t pixel_count() const { return static_cast<std::size_t>(width) * height; }
  bool get(int row, int col) const { return bits[static_cast<std::size_t>(row) * width + col] != 0; }
  void set(int row, int col, bool v) { bits[static_cast<std::size_t>(row) * width + col] = v ? 1 : 0; }
  std::size_t count() const;

  friend bool operator==(const Mask&, const Mask&) = default;
};

// Inclusive axis-aligned rectangle; pixels outside it are background.
struct BoundingBox {
  int row0 = 0;
  int col0 = 0;
  int row1 = 0;
  int col1 = 0;

  bool contains(int row, int col) const { return row >= row0 && row <= row1 && col >= col0 && col <= col1; }

  friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

struct Scribbles {
  std::set<Pixel> fg_pixels;
  std::set<Pixel> bg_pixels;
  std::optional<BoundingBox> bbox;

  bool empty() const { return fg_pixels.empty() && bg_pixels.empty() && !bbox; }

  friend bool operator==(const Scribbles&, const Scribbles&) = default;
};

// Raw decoded PNG/PPM, always expanded to 8-bit RGBA.
struct RgbaImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> data;
};

RgbaImage decode_rgba(std::span<const std::uint8_t> bytes);
RgbaImage load_rgba(const std::filesystem::path& path);

Image decode_image(std::span<const std::uint8_t> bytes);
Image load_image(const std::filesystem::path& path);

// Pixels with any channel >= 128 are foreground.
Mask decode_mask(std::span<const std::uint8_t> bytes);
Mask load_mask(const std::filesystem::path& path);

std::vector<std::uint8_t> encode_png(const Image& image);
std::vector<std::uint8_t> encode_png(const Mask& mask);
std::vector<std::uint8_t> encode_gray_png(int width, int height, std::span<const std::uint8_t> gray);
void save_image(const Image& image, const std::filesystem::path& path);
void save_mask(const Mask& mask, const std::filesystem::path& path);
void save_ppm(const Image& image, const std::filesystem::path& path);

// Red (255,0,0,255) marks foreground, blue (0,0,255,255) background.
Scribbles scribbles_from_overlay(const RgbaImage& overlay);
Scribbles scribbles_from_masks(const Mask& fg, const Mask& bg);
Scribbles load_scribbles(const std::filesystem::path& overlay_png);
Scribbles load_scribbles(const std::filesystem::path& fg_png, const std::filesystem::path& bg_png);

// Throws OutOfBounds when any coordinate falls outside width x height, or
// when the bbox is inverted.
void check_bounds(const Scribbles& scribbles, int width, int height);

// Foreground copied verbatim, background blended toward white.
Image render_overlay(const Image& image, const Mask& mask, double alpha);

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

}  // namespace pssi
