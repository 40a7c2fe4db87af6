#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "pssi/image.hpp"
#include "pssi/lowlevel.hpp"

namespace pssi {

// Normalized per-channel histogram; bins sum to one.
struct ChannelHistogram {
  std::vector<double> bins;

  int size() const { return static_cast<int>(bins.size()); }
};

struct SegmentFeatures {
  ChannelHistogram hist_r;
  ChannelHistogram hist_g;
  ChannelHistogram hist_b;
  std::size_t area = 0;
  // Flattened B^3 joint RGB histogram, index (r * B + g) * B + b. Only
  // populated for the Bhattacharyya measure.
  std::optional<std::vector<double>> joint;

  int bins() const { return hist_r.size(); }
};

enum class Measure { Pssi, Bha };

struct SimilarityConfig {
  int bins = 8;
  double lambda = 0.2;
  Measure measure = Measure::Pssi;

  void validate() const;
};

inline int bin_index(std::uint8_t value, int bins) { return static_cast<int>(value) * bins / 256; }

ChannelHistogram channel_histogram(std::span<const std::uint8_t> values, int bins);

// sqrt(P.Q + lambda * P^T A Q) with A the 1-bin adjacency matrix, in O(B).
double ihsi(const ChannelHistogram& p, const ChannelHistogram& q, double lambda);

// Harmonic mean of the three channel IHSI scores; 0 if any channel is 0.
double pssi(const SegmentFeatures& p, const SegmentFeatures& q, double lambda);

// Bhattacharyya coefficient over the dense joint histogram.
double bha(const SegmentFeatures& p, const SegmentFeatures& q);

double harmonic_mean3(double a, double b, double c);

double similarity(const SegmentFeatures& p, const SegmentFeatures& q, const SimilarityConfig& config);

// Upper bound of the configured measure: sqrt(1 + 2 lambda) for PSSI, 1 for BHA.
double similarity_bound(const SimilarityConfig& config);

std::vector<SegmentFeatures> segment_features(const Image& image, const SegmentMap& segmap,
                                              const SimilarityConfig& config);

}  // namespace pssi
