#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "pssi/similarity.hpp"

namespace pssi {

// Random dense features (channel and joint histograms) for timing kernels.
SegmentFeatures random_features(int bins, std::uint64_t seed);

struct KernelTiming {
  int bins = 0;
  double pssi_seconds = 0;  // per evaluation
  double bha_seconds = 0;   // per evaluation
};

// Times `iterations` evaluations of each kernel per bin count; the best of
// `repeats` batches is kept.
std::vector<KernelTiming> time_similarity_kernels(const std::vector<int>& bins, int iterations, int repeats = 3);

// Least-squares slope of log(y) against log(x); empty with fewer than two
// distinct x values.
std::optional<double> loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace pssi
