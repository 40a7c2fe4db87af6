#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pssi/image.hpp"

namespace pssi {

struct ConfusionCounts {
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t fn = 0;
  std::uint64_t tn = 0;

  std::uint64_t total() const { return tp + fp + fn + tn; }

  friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

struct MetricsReport {
  double jaccard = 0;
  double precision = 0;
  double recall = 0;
  double f1 = 0;
  double fbeta = 0;
  double me = 0;
  double beta_sq = 0.3;
};

ConfusionCounts confusion(const Mask& pred, const Mask& truth);

// Scores with a vanishing denominator (only possible when tp = 0) are 0;
// ME is 0 for an empty image.
MetricsReport report(const ConfusionCounts& counts, double beta_sq = 0.3);

struct ScribbleAmount {
  double bg_percent = 0;
  double fg_percent = 0;
  double total_percent = 0;
};

ScribbleAmount scribble_amount(const Scribbles& scribbles, int width, int height);

struct Summary {
  double mean = 0;
  double stddev = 0;  // sample standard deviation (n - 1); 0 for n < 2
  double min = 0;
  double max = 0;
  std::size_t count = 0;
};

Summary summarize(const std::vector<double>& values);

struct MetricsAggregate {
  Summary jaccard;
  Summary precision;
  Summary recall;
  Summary f1;
  Summary fbeta;
  Summary me;
};

MetricsAggregate aggregate(const std::vector<MetricsReport>& reports);

}  // namespace pssi
