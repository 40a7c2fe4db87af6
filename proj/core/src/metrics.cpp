#include "pssi/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace pssi {

ConfusionCounts confusion(const Mask& pred, const Mask& truth) {
  if (pred.width != truth.width || pred.height != truth.height) {
    throw Error(ErrorCode::DimensionMismatch, "prediction and ground truth differ in size");
  }
  ConfusionCounts c;
  for (std::size_t i = 0; i < pred.bits.size(); ++i) {
    const bool p = pred.bits[i] != 0;
    const bool t = truth.bits[i] != 0;
    if (p && t) {
      ++c.tp;
    } else if (p) {
      ++c.fp;
    } else if (t) {
      ++c.fn;
    } else {
      ++c.tn;
    }
  }
  return c;
}

namespace {

double ratio(double num, double den) { return den > 0.0 ? num / den : 0.0; }

}  // namespace

MetricsReport report(const ConfusionCounts& counts, double beta_sq) {
  const double tp = static_cast<double>(counts.tp);
  const double fp = static_cast<double>(counts.fp);
  const double fn = static_cast<double>(counts.fn);
  const double tn = static_cast<double>(counts.tn);
  MetricsReport r;
  r.beta_sq = beta_sq;
  r.jaccard = ratio(tp, tp + fp + fn);
  r.precision = ratio(tp, tp + fp);
  r.recall = ratio(tp, tp + fn);
  r.f1 = ratio(2.0 * r.precision * r.recall, r.precision + r.recall);
  r.fbeta = ratio((1.0 + beta_sq) * r.precision * r.recall, beta_sq * r.precision + r.recall);
  r.me = ratio(fp + fn, tp + tn + fp + fn);
  return r;
}

ScribbleAmount scribble_amount(const Scribbles& scribbles, int width, int height) {
  check_bounds(scribbles, width, height);
  const double n = static_cast<double>(width) * height;
  ScribbleAmount a;
  a.bg_percent = 100.0 * static_cast<double>(scribbles.bg_pixels.size()) / n;
  a.fg_percent = 100.0 * static_cast<double>(scribbles.fg_pixels.size()) / n;
  a.total_percent = a.bg_percent + a.fg_percent;
  return a;
}

Summary summarize(const std::vector<double>& values) {
  Summary s;
  s.count = values.size();
  if (values.empty()) return s;
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  s.min = *lo;
  s.max = *hi;
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.stddev = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  return s;
}

MetricsAggregate aggregate(const std::vector<MetricsReport>& reports) {
  auto column = [&](double MetricsReport::*field) {
    std::vector<double> v;
    v.reserve(reports.size());
    for (const auto& r : reports) v.push_back(r.*field);
    return summarize(v);
  };
  return {column(&MetricsReport::jaccard), column(&MetricsReport::precision), column(&MetricsReport::recall),
          column(&MetricsReport::f1),      column(&MetricsReport::fbeta),     column(&MetricsReport::me)};
}

}  // namespace pssi
