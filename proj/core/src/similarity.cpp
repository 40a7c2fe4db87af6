#include "pssi/similarity.hpp"

#include <cmath>

namespace pssi {

void SimilarityConfig::validate() const {
  if (bins < 2 || bins > 256) {
    throw Error(ErrorCode::InvalidArgument, "bin count must lie in [2, 256]");
  }
  if (!(lambda >= 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "lambda must be non-negative");
  }
}

ChannelHistogram channel_histogram(std::span<const std::uint8_t> values, int bins) {
  if (values.empty()) {
    throw Error(ErrorCode::EmptySegment, "histogram of an empty segment");
  }
  if (bins < 2 || bins > 256) {
    throw Error(ErrorCode::InvalidArgument, "bin count must lie in [2, 256]");
  }
  ChannelHistogram h{std::vector<double>(static_cast<std::size_t>(bins), 0.0)};
  for (auto v : values) h.bins[static_cast<std::size_t>(bin_index(v, bins))] += 1.0;
  const double n = static_cast<double>(values.size());
  for (auto& b : h.bins) b /= n;
  return h;
}

double ihsi(const ChannelHistogram& p, const ChannelHistogram& q, double lambda) {
  if (p.size() != q.size()) {
    throw Error(ErrorCode::BinMismatch, "histograms have different bin counts");
  }
  const std::size_t n = p.bins.size();
  const double* a = p.bins.data();
  const double* b = q.bins.data();
  double dot = 0.0;
  double adjacent = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    dot += a[i] * b[i];
    double nb = 0.0;
    if (i > 0) nb += b[i - 1];
    if (i + 1 < n) nb += b[i + 1];
    adjacent += a[i] * nb;
  }
  return std::sqrt(dot + lambda * adjacent);
}

double harmonic_mean3(double a, double b, double c) {
  if (a <= 0.0 || b <= 0.0 || c <= 0.0) return 0.0;
  return 3.0 / (1.0 / a + 1.0 / b + 1.0 / c);
}

double pssi(const SegmentFeatures& p, const SegmentFeatures& q, double lambda) {
  return harmonic_mean3(ihsi(p.hist_r, q.hist_r, lambda), ihsi(p.hist_g, q.hist_g, lambda),
                        ihsi(p.hist_b, q.hist_b, lambda));
}

double bha(const SegmentFeatures& p, const SegmentFeatures& q) {
  if (!p.joint || !q.joint) {
    throw Error(ErrorCode::MissingJointHistogram, "Bhattacharyya needs joint histograms");
  }
  const auto& a = *p.joint;
  const auto& b = *q.joint;
  if (a.size() != b.size()) {
    throw Error(ErrorCode::BinMismatch, "joint histograms have different sizes");
  }
  double sum = 0.0;
  for (std::size_t u = 0; u < a.size(); ++u) sum += std::sqrt(a[u] * b[u]);
  return sum;
}

double similarity(const SegmentFeatures& p, const SegmentFeatures& q, const SimilarityConfig& config) {
  return config.measure == Measure::Bha ? bha(p, q) : pssi(p, q, config.lambda);
}

double similarity_bound(const SimilarityConfig& config) {
  return config.measure == Measure::Bha ? 1.0 : std::sqrt(1.0 + 2.0 * config.lambda);
}

std::vector<SegmentFeatures> segment_features(const Image& image, const SegmentMap& segmap,
                                              const SimilarityConfig& config) {
  config.validate();
  if (image.width != segmap.width || image.height != segmap.height) {
    throw Error(ErrorCode::DimensionMismatch, "segment map does not match image dimensions");
  }
  const auto bins = static_cast<std::size_t>(config.bins);
  const bool joint = config.measure == Measure::Bha;
  std::vector<SegmentFeatures> out(static_cast<std::size_t>(segmap.n_segments));
  for (auto& f : out) {
    f.hist_r.bins.assign(bins, 0.0);
    f.hist_g.bins.assign(bins, 0.0);
    f.hist_b.bins.assign(bins, 0.0);
    if (joint) f.joint.emplace(bins * bins * bins, 0.0);
  }
  for (std::size_t i = 0; i < segmap.labels.size(); ++i) {
    SegmentFeatures& f = out[static_cast<std::size_t>(segmap.labels[i])];
    const auto* px = image.data.data() + 3 * i;
    const auto r = static_cast<std::size_t>(bin_index(px[0], config.bins));
    const auto g = static_cast<std::size_t>(bin_index(px[1], config.bins));
    const auto b = static_cast<std::size_t>(bin_index(px[2], config.bins));
    f.hist_r.bins[r] += 1.0;
    f.hist_g.bins[g] += 1.0;
    f.hist_b.bins[b] += 1.0;
    if (joint) (*f.joint)[(r * bins + g) * bins + b] += 1.0;
    ++f.area;
  }
  for (auto& f : out) {
    if (f.area == 0) {
      throw Error(ErrorCode::EmptySegment, "segment map has an empty segment id");
    }
    const double n = static_cast<double>(f.area);
    for (auto* h : {&f.hist_r.bins, &f.hist_g.bins, &f.hist_b.bins}) {
      for (auto& v : *h) v /= n;
    }
    if (joint) {
      for (auto& v : *f.joint) v /= n;
    }
  }
  return out;
}

}  // namespace pssi
