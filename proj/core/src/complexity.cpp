#include "pssi/complexity.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <random>

namespace pssi {

namespace {

std::vector<double> random_distribution(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> v(n);
  double sum = 0.0;
  for (auto& x : v) {
    x = unit(rng) + 1e-6;
    sum += x;
  }
  for (auto& x : v) x /= sum;
  return v;
}

template <typename F>
double best_batch_seconds(int iterations, int repeats, F&& body) {
  double best = std::numeric_limits<double>::infinity();
  for (int rep = 0; rep < repeats; ++rep) {
    const auto start = std::chrono::steady_clock::now();
    body(iterations);
    best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
  }
  return best / iterations;
}

}  // namespace

SegmentFeatures random_features(int bins, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const auto b = static_cast<std::size_t>(bins);
  SegmentFeatures f;
  f.hist_r.bins = random_distribution(b, rng);
  f.hist_g.bins = random_distribution(b, rng);
  f.hist_b.bins = random_distribution(b, rng);
  f.joint = random_distribution(b * b * b, rng);
  f.area = 1;
  return f;
}

std::vector<KernelTiming> time_similarity_kernels(const std::vector<int>& bins, int iterations, int repeats) {
  std::vector<KernelTiming> out;
  volatile double sink = 0.0;
  for (int b : bins) {
    const SegmentFeatures p = random_features(b, 2 * static_cast<std::uint64_t>(b) + 1);
    const SegmentFeatures q = random_features(b, 2 * static_cast<std::uint64_t>(b) + 2);
    KernelTiming t;
    t.bins = b;
    t.pssi_seconds = best_batch_seconds(iterations, repeats, [&](int n) {
      double acc = 0.0;
      for (int i = 0; i < n; ++i) {
        acc += pssi(i & 1 ? p : q, i & 1 ? q : p, 0.2);
      }
      sink = sink + acc;
    });
    t.bha_seconds = best_batch_seconds(iterations, repeats, [&](int n) {
      double acc = 0.0;
      for (int i = 0; i < n; ++i) {
        acc += bha(i & 1 ? p : q, i & 1 ? q : p);
      }
      sink = sink + acc;
    });
    out.push_back(t);
  }
  return out;
}

std::optional<double> loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) return std::nullopt;
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]);
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double den = n * sxx - sx * sx;
  if (std::abs(den) < 1e-12) return std::nullopt;
  return (n * sxy - sx * sy) / den;
}

}  // namespace pssi
