#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "pssi/similarity.hpp"
#include "test_support.hpp"

namespace pssi {
namespace {

ChannelHistogram hist(std::vector<double> bins) { return {std::move(bins)}; }

SegmentFeatures features(ChannelHistogram r, ChannelHistogram g, ChannelHistogram b) {
  SegmentFeatures f;
  f.hist_r = std::move(r);
  f.hist_g = std::move(g);
  f.hist_b = std::move(b);
  f.area = 1;
  return f;
}

ChannelHistogram random_hist(int bins, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0, 1);
  std::vector<double> v(static_cast<std::size_t>(bins));
  double s = 0;
  for (auto& x : v) {
    // Sparse supports exercise the zero paths.
    x = unit(rng) < 0.3 ? 0.0 : unit(rng);
    s += x;
  }
  if (s == 0) {
    v[0] = 1;
    s = 1;
  }
  for (auto& x : v) x /= s;
  return {v};
}

// sqrt(P^T Q + lambda P^T A Q) with A materialized as a dense matrix.
double ihsi_matrix_form(const ChannelHistogram& p, const ChannelHistogram& q, double lambda) {
  const int n = p.size();
  std::vector<std::vector<double>> a(static_cast<std::size_t>(n), std::vector<double>(static_cast<std::size_t>(n), 0));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = std::abs(i - j) == 1;
  }
  double ptq = 0;
  double ptaq = 0;
  for (int i = 0; i < n; ++i) {
    ptq += p.bins[static_cast<std::size_t>(i)] * q.bins[static_cast<std::size_t>(i)];
    double aq = 0;
    for (int j = 0; j < n; ++j) aq += a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] * q.bins[static_cast<std::size_t>(j)];
    ptaq += p.bins[static_cast<std::size_t>(i)] * aq;
  }
  return std::sqrt(ptq + lambda * ptaq);
}

TEST(ChannelHistogram, DirectCount) {
  const std::vector<std::uint8_t> v{0, 0, 128, 255};
  EXPECT_EQ(channel_histogram(v, 8).bins, (std::vector<double>{0.5, 0, 0, 0, 0.25, 0, 0, 0.25}));
}

TEST(ChannelHistogram, ConstantIsDelta) {
  const std::vector<std::uint8_t> v(17, 42);
  EXPECT_EQ(channel_histogram(v, 8).bins, (std::vector<double>{0, 1, 0, 0, 0, 0, 0, 0}));
}

TEST(ChannelHistogram, FullRangeIsUniform) {
  std::vector<std::uint8_t> v(256);
  std::iota(v.begin(), v.end(), 0);
  EXPECT_EQ(channel_histogram(v, 4).bins, (std::vector<double>{0.25, 0.25, 0.25, 0.25}));
}

TEST(ChannelHistogram, EmptyIsError) {
  try {
    channel_histogram({}, 8);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EmptySegment);
  }
}

TEST(Ihsi, FrozenExamples) {
  EXPECT_NEAR(ihsi(hist({1, 0, 0, 0}), hist({1, 0, 0, 0}), 0.2), 1.0, 1e-12);
  EXPECT_NEAR(ihsi(hist({1, 0, 0, 0}), hist({0, 0, 1, 0}), 0.2), 0.0, 1e-12);
  EXPECT_NEAR(ihsi(hist({1, 0, 0, 0}), hist({0, 1, 0, 0}), 0.2), 0.4472135954999579, 1e-12);
  EXPECT_NEAR(ihsi(hist({0.5, 0.5, 0, 0}), hist({0.5, 0.5, 0, 0}), 0.2), 0.7745966692414834, 1e-12);
}

TEST(Ihsi, BinMismatch) {
  try {
    ihsi(hist({1, 0}), hist({1, 0, 0}), 0.2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::BinMismatch);
  }
}

TEST(Ihsi, MatchesMaterializedMatrixForm) {
  std::mt19937_64 rng(1);
  for (int t = 0; t < 1000; ++t) {
    const int b = 2 + static_cast<int>(rng() % 31);
    const auto p = random_hist(b, rng);
    const auto q = random_hist(b, rng);
    EXPECT_NEAR(ihsi(p, q, 0.2), ihsi_matrix_form(p, q, 0.2), 1e-12);
  }
}

TEST(Ihsi, SymmetricAndBounded) {
  std::mt19937_64 rng(2);
  for (int t = 0; t < 1000; ++t) {
    const int b = 2 + static_cast<int>(rng() % 15);
    const double lambda = static_cast<double>(rng() % 100) / 100.0;
    const auto p = random_hist(b, rng);
    const auto q = random_hist(b, rng);
    const double pq = ihsi(p, q, lambda);
    EXPECT_NEAR(pq, ihsi(q, p, lambda), 1e-12);
    EXPECT_GE(pq, 0.0);
    EXPECT_LE(pq, std::sqrt(1 + 2 * lambda) + 1e-12);
  }
}

TEST(Pssi, IdenticalDeltasScoreOne) {
  const auto d = hist({0, 0, 1, 0});
  const auto f = features(d, d, d);
  EXPECT_NEAR(pssi(f, f, 0.2), 1.0, 1e-12);
}

TEST(Pssi, ZeroChannelGivesZero) {
  const auto a = features(hist({1, 0, 0, 0}), hist({1, 0, 0, 0}), hist({1, 0, 0, 0}));
  const auto b = features(hist({1, 0, 0, 0}), hist({1, 0, 0, 0}), hist({0, 0, 0, 1}));
  EXPECT_EQ(pssi(a, b, 0.2), 0.0);
}

TEST(Pssi, HarmonicMeanOfChannelScores) {
  // Channel scores (1, 1, sqrt(0.2)); HM = 3 / (2 + 1/sqrt(0.2)).
  const auto a = features(hist({1, 0, 0, 0}), hist({1, 0, 0, 0}), hist({1, 0, 0, 0}));
  const auto b = features(hist({1, 0, 0, 0}), hist({1, 0, 0, 0}), hist({0, 1, 0, 0}));
  EXPECT_NEAR(pssi(a, b, 0.2), 0.7082039324993691, 1e-12);
}

TEST(Pssi, SymmetricAndBetweenMinAndMeanOfChannels) {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 1000; ++t) {
    const int b = 2 + static_cast<int>(rng() % 15);
    const auto p = features(random_hist(b, rng), random_hist(b, rng), random_hist(b, rng));
    const auto q = features(random_hist(b, rng), random_hist(b, rng), random_hist(b, rng));
    const double s = pssi(p, q, 0.2);
    EXPECT_NEAR(s, pssi(q, p, 0.2), 1e-12);
    EXPECT_GE(s, 0.0);
    EXPECT_LE(s, std::sqrt(1.4) + 1e-12);
    const double a = ihsi(p.hist_r, q.hist_r, 0.2);
    const double b2 = ihsi(p.hist_g, q.hist_g, 0.2);
    const double c = ihsi(p.hist_b, q.hist_b, 0.2);
    if (std::min({a, b2, c}) == 0.0) {
      EXPECT_EQ(s, 0.0);
    } else {
      EXPECT_GE(s, std::min({a, b2, c}) - 1e-12);
      EXPECT_LE(s, (a + b2 + c) / 3.0 + 1e-12);
    }
  }
}

SegmentFeatures joint_only(std::vector<double> joint) {
  SegmentFeatures f;
  f.joint = std::move(joint);
  return f;
}

TEST(Bha, FrozenExamples) {
  std::vector<double> p(8, 0.0);
  p[2] = 0.25;
  p[5] = 0.75;
  EXPECT_NEAR(bha(joint_only(p), joint_only(p)), 1.0, 1e-12);

  std::vector<double> a(8, 0.0), b(8, 0.0);
  a[0] = 1;
  b[7] = 1;
  EXPECT_EQ(bha(joint_only(a), joint_only(b)), 0.0);

  std::vector<double> two(8, 0.0), one(8, 0.0);
  two[3] = 0.5;
  two[4] = 0.5;
  one[3] = 1.0;
  EXPECT_NEAR(bha(joint_only(two), joint_only(one)), 0.7071067811865476, 1e-12);
}

TEST(Bha, MissingJointHistogram) {
  try {
    bha(SegmentFeatures{}, joint_only({1}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::MissingJointHistogram);
  }
}

TEST(Bha, SymmetricBoundedSelfSimilar) {
  std::mt19937_64 rng(4);
  for (int t = 0; t < 1000; ++t) {
    const int b = 2 + static_cast<int>(rng() % 5);
    const auto p = joint_only(random_hist(b * b * b, rng).bins);
    const auto q = joint_only(random_hist(b * b * b, rng).bins);
    const double s = bha(p, q);
    EXPECT_NEAR(s, bha(q, p), 1e-12);
    EXPECT_GE(s, 0.0);
    EXPECT_LE(s, 1.0 + 1e-12);
    EXPECT_NEAR(bha(p, p), 1.0, 1e-9);
  }
}

TEST(SegmentFeatures, ConstantImageGivesDeltas) {
  const Image img = testing::constant_image(5, 4, {10, 100, 250});
  SegmentMap s{5, 4, std::vector<std::int32_t>(20, 0), 1};
  const auto f = segment_features(img, s, {});
  ASSERT_EQ(f.size(), 1u);
  EXPECT_EQ(f[0].hist_r.bins[0], 1.0);
  EXPECT_EQ(f[0].hist_g.bins[3], 1.0);
  EXPECT_EQ(f[0].hist_b.bins[7], 1.0);
  EXPECT_EQ(f[0].area, 20u);
  EXPECT_FALSE(f[0].joint.has_value());
}

TEST(SegmentFeatures, MatchesNaiveRecount) {
  const auto fx = testing::noisy_disc(20, 16, 30.0, 6);
  SegmentMap s{20, 16, std::vector<std::int32_t>(320), 2};
  for (std::size_t i = 0; i < 320; ++i) s.labels[i] = fx.truth.bits[i];
  SimilarityConfig config;
  config.bins = 16;
  config.measure = Measure::Bha;
  const auto f = segment_features(fx.image, s, config);
  for (int seg = 0; seg < 2; ++seg) {
    std::vector<std::uint8_t> r, g, b;
    std::vector<double> joint(16 * 16 * 16, 0.0);
    for (std::size_t i = 0; i < 320; ++i) {
      if (s.labels[i] != seg) continue;
      r.push_back(fx.image.data[3 * i]);
      g.push_back(fx.image.data[3 * i + 1]);
      b.push_back(fx.image.data[3 * i + 2]);
    }
    for (std::size_t i = 0; i < r.size(); ++i) {
      joint[static_cast<std::size_t>((r[i] / 16 * 16 + g[i] / 16) * 16 + b[i] / 16)] += 1.0 / static_cast<double>(r.size());
    }
    const auto& fs = f[static_cast<std::size_t>(seg)];
    auto near = [](const std::vector<double>& x, const std::vector<double>& y) {
      for (std::size_t i = 0; i < x.size(); ++i) {
        if (std::abs(x[i] - y[i]) > 1e-12) return false;
      }
      return x.size() == y.size();
    };
    EXPECT_TRUE(near(fs.hist_r.bins, channel_histogram(r, 16).bins));
    EXPECT_TRUE(near(fs.hist_g.bins, channel_histogram(g, 16).bins));
    EXPECT_TRUE(near(fs.hist_b.bins, channel_histogram(b, 16).bins));
    ASSERT_TRUE(fs.joint.has_value());
    EXPECT_TRUE(near(*fs.joint, joint));
    EXPECT_NEAR(std::accumulate(fs.joint->begin(), fs.joint->end(), 0.0), 1.0, 1e-9);
  }
}

TEST(SimilarityConfig, Validation) {
  SimilarityConfig c;
  c.bins = 1;
  EXPECT_THROW(c.validate(), Error);
  c = {};
  c.lambda = -0.1;
  EXPECT_THROW(c.validate(), Error);
}

}  // namespace
}  // namespace pssi
