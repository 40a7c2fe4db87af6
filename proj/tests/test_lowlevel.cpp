#include <gtest/gtest.h>

#include <cmath>

#include "pssi/lowlevel.hpp"
#include "test_support.hpp"

namespace pssi {
namespace {

using testing::constant_image;
using testing::half_planes;

// Straight O(n^2) flat-kernel mean shift: every pixel is tested against
// every data point, no spatial window.
std::vector<Mode> brute_force_meanshift(const Image& img, const MeanShiftParams& p) {
  const auto luv = image_to_luv(img);
  std::vector<Mode> out;
  for (int r = 0; r < img.height; ++r) {
    for (int c = 0; c < img.width; ++c) {
      Mode m{static_cast<double>(c), static_cast<double>(r), luv[static_cast<std::size_t>(r) * img.width + c]};
      for (int it = 0; it < p.max_iter; ++it) {
        double s[5] = {0, 0, 0, 0, 0};
        int n = 0;
        for (int pr = 0; pr < img.height; ++pr) {
          for (int pc = 0; pc < img.width; ++pc) {
            const auto& q = luv[static_cast<std::size_t>(pr) * img.width + pc];
            const double ds = std::pow(pc - m.x, 2) + std::pow(pr - m.y, 2);
            const double dr = std::pow(q[0] - m.color[0], 2) + std::pow(q[1] - m.color[1], 2) +
                              std::pow(q[2] - m.color[2], 2);
            if (ds <= p.hs * p.hs && dr <= p.hr * p.hr) {
              s[0] += pc;
              s[1] += pr;
              s[2] += q[0];
              s[3] += q[1];
              s[4] += q[2];
              ++n;
            }
          }
        }
        if (n == 0) break;
        Mode next{s[0] / n, s[1] / n, {s[2] / n, s[3] / n, s[4] / n}};
        const double shift = std::sqrt(std::pow(next.x - m.x, 2) + std::pow(next.y - m.y, 2) +
                                       std::pow(next.color[0] - m.color[0], 2) +
                                       std::pow(next.color[1] - m.color[1], 2) +
                                       std::pow(next.color[2] - m.color[2], 2));
        m = next;
        if (shift < p.eps) break;
      }
      out.push_back(m);
    }
  }
  return out;
}

TEST(RgbToLuv, ReferenceColors) {
  const Luv black = rgb_to_luv(0, 0, 0);
  EXPECT_NEAR(black[0], 0.0, 1e-9);
  const Luv white = rgb_to_luv(255, 255, 255);
  EXPECT_NEAR(white[0], 100.0, 1e-3);
  EXPECT_NEAR(white[1], 0.0, 1e-2);
  EXPECT_NEAR(white[2], 0.0, 1e-2);
  // sRGB red: L* 53.24, u* 175.01, v* 37.76.
  const Luv red = rgb_to_luv(255, 0, 0);
  EXPECT_NEAR(red[0], 53.24, 0.02);
  EXPECT_NEAR(red[1], 175.01, 0.1);
  EXPECT_NEAR(red[2], 37.76, 0.1);
}

TEST(MeanShiftFilter, ConstantImageIsFixedPoint) {
  const Image img = constant_image(12, 9, {40, 120, 200});
  const Luv c = rgb_to_luv(40, 120, 200);
  for (const Mode& m : meanshift_filter(img, {})) {
    EXPECT_NEAR(m.color[0], c[0], 1e-9);
    EXPECT_NEAR(m.color[1], c[1], 1e-9);
    EXPECT_NEAR(m.color[2], c[2], 1e-9);
  }
}

TEST(MeanShiftFilter, FarPixelsStayInTheirHalfPlane) {
  const Image img = half_planes(40, 20, {0, 0, 0}, {255, 255, 255});
  MeanShiftParams p;
  const auto modes = meanshift_filter(img, p);
  const Luv left = rgb_to_luv(0, 0, 0);
  const Luv right = rgb_to_luv(255, 255, 255);
  for (int r = 0; r < 20; ++r) {
    for (int c : {2, 5, 35, 37}) {
      const Mode& m = modes[static_cast<std::size_t>(r) * 40 + c];
      const Luv& want = c < 20 ? left : right;
      const double d = std::sqrt(std::pow(m.color[0] - want[0], 2) + std::pow(m.color[1] - want[1], 2) +
                                 std::pow(m.color[2] - want[2], 2));
      EXPECT_LT(d, p.eps);
    }
  }
}

TEST(MeanShiftFilter, RampMatchesBruteForce) {
  Image ramp(16, 1);
  for (int c = 0; c < 16; ++c) {
    const auto g = static_cast<std::uint8_t>(10 * c);
    std::fill(ramp.at(0, c), ramp.at(0, c) + 3, g);
  }
  MeanShiftParams p;
  p.hs = 3;
  p.hr = 25;
  const auto fast = meanshift_filter(ramp, p);
  const auto slow = brute_force_meanshift(ramp, p);
  ASSERT_EQ(fast.size(), slow.size());
  for (std::size_t i = 0; i < fast.size(); ++i) {
    EXPECT_NEAR(fast[i].x, slow[i].x, 1e-9) << i;
    EXPECT_NEAR(fast[i].y, slow[i].y, 1e-9) << i;
    for (int ch = 0; ch < 3; ++ch) EXPECT_NEAR(fast[i].color[ch], slow[i].color[ch], 1e-9) << i;
  }
}

TEST(MeanShiftFilter, NoisyImageMatchesBruteForce) {
  const auto fx = testing::noisy_disc(14, 12, 8.0, 5);
  MeanShiftParams p;
  p.hs = 4;
  const auto fast = meanshift_filter(fx.image, p);
  const auto slow = brute_force_meanshift(fx.image, p);
  for (std::size_t i = 0; i < fast.size(); ++i) {
    EXPECT_NEAR(fast[i].x, slow[i].x, 1e-9);
    EXPECT_NEAR(fast[i].color[0], slow[i].color[0], 1e-9);
  }
}

TEST(MeanShiftFilter, ThreadCountDoesNotChangeResult) {
  const auto fx = testing::noisy_disc(30, 23, 8.0, 9);
  const auto one = meanshift_filter(fx.image, {}, 1);
  const auto four = meanshift_filter(fx.image, {}, 4);
  for (std::size_t i = 0; i < one.size(); ++i) {
    EXPECT_EQ(one[i].x, four[i].x);
    EXPECT_EQ(one[i].color, four[i].color);
  }
}

TEST(MeanShiftParams, Validation) {
  MeanShiftParams p;
  p.hs = 0;
  EXPECT_THROW(p.validate(), Error);
  p = {};
  p.min_size = 0;
  EXPECT_THROW(p.validate(), Error);
  p = {};
  p.eps = -1;
  EXPECT_THROW(p.validate(), Error);
}

TEST(MeanShiftSegment, ConstantImageIsOneSegment) {
  const SegmentMap s = meanshift_segment(constant_image(20, 20, {9, 9, 9}), {});
  EXPECT_EQ(s.n_segments, 1);
  EXPECT_TRUE(is_valid_segment_map(s));
}

TEST(MeanShiftSegment, HalfPlanesSplitExactlyOnTheEdge) {
  const SegmentMap s = meanshift_segment(half_planes(20, 20, {0, 0, 0}, {255, 255, 255}), {});
  ASSERT_EQ(s.n_segments, 2);
  for (int r = 0; r < 20; ++r) {
    for (int c = 0; c < 20; ++c) {
      EXPECT_EQ(s.at(r, c) == s.at(0, 0), c < 10);
    }
  }
}

TEST(MeanShiftSegment, NoisyRegionsArePure) {
  const auto fx = testing::noisy_disc(64, 64, 8.0, 21);
  const SegmentMap s = meanshift_segment(fx.image, {});
  EXPECT_TRUE(is_valid_segment_map(s));
  EXPECT_GE(s.n_segments, 2);
  EXPECT_GE(testing::min_purity(s, fx.truth), 0.95);
}

TEST(MeanShiftSegment, NoUndersizedSegmentsAfterMerging) {
  const auto fx = testing::noisy_disc(48, 40, 20.0, 4);
  MeanShiftParams p;
  p.hr = 6;
  p.min_size = 30;
  const SegmentMap s = meanshift_segment(fx.image, p);
  EXPECT_TRUE(is_valid_segment_map(s));
  if (s.n_segments > 2) {
    for (auto a : s.areas()) EXPECT_GE(a, 30u);
  }
}

TEST(MeanShiftSegment, MergingStopsAtTwoSegments) {
  // A 3x3 dark square on white: both regions under min_size, but the map
  // keeps two segments.
  Image img = constant_image(6, 6, {255, 255, 255});
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) std::fill(img.at(r, c), img.at(r, c) + 3, 0);
  }
  MeanShiftParams p;
  p.min_size = 1000;
  const SegmentMap s = meanshift_segment(img, p);
  EXPECT_EQ(s.n_segments, 2);
}

TEST(MeanShiftSegment, Deterministic) {
  const auto fx = testing::noisy_disc(40, 30, 8.0, 77);
  EXPECT_EQ(meanshift_segment(fx.image, {}), meanshift_segment(fx.image, {}));
}

TEST(MeanShiftSegment, RangeBandwidthPastColorGapCollapsesToOne) {
  const Image img = half_planes(24, 16, {100, 100, 100}, {120, 120, 120});
  const Luv a = rgb_to_luv(100, 100, 100);
  const Luv b = rgb_to_luv(120, 120, 120);
  const double gap = std::sqrt(std::pow(a[0] - b[0], 2) + std::pow(a[1] - b[1], 2) + std::pow(a[2] - b[2], 2));
  MeanShiftParams p;
  p.min_size = 1;
  int previous = 3;
  for (double scale : {0.5, 0.9, 1.1, 1.5, 3.0}) {
    p.hr = gap * scale;
    const int n = meanshift_segment(img, p).n_segments;
    EXPECT_EQ(n, scale < 1.0 ? 2 : 1) << "hr=" << p.hr;
    EXPECT_LE(n, previous);
    previous = n;
  }
}

TEST(SlicSegment, SingleClusterCoversImage) {
  const auto fx = testing::noisy_disc(30, 17, 8.0, 1);
  const SegmentMap s = slic_segment(fx.image, 1, 10);
  EXPECT_EQ(s.n_segments, 1);
}

TEST(SlicSegment, ConstantImageGivesNearEqualCells) {
  const SegmentMap s = slic_segment(constant_image(64, 64, {50, 60, 70}), 16, 10);
  EXPECT_EQ(s.n_segments, 16);
  EXPECT_TRUE(is_valid_segment_map(s));
  for (auto a : s.areas()) {
    EXPECT_GE(a, 256u / 2);
    EXPECT_LE(a, 256u * 2);
  }
}

TEST(SlicSegment, HalfPlanesArePure) {
  const Image img = half_planes(40, 40, {200, 40, 40}, {40, 40, 200});
  Mask truth(40, 40);
  for (int r = 0; r < 40; ++r) {
    for (int c = 0; c < 20; ++c) truth.set(r, c, true);
  }
  const SegmentMap s = slic_segment(img, 8, 10);
  EXPECT_TRUE(is_valid_segment_map(s));
  EXPECT_GE(testing::min_purity(s, truth), 0.9);
}

TEST(SlicSegment, NoisyImageIsValidMap) {
  const auto fx = testing::noisy_disc(57, 43, 25.0, 8);
  for (int k : {5, 37, 200}) {
    const SegmentMap s = slic_segment(fx.image, k, 10);
    EXPECT_TRUE(is_valid_segment_map(s)) << k;
    EXPECT_GT(s.n_segments, k / 3) << k;
    EXPECT_LT(s.n_segments, 3 * k) << k;
  }
}

TEST(SlicSegment, InvalidK) {
  const Image img(4, 4);
  for (int k : {0, 17}) {
    try {
      slic_segment(img, k, 10);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::InvalidK);
    }
  }
}

TEST(SegmentMapValidity, DetectsDisconnectedAndMissingIds) {
  SegmentMap s{3, 1, {0, 1, 0}, 2};
  EXPECT_FALSE(is_valid_segment_map(s));
  SegmentMap gap{3, 1, {0, 2, 2}, 3};
  EXPECT_FALSE(is_valid_segment_map(gap));
  SegmentMap ok{3, 1, {0, 1, 1}, 2};
  EXPECT_TRUE(is_valid_segment_map(ok));
}

}  // namespace
}  // namespace pssi
