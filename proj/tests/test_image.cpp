#include <gtest/gtest.h>

#include <random>

#include "pssi/image.hpp"
#include "test_support.hpp"

namespace pssi {
namespace {

using testing::fixture;

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("pssi_test_" + std::to_string(::getpid()) + "_" + name);
}

TEST(LoadImage, AllZeroPpm) {
  const std::string ppm = std::string("P6\n# comment\n2 2\n255\n") + std::string(12, '\0');
  const auto path = temp_path("zero.ppm");
  write_file(path, std::span(reinterpret_cast<const std::uint8_t*>(ppm.data()), ppm.size()));
  const Image img = load_image(path);
  EXPECT_EQ(img.width, 2);
  EXPECT_EQ(img.height, 2);
  EXPECT_EQ(img.data, std::vector<std::uint8_t>(12, 0));
  std::filesystem::remove(path);
}

TEST(LoadImage, PngFixturesMatchReferenceDumps) {
  for (const std::string stem : {"known4x4", "known4x4_gray", "known4x4_palette"}) {
    const Image img = load_image(fixture(stem + ".png"));
    const auto raw = read_file(fixture(stem + ".rgb"));
    EXPECT_EQ(img.width, 4) << stem;
    EXPECT_EQ(img.height, 4) << stem;
    EXPECT_EQ(img.data, raw) << stem;
  }
}

TEST(LoadImage, TextFileIsDecodeError) {
  try {
    load_image(fixture("not_an_image.txt"));
    FAIL() << "expected DecodeError";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DecodeError);
  }
}

TEST(LoadImage, MissingFileIsFileNotFound) {
  try {
    load_image(fixture("does_not_exist.png"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::FileNotFound);
    EXPECT_NE(std::string(e.what()).find("does_not_exist.png"), std::string::npos);
  }
}

TEST(LoadImage, TruncatedPngIsDecodeError) {
  auto bytes = read_file(fixture("known4x4.png"));
  bytes.resize(bytes.size() / 2);
  EXPECT_THROW(decode_image(bytes), Error);
}

TEST(SaveMask, AllForegroundSamplesAre255) {
  const auto path = temp_path("fg.png");
  save_mask(Mask(3, 3, true), path);
  const RgbaImage raw = load_rgba(path);
  ASSERT_EQ(raw.data.size(), 9u * 4);
  for (std::size_t i = 0; i < 9; ++i) EXPECT_EQ(raw.data[4 * i], 255);
  std::filesystem::remove(path);
}

TEST(SaveMask, AllBackgroundSamplesAreZero) {
  const auto png = encode_png(Mask(3, 3, false));
  const RgbaImage raw = decode_rgba(png);
  for (std::size_t i = 0; i < 9; ++i) EXPECT_EQ(raw.data[4 * i], 0);
}

TEST(SaveMask, CheckerboardRoundTrips) {
  Mask m(2, 2);
  m.set(0, 0, true);
  m.set(1, 1, true);
  EXPECT_EQ(decode_mask(encode_png(m)), m);
}

TEST(SaveMask, RandomMasksRoundTripBitExactly) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const int w = 1 + static_cast<int>(rng() % 40);
    const int h = 1 + static_cast<int>(rng() % 40);
    Mask m(w, h);
    for (auto& b : m.bits) b = rng() & 1;
    EXPECT_EQ(decode_mask(encode_png(m)), m);
  }
}

TEST(SaveImage, RgbRoundTrip) {
  const Image img = load_image(fixture("known4x4.png"));
  EXPECT_EQ(decode_image(encode_png(img)), img);
}

RgbaImage blank_rgba(int w, int h) {
  RgbaImage img{w, h, std::vector<std::uint8_t>(static_cast<std::size_t>(w) * h * 4, 0)};
  return img;
}

void paint(RgbaImage& img, int r, int c, std::array<std::uint8_t, 4> px) {
  std::copy(px.begin(), px.end(), img.data.begin() + 4 * (static_cast<std::ptrdiff_t>(r) * img.width + c));
}

TEST(LoadScribbles, CountsRedAndBluePixels) {
  RgbaImage img = blank_rgba(10, 10);
  for (int i = 0; i < 5; ++i) paint(img, 1, i, {255, 0, 0, 255});
  for (int i = 0; i < 7; ++i) paint(img, 8, i, {0, 0, 255, 255});
  paint(img, 5, 5, {255, 0, 0, 128});   // translucent red is ignored
  paint(img, 5, 6, {250, 0, 0, 255});   // off-red is ignored
  const Scribbles s = scribbles_from_overlay(img);
  EXPECT_EQ(s.fg_pixels.size(), 5u);
  EXPECT_EQ(s.bg_pixels.size(), 7u);
}

TEST(LoadScribbles, OverlayPngFromDisk) {
  const Scribbles s = load_scribbles(fixture("disc-scribbles.png"));
  EXPECT_EQ(s.fg_pixels.size(), 4u * 8);
  EXPECT_EQ(s.bg_pixels.size(), 2u * 36);
}

TEST(LoadScribbles, SharedPixelInTwoMasksIsConflict) {
  Mask fg(5, 5);
  Mask bg(5, 5);
  fg.set(3, 3, true);
  fg.set(0, 0, true);
  bg.set(3, 3, true);
  try {
    scribbles_from_masks(fg, bg);
    FAIL();
  } catch (const ConflictError& e) {
    EXPECT_EQ(e.pixel(), (Pixel{3, 3}));
  }
}

TEST(LoadScribbles, EmptyOverlayIsAccepted) {
  const Scribbles s = scribbles_from_overlay(blank_rgba(4, 4));
  EXPECT_TRUE(s.fg_pixels.empty());
  EXPECT_TRUE(s.bg_pixels.empty());
}

TEST(LoadScribbles, TwoMaskFilesFromDisk) {
  Mask fg(6, 6);
  Mask bg(6, 6);
  fg.set(1, 1, true);
  bg.set(4, 4, true);
  bg.set(4, 5, true);
  const auto fp = temp_path("fg_s.png");
  const auto bp = temp_path("bg_s.png");
  save_mask(fg, fp);
  save_mask(bg, bp);
  const Scribbles s = load_scribbles(fp, bp);
  EXPECT_EQ(s.fg_pixels, (std::set<Pixel>{{1, 1}}));
  EXPECT_EQ(s.bg_pixels, (std::set<Pixel>{{4, 4}, {4, 5}}));
  std::filesystem::remove(fp);
  std::filesystem::remove(bp);
}

TEST(CheckBounds, RejectsOutOfImageAndInvertedBox) {
  Scribbles s;
  s.fg_pixels.insert({5, 0});
  EXPECT_THROW(check_bounds(s, 5, 5), Error);
  Scribbles b;
  b.bbox = BoundingBox{3, 3, 1, 4};
  EXPECT_THROW(check_bounds(b, 5, 5), Error);
}

TEST(RenderOverlay, AlphaZeroIsIdentity) {
  const Image img = load_image(fixture("known4x4.png"));
  EXPECT_EQ(render_overlay(img, Mask(4, 4, false), 0.0), img);
}

TEST(RenderOverlay, AlphaOneBackgroundIsWhite) {
  const Image img = load_image(fixture("known4x4.png"));
  const Image out = render_overlay(img, Mask(4, 4, false), 1.0);
  EXPECT_EQ(out.data, std::vector<std::uint8_t>(48, 255));
}

TEST(RenderOverlay, HalfBlendRoundsHalfUp) {
  const Image img = testing::constant_image(1, 1, {100, 100, 100});
  const Image out = render_overlay(img, Mask(1, 1, false), 0.5);
  EXPECT_EQ(out.data, (std::vector<std::uint8_t>{178, 178, 178}));
}

TEST(RenderOverlay, ForegroundUnchangedForAnyAlpha) {
  std::mt19937_64 rng(3);
  const Image img = load_image(fixture("known4x4.png"));
  for (int t = 0; t < 20; ++t) {
    Mask m(4, 4);
    for (auto& b : m.bits) b = rng() & 1;
    const double alpha = static_cast<double>(rng() % 1001) / 1000.0;
    const Image out = render_overlay(img, m, alpha);
    for (int r = 0; r < 4; ++r) {
      for (int c = 0; c < 4; ++c) {
        if (m.get(r, c)) {
          EXPECT_TRUE(std::equal(img.at(r, c), img.at(r, c) + 3, out.at(r, c)));
        }
      }
    }
  }
}

TEST(RenderOverlay, DimensionMismatch) {
  try {
    render_overlay(Image(2, 2), Mask(3, 2), 0.5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DimensionMismatch);
  }
}

}  // namespace
}  // namespace pssi
