#include "pssi/image.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cctype>
#include <csetjmp>
#include <cstring>
#include <fstream>
#include <iterator>

namespace pssi {

Image::Image(int w, int h) : width(w), height(h), data(static_cast<std::size_t>(w) * h * 3, 0) {}

Image::Image(int w, int h, std::vector<std::uint8_t> rgb) : width(w), height(h), data(std::move(rgb)) {
  if (w < 1 || h < 1 || data.size() != static_cast<std::size_t>(w) * h * 3) {
    throw Error(ErrorCode::InvalidArgument, "image data does not match dimensions");
  }
}

Mask::Mask(int w, int h, bool value)
    : width(w), height(h), bits(static_cast<std::size_t>(w) * h, value ? 1 : 0) {}

std::size_t Mask::count() const {
  return static_cast<std::size_t>(std::count(bits.begin(), bits.end(), std::uint8_t{1}));
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::FileNotFound, "cannot open " + path.string());
  }
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw Error(ErrorCode::IoError, "cannot write " + path.string());
  }
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) {
    throw Error(ErrorCode::IoError, "write failed for " + path.string());
  }
}

namespace {

// libpng reports errors via longjmp; the setjmp frames below hold no C++
// objects with destructors.
struct PngContext {
  png_structp png = nullptr;
  png_infop info = nullptr;
  char message[256] = {0};
  std::span<const std::uint8_t> input;
  std::size_t offset = 0;
  std::vector<std::uint8_t>* output = nullptr;
};

void png_error_fn(png_structp png, png_const_charp msg) {
  auto* ctx = static_cast<PngContext*>(png_get_error_ptr(png));
  std::strncpy(ctx->message, msg, sizeof(ctx->message) - 1);
  png_longjmp(png, 1);
}

void png_warning_fn(png_structp, png_const_charp) {}

void png_read_fn(png_structp png, png_bytep out, png_size_t length) {
  auto* ctx = static_cast<PngContext*>(png_get_io_ptr(png));
  if (ctx->offset + length > ctx->input.size()) {
    png_error(png, "truncated PNG stream");
  }
  std::memcpy(out, ctx->input.data() + ctx->offset, length);
  ctx->offset += length;
}

void png_write_fn(png_structp png, png_bytep data, png_size_t length) {
  auto* ctx = static_cast<PngContext*>(png_get_io_ptr(png));
  ctx->output->insert(ctx->output->end(), data, data + length);
}

void png_flush_fn(png_structp) {}

bool read_header(PngContext& ctx, png_uint_32& w, png_uint_32& h) {
  if (setjmp(png_jmpbuf(ctx.png))) {
    return false;
  }
  png_set_read_fn(ctx.png, &ctx, png_read_fn);
  png_read_info(ctx.png, ctx.info);
  const int color_type = png_get_color_type(ctx.png, ctx.info);
  const int bit_depth = png_get_bit_depth(ctx.png, ctx.info);
  if (color_type == PNG_COLOR_TYPE_PALETTE) {
    png_set_palette_to_rgb(ctx.png);
  }
  if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8) {
    png_set_expand_gray_1_2_4_to_8(ctx.png);
  }
  if (png_get_valid(ctx.png, ctx.info, PNG_INFO_tRNS)) {
    png_set_tRNS_to_alpha(ctx.png);
  }
  if (bit_depth == 16) {
    png_set_strip_16(ctx.png);
  }
  if (color_type == PNG_COLOR_TYPE_GRAY || color_type == PNG_COLOR_TYPE_GRAY_ALPHA) {
    png_set_gray_to_rgb(ctx.png);
  }
  png_set_filler(ctx.png, 0xff, PNG_FILLER_AFTER);
  png_read_update_info(ctx.png, ctx.info);
  w = png_get_image_width(ctx.png, ctx.info);
  h = png_get_image_height(ctx.png, ctx.info);
  return true;
}

bool read_body(PngContext& ctx, png_bytepp rows) {
  if (setjmp(png_jmpbuf(ctx.png))) {
    return false;
  }
  png_read_image(ctx.png, rows);
  png_read_end(ctx.png, nullptr);
  return true;
}

bool write_png_rows(PngContext& ctx, png_uint_32 w, png_uint_32 h, int color_type, png_bytepp rows) {
  if (setjmp(png_jmpbuf(ctx.png))) {
    return false;
  }
  png_set_write_fn(ctx.png, &ctx, png_write_fn, png_flush_fn);
  png_set_IHDR(ctx.png, ctx.info, w, h, 8, color_type, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(ctx.png, ctx.info);
  png_write_image(ctx.png, rows);
  png_write_end(ctx.png, nullptr);
  return true;
}

RgbaImage decode_png(std::span<const std::uint8_t> bytes) {
  PngContext ctx;
  ctx.input = bytes;
  ctx.png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &ctx, png_error_fn, png_warning_fn);
  if (ctx.png == nullptr) {
    throw Error(ErrorCode::DecodeError, "png_create_read_struct failed");
  }
  ctx.info = png_create_info_struct(ctx.png);
  struct Cleanup {
    PngContext& c;
    ~Cleanup() { png_destroy_read_struct(&c.png, c.info ? &c.info : nullptr, nullptr); }
  } cleanup{ctx};

  png_uint_32 w = 0;
  png_uint_32 h = 0;
  if (ctx.info == nullptr || !read_header(ctx, w, h)) {
    throw Error(ErrorCode::DecodeError, std::string("PNG decode failed: ") + ctx.message);
  }
  if (w == 0 || h == 0 || png_get_rowbytes(ctx.png, ctx.info) != std::size_t{w} * 4) {
    throw Error(ErrorCode::DecodeError, "unsupported PNG layout");
  }
  RgbaImage out;
  out.width = static_cast<int>(w);
  out.height = static_cast<int>(h);
  out.data.resize(std::size_t{w} * h * 4);
  std::vector<png_bytep> rows(h);
  for (png_uint_32 r = 0; r < h; ++r) {
    rows[r] = out.data.data() + std::size_t{r} * w * 4;
  }
  if (!read_body(ctx, rows.data())) {
    throw Error(ErrorCode::DecodeError, std::string("PNG decode failed: ") + ctx.message);
  }
  return out;
}

std::vector<std::uint8_t> encode(int width, int height, int channels, const std::uint8_t* data) {
  std::vector<std::uint8_t> out;
  PngContext ctx;
  ctx.output = &out;
  ctx.png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &ctx, png_error_fn, png_warning_fn);
  if (ctx.png == nullptr) {
    throw Error(ErrorCode::IoError, "png_create_write_struct failed");
  }
  ctx.info = png_create_info_struct(ctx.png);
  struct Cleanup {
    PngContext& c;
    ~Cleanup() { png_destroy_write_struct(&c.png, c.info ? &c.info : nullptr); }
  } cleanup{ctx};

  std::vector<png_bytep> rows(static_cast<std::size_t>(height));
  for (int r = 0; r < height; ++r) {
    rows[r] = const_cast<png_bytep>(data + static_cast<std::size_t>(r) * width * channels);
  }
  const int color_type = channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB;
  if (ctx.info == nullptr ||
      !write_png_rows(ctx, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height), color_type,
                      rows.data())) {
    throw Error(ErrorCode::IoError, std::string("PNG encode failed: ") + ctx.message);
  }
  return out;
}

// Binary PPM (P6), maxval <= 255. Header comments are skipped.
RgbaImage decode_ppm(std::span<const std::uint8_t> bytes) {
  std::size_t pos = 2;
  auto skip_space = [&] {
    while (pos < bytes.size()) {
      if (bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else if (std::isspace(bytes[pos])) {
        ++pos;
      } else {
        break;
      }
    }
  };
  auto read_int = [&]() -> long {
    skip_space();
    long v = 0;
    int digits = 0;
    while (pos < bytes.size() && std::isdigit(bytes[pos])) {
      v = v * 10 + (bytes[pos] - '0');
      ++pos;
      if (++digits > 9) throw Error(ErrorCode::DecodeError, "PPM header value too large");
    }
    if (digits == 0) throw Error(ErrorCode::DecodeError, "malformed PPM header");
    return v;
  };
  const long w = read_int();
  const long h = read_int();
  const long maxval = read_int();
  if (w < 1 || h < 1 || maxval < 1 || maxval > 255) {
    throw Error(ErrorCode::DecodeError, "unsupported PPM dimensions or maxval");
  }
  if (pos >= bytes.size() || !std::isspace(bytes[pos])) {
    throw Error(ErrorCode::DecodeError, "malformed PPM header");
  }
  ++pos;
  const std::size_t n = static_cast<std::size_t>(w) * h;
  if (bytes.size() - pos < n * 3) {
    throw Error(ErrorCode::DecodeError, "truncated PPM data");
  }
  RgbaImage out;
  out.width = static_cast<int>(w);
  out.height = static_cast<int>(h);
  out.data.resize(n * 4);
  for (std::size_t i = 0; i < n; ++i) {
    out.data[4 * i + 0] = bytes[pos + 3 * i + 0];
    out.data[4 * i + 1] = bytes[pos + 3 * i + 1];
    out.data[4 * i + 2] = bytes[pos + 3 * i + 2];
    out.data[4 * i + 3] = 255;
  }
  return out;
}

Image drop_alpha(const RgbaImage& rgba) {
  const std::size_t n = static_cast<std::size_t>(rgba.width) * rgba.height;
  std::vector<std::uint8_t> rgb(n * 3);
  for (std::size_t i = 0; i < n; ++i) {
    std::copy_n(rgba.data.data() + 4 * i, 3, rgb.data() + 3 * i);
  }
  return Image(rgba.width, rgba.height, std::move(rgb));
}

template <typename F>
auto with_path(const std::filesystem::path& path, F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::DecodeError) {
      throw Error(ErrorCode::DecodeError, path.string() + ": " + e.what());
    }
    throw;
  }
}

}  // namespace

RgbaImage decode_rgba(std::span<const std::uint8_t> bytes) {
  static constexpr std::uint8_t kSignature[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
  if (bytes.size() >= 8 && std::equal(kSignature, kSignature + 8, bytes.begin())) {
    return decode_png(bytes);
  }
  if (bytes.size() >= 3 && bytes[0] == 'P' && bytes[1] == '6') {
    return decode_ppm(bytes);
  }
  throw Error(ErrorCode::DecodeError, "not a PNG or binary PPM");
}

RgbaImage load_rgba(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  return with_path(path, [&] { return decode_rgba(bytes); });
}

Image decode_image(std::span<const std::uint8_t> bytes) { return drop_alpha(decode_rgba(bytes)); }

Image load_image(const std::filesystem::path& path) { return drop_alpha(load_rgba(path)); }

Mask decode_mask(std::span<const std::uint8_t> bytes) {
  const RgbaImage rgba = decode_rgba(bytes);
  Mask mask(rgba.width, rgba.height);
  for (std::size_t i = 0; i < mask.bits.size(); ++i) {
    const auto* px = rgba.data.data() + 4 * i;
    mask.bits[i] = std::max({px[0], px[1], px[2]}) >= 128 ? 1 : 0;
  }
  return mask;
}

Mask load_mask(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  return with_path(path, [&] { return decode_mask(bytes); });
}

std::vector<std::uint8_t> encode_png(const Image& image) {
  return encode(image.width, image.height, 3, image.data.data());
}

std::vector<std::uint8_t> encode_gray_png(int width, int height, std::span<const std::uint8_t> gray) {
  if (gray.size() != static_cast<std::size_t>(width) * height) {
    throw Error(ErrorCode::DimensionMismatch, "gray buffer does not match dimensions");
  }
  return encode(width, height, 1, gray.data());
}

std::vector<std::uint8_t> encode_png(const Mask& mask) {
  std::vector<std::uint8_t> gray(mask.bits.size());
  std::transform(mask.bits.begin(), mask.bits.end(), gray.begin(),
                 [](std::uint8_t b) { return b ? std::uint8_t{255} : std::uint8_t{0}; });
  return encode_gray_png(mask.width, mask.height, gray);
}

void save_image(const Image& image, const std::filesystem::path& path) { write_file(path, encode_png(image)); }

void save_mask(const Mask& mask, const std::filesystem::path& path) { write_file(path, encode_png(mask)); }

void save_ppm(const Image& image, const std::filesystem::path& path) {
  const std::string header = "P6\n" + std::to_string(image.width) + " " + std::to_string(image.height) + "\n255\n";
  std::vector<std::uint8_t> bytes(header.begin(), header.end());
  bytes.insert(bytes.end(), image.data.begin(), image.data.end());
  write_file(path, bytes);
}

Scribbles scribbles_from_overlay(const RgbaImage& overlay) {
  Scribbles s;
  for (int r = 0; r < overlay.height; ++r) {
    for (int c = 0; c < overlay.width; ++c) {
      const auto* px = overlay.data.data() + 4 * (static_cast<std::size_t>(r) * overlay.width + c);
      if (px[3] != 255) continue;
      if (px[0] == 255 && px[1] == 0 && px[2] == 0) {
        s.fg_pixels.insert({r, c});
      } else if (px[0] == 0 && px[1] == 0 && px[2] == 255) {
        s.bg_pixels.insert({r, c});
      }
    }
  }
  return s;
}

Scribbles scribbles_from_masks(const Mask& fg, const Mask& bg) {
  if (fg.width != bg.width || fg.height != bg.height) {
    throw Error(ErrorCode::DimensionMismatch, "foreground and background scribble masks differ in size");
  }
  Scribbles s;
  for (int r = 0; r < fg.height; ++r) {
    for (int c = 0; c < fg.width; ++c) {
      const bool f = fg.get(r, c);
      const bool b = bg.get(r, c);
      if (f && b) {
        throw ConflictError({r, c}, "pixel (" + std::to_string(r) + ", " + std::to_string(c) +
                                        ") is scribbled as both foreground and background");
      }
      if (f) s.fg_pixels.insert({r, c});
      if (b) s.bg_pixels.insert({r, c});
    }
  }
  return s;
}

Scribbles load_scribbles(const std::filesystem::path& overlay_png) {
  return scribbles_from_overlay(load_rgba(overlay_png));
}

Scribbles load_scribbles(const std::filesystem::path& fg_png, const std::filesystem::path& bg_png) {
  return scribbles_from_masks(load_mask(fg_png), load_mask(bg_png));
}

void check_bounds(const Scribbles& scribbles, int width, int height) {
  auto in_bounds = [&](const Pixel& p) { return p.row >= 0 && p.row < height && p.col >= 0 && p.col < width; };
  for (const auto* set : {&scribbles.fg_pixels, &scribbles.bg_pixels}) {
    for (const Pixel& p : *set) {
      if (!in_bounds(p)) {
        throw Error(ErrorCode::OutOfBounds, "scribble pixel (" + std::to_string(p.row) + ", " +
                                                std::to_string(p.col) + ") outside image");
      }
    }
  }
  if (scribbles.bbox) {
    const BoundingBox& b = *scribbles.bbox;
    if (b.row0 > b.row1 || b.col0 > b.col1) {
      throw Error(ErrorCode::OutOfBounds, "bounding box is inverted");
    }
    if (b.row0 < 0 || b.col0 < 0 || b.row1 >= height || b.col1 >= width) {
      throw Error(ErrorCode::OutOfBounds, "bounding box outside image");
    }
  }
}

Image render_overlay(const Image& image, const Mask& mask, double alpha) {
  if (image.width != mask.width || image.height != mask.height) {
    throw Error(ErrorCode::DimensionMismatch, "overlay mask does not match image dimensions");
  }
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "overlay alpha must lie in [0, 1]");
  }
  Image out = image;
  std::uint8_t lut[256];
  for (int v = 0; v < 256; ++v) {
    lut[v] = static_cast<std::uint8_t>(std::floor(alpha * 255.0 + (1.0 - alpha) * v + 0.5));
  }
  for (std::size_t i = 0; i < mask.bits.size(); ++i) {
    if (mask.bits[i]) continue;
    for (int ch = 0; ch < 3; ++ch) {
      out.data[3 * i + ch] = lut[out.data[3 * i + ch]];
    }
  }
  return out;
}

}  // namespace pssi
