#include "squarecut/imaging.hpp"

#include <png.h>

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <random>
#include <sstream>

#include "squarecut/error.hpp"

namespace squarecut {

namespace {

void check_dims(int width, int height) {
  if (width <= 0 || height <= 0) {
    throw Error(Errc::invalid_argument,
                "image dimensions must be positive, got " + std::to_string(width) + "x" + std::to_string(height));
  }
}

void check_spacing(const Spacing& s) {
  if (!(s.sx > 0.0) || !(s.sy > 0.0) || !(s.thickness > 0.0)) {
    throw Error(Errc::invalid_argument, "spacing components must be positive");
  }
}

int clamp_index(double v, int size) {
  if (!(v > 0.0)) return 0;  // also catches NaN
  if (v >= size - 1) return size - 1;
  return static_cast<int>(v);
}

// Header tokenizer for PNM: skips whitespace and '#' comments, remembering the
// spacing comment when one is seen.
class PnmHeader {
 public:
  explicit PnmHeader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::string token() {
    skip_space_and_comments();
    std::string out;
    while (pos_ < bytes_.size() && !std::isspace(bytes_[pos_]) && bytes_[pos_] != '#') {
      out.push_back(static_cast<char>(bytes_[pos_++]));
    }
    if (out.empty()) throw Error(Errc::format_error, "truncated PGM header");
    return out;
  }

  long number() {
    const std::string t = token();
    if (!std::all_of(t.begin(), t.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }) ||
        t.size() > 9) {
      throw Error(Errc::format_error, "bad number in PGM header: " + t);
    }
    return std::stol(t);
  }

  // Exactly one whitespace byte separates maxval from the payload.
  std::size_t payload_offset() {
    if (pos_ >= bytes_.size() || !std::isspace(bytes_[pos_])) {
      throw Error(Errc::format_error, "missing whitespace before PGM payload");
    }
    return pos_ + 1;
  }

  const std::optional<Spacing>& spacing() const { return spacing_; }

 private:
  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      if (std::isspace(bytes_[pos_])) {
        ++pos_;
      } else if (bytes_[pos_] == '#') {
        std::size_t end = pos_;
        while (end < bytes_.size() && bytes_[end] != '\n' && bytes_[end] != '\r') ++end;
        parse_comment(std::string(bytes_.begin() + pos_ + 1, bytes_.begin() + end));
        pos_ = end;
      } else {
        break;
      }
    }
  }

  void parse_comment(const std::string& text) {
    std::istringstream in(text);
    std::string key;
    Spacing s;
    if (in >> key && key == "spacing" && in >> s.sx >> s.sy >> s.thickness) {
      if (s.sx > 0.0 && s.sy > 0.0 && s.thickness > 0.0) spacing_ = s;
    }
  }

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
  std::optional<Spacing> spacing_;
};

std::string format_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::uint8_t> encode_pgm_raw(int width, int height, const Spacing& spacing, bool wide,
                                         const auto& value_at) {
  std::string header = "P5\n# spacing " + format_real(spacing.sx) + " " + format_real(spacing.sy) + " " +
                       format_real(spacing.thickness) + "\n" + std::to_string(width) + " " +
                       std::to_string(height) + "\n" + (wide ? "65535" : "255") + "\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.reserve(out.size() + static_cast<std::size_t>(width) * height * (wide ? 2 : 1));
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const std::uint16_t v = value_at(x, y);
      if (wide) out.push_back(static_cast<std::uint8_t>(v >> 8));
      out.push_back(static_cast<std::uint8_t>(v & 0xff));
    }
  }
  return out;
}

bool fits_in(const PixelRect& r, int w, int h) {
  return r.w > 0 && r.h > 0 && r.x0 >= 0 && r.y0 >= 0 && r.x0 + r.w <= w && r.y0 + r.h <= h;
}

struct PngReadState {
  std::span<const std::uint8_t> bytes;
  std::size_t pos = 0;
};

void png_read_from_span(png_structp png, png_bytep out, png_size_t length) {
  auto* state = static_cast<PngReadState*>(png_get_io_ptr(png));
  if (state->pos + length > state->bytes.size()) png_error(png, "truncated PNG payload");
  std::memcpy(out, state->bytes.data() + state->pos, length);
  state->pos += length;
}

void png_warning_sink(png_structp, png_const_charp) {}

struct PngPixels {
  png_uint_32 width = 0;
  png_uint_32 height = 0;
  int bit_depth = 0;
  std::vector<png_byte> data;
  std::vector<png_bytep> rows;
};

enum class PngStatus { ok, not_gray, malformed };

// Everything between setjmp and a libpng error must be trivially destructible,
// so the decoded buffers live in the caller's frame.
PngStatus read_png(PngReadState& state, PngPixels& out) {
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, png_warning_sink);
  if (png == nullptr) return PngStatus::malformed;
  png_infop info = png_create_info_struct(png);
  if (info == nullptr) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    return PngStatus::malformed;
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    return PngStatus::malformed;
  }
  png_set_read_fn(png, &state, png_read_from_span);
  png_read_info(png, info);
  int color_type = 0;
  png_get_IHDR(png, info, &out.width, &out.height, &out.bit_depth, &color_type, nullptr, nullptr, nullptr);
  if (color_type != PNG_COLOR_TYPE_GRAY && color_type != PNG_COLOR_TYPE_GRAY_ALPHA) {
    png_destroy_read_struct(&png, &info, nullptr);
    return PngStatus::not_gray;
  }
  if (out.width > (1u << 20) || out.height > (1u << 20)) {
    png_destroy_read_struct(&png, &info, nullptr);
    return PngStatus::malformed;
  }
  if (out.bit_depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (color_type == PNG_COLOR_TYPE_GRAY_ALPHA) png_set_strip_alpha(png);
  png_read_update_info(png, info);
  out.bit_depth = png_get_bit_depth(png, info);
  const std::size_t stride = png_get_rowbytes(png, info);
  out.data.resize(stride * out.height);
  out.rows.resize(out.height);
  for (png_uint_32 y = 0; y < out.height; ++y) out.rows[y] = out.data.data() + stride * y;
  png_read_image(png, out.rows.data());
  png_destroy_read_struct(&png, &info, nullptr);
  return PngStatus::ok;
}

}  // namespace

GrayImage::GrayImage(int width, int height, std::uint16_t fill, Spacing spacing)
    : width_(width), height_(height), spacing_(spacing) {
  check_dims(width, height);
  check_spacing(spacing);
  pixels_.assign(static_cast<std::size_t>(width) * height, fill);
}

GrayImage::GrayImage(int width, int height, std::vector<std::uint16_t> pixels, Spacing spacing)
    : width_(width), height_(height), spacing_(spacing), pixels_(std::move(pixels)) {
  check_dims(width, height);
  check_spacing(spacing);
  if (pixels_.size() != static_cast<std::size_t>(width) * height) {
    throw Error(Errc::invalid_argument, "pixel buffer does not match image dimensions");
  }
}

void GrayImage::set_spacing(Spacing spacing) {
  check_spacing(spacing);
  spacing_ = spacing;
}

void GrayImage::set_bit_depth(int bits) {
  if (bits != 8 && bits != 16) throw Error(Errc::invalid_argument, "bit depth must be 8 or 16");
  bit_depth_ = bits;
}

BinaryMask::BinaryMask(int width, int height, Spacing spacing) : width_(width), height_(height), spacing_(spacing) {
  check_dims(width, height);
  check_spacing(spacing);
  bits_.assign(static_cast<std::size_t>(width) * height, 0);
}

std::size_t BinaryMask::count() const { return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), 1)); }

Point2 BinaryMask::centroid() const {
  double sx = 0.0;
  double sy = 0.0;
  std::size_t n = 0;
  for (int y = 0; y < height_; ++y) {
    for (int x = 0; x < width_; ++x) {
      if (at(x, y)) {
        sx += x;
        sy += y;
        ++n;
      }
    }
  }
  if (n == 0) throw Error(Errc::empty_input, "centroid of an empty mask");
  return {sx / static_cast<double>(n), sy / static_cast<double>(n)};
}

GrayImage decode_pgm(std::span<const std::uint8_t> bytes) {
  PnmHeader header(bytes);
  if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '5') {
    throw Error(Errc::format_error, "not a binary PGM (magic P5 expected)");
  }
  header.token();
  const long width = header.number();
  const long height = header.number();
  const long maxval = header.number();
  if (width <= 0 || height <= 0) throw Error(Errc::format_error, "PGM dimensions must be positive");
  if (maxval != 255 && maxval != 65535) {
    throw Error(Errc::format_error, "unsupported PGM maxval " + std::to_string(maxval) + " (255 or 65535)");
  }
  const std::size_t offset = header.payload_offset();
  const std::size_t sample_bytes = maxval == 65535 ? 2 : 1;
  const std::size_t count = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  if (bytes.size() - offset < count * sample_bytes) throw Error(Errc::format_error, "truncated PGM payload");

  std::vector<std::uint16_t> pixels(count);
  const std::uint8_t* p = bytes.data() + offset;
  for (std::size_t i = 0; i < count; ++i) {
    pixels[i] = sample_bytes == 2 ? static_cast<std::uint16_t>((p[2 * i] << 8) | p[2 * i + 1]) : p[i];
  }
  GrayImage img(static_cast<int>(width), static_cast<int>(height), std::move(pixels),
                header.spacing().value_or(Spacing{}));
  img.set_bit_depth(sample_bytes == 2 ? 16 : 8);
  return img;
}

std::vector<std::uint8_t> encode_pgm(const GrayImage& img) {
  const auto px = img.pixels();
  const bool wide = img.bit_depth() == 16 || std::any_of(px.begin(), px.end(), [](auto v) { return v > 255; });
  return encode_pgm_raw(img.width(), img.height(), img.spacing(), wide,
                        [&](int x, int y) { return img.at(x, y); });
}

std::vector<std::uint8_t> encode_pgm(const BinaryMask& mask) {
  return encode_pgm_raw(mask.width(), mask.height(), mask.spacing(), false,
                        [&](int x, int y) { return static_cast<std::uint16_t>(mask.at(x, y) ? 255 : 0); });
}

std::vector<std::uint8_t> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io_error, "cannot open " + path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw Error(Errc::io_error, "read failed: " + path);
  return bytes;
}

void write_file(const std::string& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::io_error, "cannot create " + path);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(Errc::io_error, "write failed: " + path);
}

GrayImage load_pgm(const std::string& path) { return decode_pgm(read_file(path)); }

void save_pgm(const std::string& path, const GrayImage& img) { write_file(path, encode_pgm(img)); }

void save_pgm(const std::string& path, const BinaryMask& mask) { write_file(path, encode_pgm(mask)); }

BinaryMask mask_from_image(const GrayImage& img) {
  BinaryMask mask(img.width(), img.height(), img.spacing());
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) mask.set(x, y, img.at(x, y) != 0);
  }
  return mask;
}

BinaryMask load_mask(const std::string& path) { return mask_from_image(load_pgm(path)); }

GrayImage decode_png_gray(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 8 || png_sig_cmp(bytes.data(), 0, 8) != 0) {
    throw Error(Errc::format_error, "not a PNG stream");
  }
  PngReadState state{bytes, 0};
  PngPixels decoded;
  switch (read_png(state, decoded)) {
    case PngStatus::ok:
      break;
    case PngStatus::not_gray:
      throw Error(Errc::format_error, "only grayscale PNG images are supported");
    case PngStatus::malformed:
      throw Error(Errc::format_error, "malformed PNG stream");
  }
  if (decoded.width == 0 || decoded.height == 0 || decoded.width > (1u << 20) || decoded.height > (1u << 20)) {
    throw Error(Errc::format_error, "PNG dimensions out of range");
  }

  const std::size_t count = static_cast<std::size_t>(decoded.width) * decoded.height;
  const auto& data = decoded.data;
  std::vector<std::uint16_t> pixels(count);
  for (std::size_t i = 0; i < count; ++i) {
    pixels[i] = decoded.bit_depth == 16 ? static_cast<std::uint16_t>((data[2 * i] << 8) | data[2 * i + 1]) : data[i];
  }
  GrayImage img(static_cast<int>(decoded.width), static_cast<int>(decoded.height), std::move(pixels));
  img.set_bit_depth(decoded.bit_depth == 16 ? 16 : 8);
  return img;
}

GrayImage decode_image(std::span<const std::uint8_t> bytes) {
  if (bytes.size() >= 8 && png_sig_cmp(bytes.data(), 0, 8) == 0) return decode_png_gray(bytes);
  return decode_pgm(bytes);
}

double sample_intensity(const GrayImage& img, Point2 p, Sampling mode) {
  if (mode == Sampling::nearest) {
    const int ix = clamp_index(std::floor(p.x + 0.5), img.width());
    const int iy = clamp_index(std::floor(p.y + 0.5), img.height());
    return img.at(ix, iy);
  }
  const double fx = std::floor(p.x);
  const double fy = std::floor(p.y);
  const double ax = p.x - fx;
  const double ay = p.y - fy;
  const int x0 = clamp_index(fx, img.width());
  const int x1 = clamp_index(fx + 1.0, img.width());
  const int y0 = clamp_index(fy, img.height());
  const int y1 = clamp_index(fy + 1.0, img.height());
  const double top = (1.0 - ax) * img.at(x0, y0) + ax * img.at(x1, y0);
  const double bottom = (1.0 - ax) * img.at(x0, y1) + ax * img.at(x1, y1);
  return (1.0 - ay) * top + ay * bottom;
}

SynthResult synth_rectangle(const SynthSpec& spec) {
  check_dims(spec.canvas_w, spec.canvas_h);
  if (!fits_in(spec.rect, spec.canvas_w, spec.canvas_h)) {
    throw Error(Errc::invalid_geometry, "rectangle does not fit inside the canvas");
  }
  if (spec.fg == spec.bg) throw Error(Errc::invalid_argument, "foreground and background must differ");
  if (!(spec.noise_sigma >= 0.0)) throw Error(Errc::invalid_argument, "noise sigma must be non-negative");

  SynthResult out{GrayImage(spec.canvas_w, spec.canvas_h, spec.bg, spec.spacing),
                  BinaryMask(spec.canvas_w, spec.canvas_h, spec.spacing)};
  const PixelRect& r = spec.rect;
  for (int y = r.y0; y < r.y0 + r.h; ++y) {
    for (int x = r.x0; x < r.x0 + r.w; ++x) {
      out.image.at(x, y) = spec.fg;
      out.truth.set(x, y, true);
    }
  }
  for (const PixelRect& e : spec.erased) {
    // Erasures may hang off the rectangle but are clipped to the canvas.
    for (int y = std::max(e.y0, 0); y < std::min(e.y0 + e.h, spec.canvas_h); ++y) {
      for (int x = std::max(e.x0, 0); x < std::min(e.x0 + e.w, spec.canvas_w); ++x) out.image.at(x, y) = spec.bg;
    }
  }
  if (spec.noise_sigma > 0.0) {
    std::mt19937_64 rng(spec.rng_seed);
    std::normal_distribution<double> noise(0.0, spec.noise_sigma);
    for (int y = 0; y < spec.canvas_h; ++y) {
      for (int x = 0; x < spec.canvas_w; ++x) {
        const double v = std::round(out.image.at(x, y) + noise(rng));
        out.image.at(x, y) = static_cast<std::uint16_t>(std::clamp(v, 0.0, 65535.0));
      }
    }
  }
  const auto px = out.image.pixels();
  if (std::any_of(px.begin(), px.end(), [](auto v) { return v > 255; })) out.image.set_bit_depth(16);
  return out;
}

}  // namespace squarecut
