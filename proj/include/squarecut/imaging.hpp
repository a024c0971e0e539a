#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "squarecut/geometry.hpp"

namespace squarecut {

/// Physical voxel size in millimetres.
struct Spacing {
  double sx = 1.0;
  double sy = 1.0;
  double thickness = 1.0;

  double voxel_volume() const { return sx * sy * thickness; }
  friend bool operator==(const Spacing&, const Spacing&) = default;
};

class GrayImage {
 public:
  GrayImage() = default;
  GrayImage(int width, int height, std::uint16_t fill = 0, Spacing spacing = {});
  GrayImage(int width, int height, std::vector<std::uint16_t> pixels, Spacing spacing = {});

  int width() const { return width_; }
  int height() const { return height_; }
  const Spacing& spacing() const { return spacing_; }
  void set_spacing(Spacing spacing);

  /// 8 or 16. Records the source sample depth; save_pgm writes maxval 255 for
  /// 8-bit images whose values all fit.
  int bit_depth() const { return bit_depth_; }
  void set_bit_depth(int bits);

  std::uint16_t at(int x, int y) const { return pixels_[index(x, y)]; }
  std::uint16_t& at(int x, int y) { return pixels_[index(x, y)]; }
  std::span<const std::uint16_t> pixels() const { return pixels_; }

  bool contains(int x, int y) const { return x >= 0 && y >= 0 && x < width_ && y < height_; }

  friend bool operator==(const GrayImage&, const GrayImage&) = default;

 private:
  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x);
  }

  int width_ = 0;
  int height_ = 0;
  int bit_depth_ = 8;
  Spacing spacing_;
  std::vector<std::uint16_t> pixels_;
};

class BinaryMask {
 public:
  BinaryMask() = default;
  BinaryMask(int width, int height, Spacing spacing = {});

  int width() const { return width_; }
  int height() const { return height_; }
  const Spacing& spacing() const { return spacing_; }
  void set_spacing(Spacing spacing) { spacing_ = spacing; }

  bool at(int x, int y) const { return bits_[index(x, y)] != 0; }
  void set(int x, int y, bool on) { bits_[index(x, y)] = on ? 1 : 0; }
  bool contains(int x, int y) const { return x >= 0 && y >= 0 && x < width_ && y < height_; }

  std::size_t count() const;

  /// Mean (x, y) of the set pixels; the mask must be non-empty.
  Point2 centroid() const;

  std::span<const std::uint8_t> bits() const { return bits_; }

  friend bool operator==(const BinaryMask&, const BinaryMask&) = default;

 private:
  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x);
  }

  int width_ = 0;
  int height_ = 0;
  Spacing spacing_;
  std::vector<std::uint8_t> bits_;
};

// Binary PGM (P5) with an optional "# spacing <sx> <sy> <thickness>" comment.
GrayImage decode_pgm(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> encode_pgm(const GrayImage& img);
std::vector<std::uint8_t> encode_pgm(const BinaryMask& mask);

GrayImage load_pgm(const std::string& path);
void save_pgm(const std::string& path, const GrayImage& img);
void save_pgm(const std::string& path, const BinaryMask& mask);

/// Any nonzero pixel becomes set.
BinaryMask mask_from_image(const GrayImage& img);
BinaryMask load_mask(const std::string& path);

/// Grayscale PNG (8 or 16 bit) via libpng.
GrayImage decode_png_gray(std::span<const std::uint8_t> bytes);

/// Sniffs the PGM or PNG signature and decodes accordingly.
GrayImage decode_image(std::span<const std::uint8_t> bytes);

std::vector<std::uint8_t> read_file(const std::string& path);
void write_file(const std::string& path, std::span<const std::uint8_t> bytes);

enum class Sampling { nearest, bilinear };

/// Pixel (i, j) is centred at continuous coordinates (i, j). Out-of-image
/// positions replicate the border.
double sample_intensity(const GrayImage& img, Point2 p, Sampling mode = Sampling::nearest);

struct PixelRect {
  int x0 = 0;
  int y0 = 0;
  int w = 0;
  int h = 0;
};

struct SynthSpec {
  int canvas_w = 100;
  int canvas_h = 100;
  PixelRect rect;
  std::uint16_t fg = 200;
  std::uint16_t bg = 50;
  std::vector<PixelRect> erased;
  double noise_sigma = 0.0;
  std::uint64_t rng_seed = 0;
  Spacing spacing;
};

struct SynthResult {
  GrayImage image;
  BinaryMask truth;
};

/// Filled rectangle on a flat background. Erased regions are painted with the
/// background value but remain part of the ground truth.
SynthResult synth_rectangle(const SynthSpec& spec);

}  // namespace squarecut
