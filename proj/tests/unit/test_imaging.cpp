#include <doctest.h>

#include <filesystem>
#include <string>

#include "squarecut/imaging.hpp"
#include "support/errors.hpp"
#include "support/oracles.hpp"

using namespace squarecut;

namespace {

std::vector<std::uint8_t> bytes_of(const std::string& s) { return {s.begin(), s.end()}; }

std::string text_of(const std::vector<std::uint8_t>& b) { return {b.begin(), b.end()}; }

}  // namespace

TEST_CASE("decode a 2x2 8-bit PGM") {
  auto data = bytes_of("P5\n2 2\n255\n");
  for (int v : {0, 128, 255, 7}) data.push_back(static_cast<std::uint8_t>(v));
  const GrayImage img = decode_pgm(data);
  CHECK(img.width() == 2);
  CHECK(img.height() == 2);
  CHECK(img.at(0, 0) == 0);
  CHECK(img.at(1, 0) == 128);
  CHECK(img.at(0, 1) == 255);
  CHECK(img.at(1, 1) == 7);
  CHECK(img.bit_depth() == 8);
  CHECK(img.spacing() == Spacing{});
}

TEST_CASE("PGM header comments and spacing") {
  auto data = bytes_of("P5\n# made by hand\n# spacing 0.5 0.75 3\n3 1\n255\n");
  data.insert(data.end(), {1, 2, 3});
  const GrayImage img = decode_pgm(data);
  CHECK(img.spacing() == Spacing{0.5, 0.75, 3.0});
  CHECK(img.at(2, 0) == 3);

  const std::string header = text_of(encode_pgm(img));
  CHECK(header.rfind("P5\n# spacing 0.5 0.75 3\n3 1\n255\n", 0) == 0);
}

TEST_CASE("PGM round trips") {
  SUBCASE("8-bit") {
    GrayImage img(5, 3, std::vector<std::uint16_t>{0, 1, 2, 3, 4, 250, 251, 252, 253, 254, 255, 9, 8, 7, 6},
                  Spacing{0.1, 0.2, 2.5});
    const GrayImage back = decode_pgm(encode_pgm(img));
    CHECK(back == img);
  }
  SUBCASE("16-bit, big-endian payload") {
    GrayImage img(2, 1, std::vector<std::uint16_t>{1024, 65535});
    const auto bytes = encode_pgm(img);
    const std::string text = text_of(bytes);
    CHECK(text.find("65535\n") != std::string::npos);
    CHECK(bytes[bytes.size() - 4] == 0x04);
    CHECK(bytes[bytes.size() - 3] == 0x00);
    const GrayImage back = decode_pgm(bytes);
    CHECK(back.at(0, 0) == 1024);
    CHECK(back.at(1, 0) == 65535);
    CHECK(back.bit_depth() == 16);
  }
  SUBCASE("masks are stored as 0/255") {
    BinaryMask m(3, 2, Spacing{2, 2, 1});
    m.set(0, 0, true);
    m.set(2, 1, true);
    const auto bytes = encode_pgm(m);
    CHECK(bytes.back() == 255);
    const GrayImage as_image = decode_pgm(bytes);
    CHECK(as_image.at(1, 0) == 0);
    CHECK(mask_from_image(as_image) == m);
  }
  SUBCASE("files") {
    const auto dir = std::filesystem::temp_directory_path() / "squarecut_test_imaging";
    std::filesystem::create_directories(dir);
    GrayImage img(4, 4, 77, Spacing{1.5, 1.5, 4});
    img.at(3, 2) = 9;
    save_pgm((dir / "img.pgm").string(), img);
    CHECK(load_pgm((dir / "img.pgm").string()) == img);
    std::filesystem::remove_all(dir);
  }
}

TEST_CASE("PGM format errors") {
  auto p6 = bytes_of("P6\n1 1\n255\n");
  p6.insert(p6.end(), {1, 2, 3});
  CHECK(code_of([&] { decode_pgm(p6); }) == Errc::format_error);

  auto truncated = bytes_of("P5\n4 4\n255\n");
  truncated.insert(truncated.end(), 10, 0);
  CHECK(code_of([&] { decode_pgm(truncated); }) == Errc::format_error);

  auto odd_maxval = bytes_of("P5\n1 1\n1000\n");
  odd_maxval.insert(odd_maxval.end(), {0, 0});
  CHECK(code_of([&] { decode_pgm(odd_maxval); }) == Errc::format_error);

  CHECK(code_of([] { decode_pgm(std::vector<std::uint8_t>{}); }) == Errc::format_error);
  CHECK(code_of([] { load_pgm("/nonexistent/squarecut.pgm"); }) == Errc::io_error);
}

TEST_CASE("PNG input") {
  const std::vector<std::uint16_t> px8{0, 128, 255, 7};
  const GrayImage a = decode_image(oracle::encode_png_gray(2, 2, px8, 8));
  CHECK(a.width() == 2);
  CHECK(a.at(1, 0) == 128);
  CHECK(a.at(1, 1) == 7);
  CHECK(a.bit_depth() == 8);

  const std::vector<std::uint16_t> px16{0, 1024, 513, 65535, 40000, 3};
  const GrayImage b = decode_png_gray(oracle::encode_png_gray(3, 2, px16, 16));
  CHECK(b.bit_depth() == 16);
  CHECK(std::vector<std::uint16_t>(b.pixels().begin(), b.pixels().end()) == px16);

  auto broken = oracle::encode_png_gray(2, 2, px8, 8);
  broken.resize(broken.size() / 2);
  CHECK(code_of([&] { decode_image(broken); }) == Errc::format_error);
}

TEST_CASE("sample_intensity") {
  GrayImage img(5, 6);
  for (int y = 0; y < 6; ++y) {
    for (int x = 0; x < 5; ++x) img.at(x, y) = static_cast<std::uint16_t>(10 * y + x);
  }
  CHECK(sample_intensity(img, {3, 2}) == 23);
  CHECK(sample_intensity(img, {2.4, 3.6}) == img.at(2, 4));
  CHECK(sample_intensity(img, {2.5, 0.5}) == img.at(3, 1));
  CHECK(sample_intensity(img, {-7, 2}) == img.at(0, 2));
  CHECK(sample_intensity(img, {40, 90}) == img.at(4, 5));

  CHECK(sample_intensity(img, {3, 2}, Sampling::bilinear) == 23);
  CHECK(sample_intensity(img, {1.5, 1.5}, Sampling::bilinear) == doctest::Approx((11 + 12 + 21 + 22) / 4.0));
  CHECK(sample_intensity(img, {1.25, 2}, Sampling::bilinear) == doctest::Approx(21.25));
  CHECK(sample_intensity(img, {-3, -3}, Sampling::bilinear) == img.at(0, 0));
  CHECK(sample_intensity(img, {4.5, 5.5}, Sampling::bilinear) == img.at(4, 5));
}

TEST_CASE("synth_rectangle") {
  SynthSpec spec;
  spec.rect = {30, 40, 40, 20};
  const SynthResult plain = synth_rectangle(spec);
  CHECK(plain.truth.count() == 800);
  CHECK(plain.image.at(30, 40) == 200);
  CHECK(plain.image.at(69, 59) == 200);
  CHECK(plain.image.at(70, 59) == 50);
  CHECK(plain.image.at(29, 40) == 50);

  SUBCASE("erasure changes the image but not the truth") {
    SynthSpec erased = spec;
    erased.erased = {{62, 40, 8, 8}};
    const SynthResult s = synth_rectangle(erased);
    CHECK(s.image.at(65, 43) == 50);
    CHECK(s.truth.at(65, 43));
    CHECK(s.truth.count() == 800);
  }

  SUBCASE("zero noise ignores the rng seed") {
    SynthSpec seeded = spec;
    seeded.rng_seed = 12345;
    CHECK(synth_rectangle(seeded).image == plain.image);
  }

  SUBCASE("noise is reproducible per seed") {
    SynthSpec noisy = spec;
    noisy.noise_sigma = 10;
    noisy.rng_seed = 3;
    const SynthResult a = synth_rectangle(noisy);
    const SynthResult b = synth_rectangle(noisy);
    CHECK(a.image == b.image);
    CHECK(a.truth.count() == 800);
    CHECK_FALSE(a.image == plain.image);
    noisy.rng_seed = 4;
    CHECK_FALSE(synth_rectangle(noisy).image == a.image);
  }

  SUBCASE("noise is clamped to the intensity range") {
    SynthSpec noisy = spec;
    noisy.bg = 0;
    noisy.noise_sigma = 50;
    const SynthResult s = synth_rectangle(noisy);
    CHECK(s.image.at(0, 0) <= 65535);
    bool saw_zero = false;
    for (auto v : s.image.pixels()) saw_zero |= v == 0;
    CHECK(saw_zero);
  }

  SUBCASE("errors") {
    SynthSpec outside = spec;
    outside.rect = {80, 90, 40, 20};
    CHECK(code_of([&] { synth_rectangle(outside); }) == Errc::invalid_geometry);
    SynthSpec flat = spec;
    flat.fg = flat.bg;
    CHECK(code_of([&] { synth_rectangle(flat); }) == Errc::invalid_argument);
  }
}

TEST_CASE("mask centroid") {
  BinaryMask m(10, 10);
  CHECK(code_of([&] { m.centroid(); }) == Errc::empty_input);
  m.set(2, 3, true);
  m.set(4, 5, true);
  CHECK(m.centroid() == Point2{3, 4});
}
