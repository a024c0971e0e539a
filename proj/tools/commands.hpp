#pragma once

#include <iosfwd>

#include "squarecut/imaging.hpp"
#include "squarecut/segcore.hpp"

namespace squarecut::cli {

enum ExitCode {
  kOk = 0,
  kUsage = 2,
  kIoError = 3,
  kSegmentationError = 4,
};

/// Runs the squarecut command line with argv[0] as the program name. Records
/// go to `out`, diagnostics to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Image and parameters used by `squarecut bench`: a noisy 2:1 rectangle
/// centred on a size x size canvas, seeded at the canvas centre.
struct BenchFixture {
  GrayImage image;
  BinaryMask truth;
  Point2 seed;
  SegParams params;
};
BenchFixture bench_fixture(int size, int rays, int nodes, std::uint64_t rng_seed);

}  // namespace squarecut::cli
