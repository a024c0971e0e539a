#pragma once

#include "squarecut/imaging.hpp"
#include "squarecut/pipeline.hpp"

namespace fixture {

/// 20 x 20 bright square centred at (49.5, 49.5) on a 100 x 100 canvas.
inline squarecut::SynthResult bright_square(double noise_sigma = 0.0, std::uint64_t rng_seed = 0) {
  squarecut::SynthSpec spec;
  spec.rect = {40, 40, 20, 20};
  spec.noise_sigma = noise_sigma;
  spec.rng_seed = rng_seed;
  return squarecut::synth_rectangle(spec);
}

/// 40 x 20 rectangle with fg 200 / bg 50, optionally with the lower-right
/// 8 x 8 corner erased.
inline squarecut::SynthResult rectangle(bool erase_corner, double noise_sigma = 0.0, std::uint64_t rng_seed = 0) {
  squarecut::SynthSpec spec;
  spec.rect = {30, 40, 40, 20};
  if (erase_corner) spec.erased = {{62, 52, 8, 8}};
  spec.noise_sigma = noise_sigma;
  spec.rng_seed = rng_seed;
  return squarecut::synth_rectangle(spec);
}

inline constexpr squarecut::PixelRect kErasedCorner{62, 52, 8, 8};
inline constexpr squarecut::Point2 kRectangleCentre{49.5, 49.5};

/// Parameters for the rectangle fixtures: 30 rays, 100 nodes, delta 1, a 2:1
/// rectangle template reaching 30 px along the diagonals.
inline squarecut::SegParams rectangle_params(int smoothing) {
  squarecut::SegParams p;
  p.rays = 30;
  p.nodes = 100;
  p.delta = 1;
  p.radius_scale = 30.0;
  p.shape = squarecut::rectangle_template(2.0);
  p.smoothing_iterations = smoothing;
  return p;
}

/// The bright square with a second bright object 2 px to its right (6 x 20
/// px) whose far side borders a dark region. A loose smoothness constraint
/// lets the contour jump across the gap to that darker, stronger edge.
inline squarecut::SynthResult two_objects() {
  squarecut::SynthResult s = bright_square();
  for (int y = 30; y < 70; ++y) {
    for (int x = 68; x < 100; ++x) s.image.at(x, y) = 0;
  }
  for (int y = 40; y < 60; ++y) {
    for (int x = 62; x < 68; ++x) s.image.at(x, y) = 200;
  }
  return s;
}

inline squarecut::SegParams two_object_params(int delta) {
  squarecut::SegParams p;
  p.rays = 30;
  p.nodes = 30;
  p.delta = delta;
  p.radius_scale = 40.0;
  return p;
}

}  // namespace fixture
