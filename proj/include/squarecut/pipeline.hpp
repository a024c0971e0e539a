#pragma once

#include <span>
#include <vector>

#include "squarecut/contour.hpp"
#include "squarecut/geometry.hpp"
#include "squarecut/imaging.hpp"
#include "squarecut/segcore.hpp"

namespace squarecut {

struct SegTimings {
  double graph_ms = 0.0;      // mean estimate, ray casting, costs, network
  double solve_ms = 0.0;      // max flow and boundary extraction
  double rasterize_ms = 0.0;  // profile, smoothing, mask
  double total_ms() const { return graph_ms + solve_ms + rasterize_ms; }
};

struct SegResult {
  SegParams params;
  Point2 seed;
  int iterations = 1;
  double mean_intensity = 0.0;
  RayFan fan;
  CostGrid costs;
  std::vector<int> boundary;
  double cut_cost = 0.0;
  double flow_value = 0.0;
  Contour raw_contour;
  Contour contour;  // smoothed
  BinaryMask mask;
  SegTimings timings;
};

/// Full segmentation from a single seed point. Throws Errc::seed_out_of_image
/// when the seed lies outside the pixel grid.
SegResult segment(const GrayImage& img, Point2 seed, const SegParams& params);

/// Re-seeds at the mask centroid until the seed moves by less than half a
/// pixel or max_iters rounds have run.
SegResult segment_iterative(const GrayImage& img, Point2 seed, const SegParams& params, int max_iters);

/// One segmentation per delta value, in input order.
std::vector<SegResult> delta_sweep(const GrayImage& img, Point2 seed, const SegParams& params,
                                   std::span<const int> deltas);

}  // namespace squarecut
