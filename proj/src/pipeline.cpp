#include "squarecut/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <string>

#include "squarecut/error.hpp"

namespace squarecut {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point since) {
  return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

void check_seed(const GrayImage& img, Point2 seed) {
  const bool inside = std::isfinite(seed.x) && std::isfinite(seed.y) && seed.x >= -0.5 && seed.y >= -0.5 &&
                      seed.x < img.width() - 0.5 && seed.y < img.height() - 0.5;
  if (!inside) {
    throw Error(Errc::seed_out_of_image, "seed (" + std::to_string(seed.x) + ", " + std::to_string(seed.y) +
                                             ") lies outside the " + std::to_string(img.width()) + "x" +
                                             std::to_string(img.height()) + " image");
  }
}

}  // namespace

SegResult segment(const GrayImage& img, Point2 seed, const SegParams& params) {
  params.validate();
  check_seed(img, seed);

  SegResult out;
  out.params = params;
  out.seed = seed;

  auto t0 = Clock::now();
  double mean = estimate_mean(img, seed, params.patch);
  if (params.integer_mean) mean = std::round(mean);
  out.mean_intensity = mean;

  out.fan = sample_nodes(
      cast_rays(normalize_template(params.shape), seed, params.radius_scale, params.rays, params.angle_offset),
      params.nodes);
  CostGrid dissimilarity = compute_costs(img, out.fan, mean, params.sampling);
  out.costs = params.cost_model == CostModel::transition ? transition_costs(dissimilarity) : std::move(dissimilarity);
  out.timings.graph_ms = elapsed_ms(t0);

  t0 = Clock::now();
  CutResult cut = solve_boundary(out.costs, params.effective_delta());
  out.boundary = std::move(cut.boundary);
  out.cut_cost = cut.cut_cost;
  out.flow_value = cut.flow_value;
  out.timings.solve_ms = elapsed_ms(t0);

  t0 = Clock::now();
  const RadialProfile raw = boundary_to_profile(out.fan, out.boundary);
  const RadialProfile smoothed = smooth_profile(raw, params.smoothing_iterations);
  out.raw_contour = raw.to_contour();
  out.contour = smoothed.to_contour();
  out.mask = profile_to_mask(smoothed, img.width(), img.height(), img.spacing());
  out.timings.rasterize_ms = elapsed_ms(t0);
  return out;
}

SegResult segment_iterative(const GrayImage& img, Point2 seed, const SegParams& params, int max_iters) {
  if (max_iters < 1) throw Error(Errc::invalid_argument, "max_iters must be at least 1");
  SegResult result = segment(img, seed, params);
  for (int it = 1; it < max_iters; ++it) {
    if (result.mask.count() == 0) break;
    const Point2 next = result.mask.centroid();
    if (norm(next - result.seed) < 0.5) break;
    const int done = result.iterations;
    result = segment(img, next, params);
    result.iterations = done + 1;
  }
  return result;
}

std::vector<SegResult> delta_sweep(const GrayImage& img, Point2 seed, const SegParams& params,
                                   std::span<const int> deltas) {
  if (deltas.empty()) throw Error(Errc::invalid_argument, "delta list is empty");
  std::vector<SegResult> out;
  out.reserve(deltas.size());
  for (int delta : deltas) {
    SegParams p = params;
    p.delta = delta;
    out.push_back(segment(img, seed, p));
  }
  return out;
}

}  // namespace squarecut
