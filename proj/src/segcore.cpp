#include "squarecut/segcore.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>

#include "squarecut/error.hpp"

namespace squarecut {

void SegParams::validate() const {
  if (rays < 3) throw Error(Errc::invalid_argument, "rays must be at least 3");
  if (nodes < 2) throw Error(Errc::invalid_argument, "nodes per ray must be at least 2");
  if (delta < 0) throw Error(Errc::invalid_argument, "delta must be non-negative");
  if (!(radius_scale > 0.0) || !std::isfinite(radius_scale)) {
    throw Error(Errc::invalid_argument, "radius must be positive");
  }
  if (patch < 1 || patch % 2 == 0) throw Error(Errc::invalid_argument, "patch size must be a positive odd integer");
  if (smoothing_iterations < 0) throw Error(Errc::invalid_argument, "smoothing iterations must be non-negative");
  if (!std::isfinite(angle_offset)) throw Error(Errc::invalid_argument, "angle offset must be finite");
  validate_template(shape);
}

int SegParams::effective_delta() const { return std::clamp(delta, 0, nodes - 1); }

RayGrid::RayGrid(int rays, int nodes, double fill) : rays_(rays), nodes_(nodes) {
  if (rays <= 0 || nodes <= 0) throw Error(Errc::invalid_argument, "ray grid dimensions must be positive");
  values_.assign(static_cast<std::size_t>(rays) * nodes, fill);
}

double estimate_mean(const GrayImage& img, Point2 seed, int patch) {
  if (patch < 1 || patch % 2 == 0) throw Error(Errc::invalid_argument, "patch size must be a positive odd integer");
  const int cx = std::clamp(static_cast<int>(std::floor(seed.x + 0.5)), 0, img.width() - 1);
  const int cy = std::clamp(static_cast<int>(std::floor(seed.y + 0.5)), 0, img.height() - 1);
  const int half = patch / 2;
  double sum = 0.0;
  for (int dy = -half; dy <= half; ++dy) {
    const int y = std::clamp(cy + dy, 0, img.height() - 1);
    for (int dx = -half; dx <= half; ++dx) {
      sum += img.at(std::clamp(cx + dx, 0, img.width() - 1), y);
    }
  }
  return sum / (static_cast<double>(patch) * patch);
}

CostGrid compute_costs(const GrayImage& img, const RayFan& fan, double mean, Sampling mode) {
  if (fan.nodes_per_ray < 1 ||
      fan.node_positions.size() != static_cast<std::size_t>(fan.ray_count()) * fan.nodes_per_ray) {
    throw Error(Errc::invalid_argument, "ray fan has no sampled nodes");
  }
  CostGrid out{RayGrid(fan.ray_count(), fan.nodes_per_ray), mean};
  for (int r = 0; r < fan.ray_count(); ++r) {
    for (int z = 0; z < fan.nodes_per_ray; ++z) {
      out.c(r, z) = std::abs(mean - sample_intensity(img, fan.node(r, z), mode));
    }
  }
  return out;
}

CostGrid transition_costs(const CostGrid& intensity) {
  const RayGrid& d = intensity.c;
  CostGrid out{RayGrid(d.rays(), d.nodes()), intensity.mean_intensity};
  for (int r = 0; r < d.rays(); ++r) {
    for (int z = 0; z + 1 < d.nodes(); ++z) out.c(r, z) = d(r, z) - d(r, z + 1);
  }
  return out;
}

WeightGrid compute_weights(const CostGrid& costs) {
  const RayGrid& c = costs.c;
  WeightGrid out{RayGrid(c.rays(), c.nodes())};
  for (int r = 0; r < c.rays(); ++r) {
    out.w(r, 0) = c(r, 0);
    for (int z = 1; z < c.nodes(); ++z) out.w(r, z) = c(r, z) - c(r, z - 1);
  }
  return out;
}

FlowNetwork build_network(const WeightGrid& weights, int delta) {
  if (delta < 0) throw Error(Errc::invalid_argument, "delta must be non-negative");
  const int rays = weights.w.rays();
  const int nodes = weights.w.nodes();
  if (rays < 3) throw Error(Errc::invalid_argument, "at least 3 rays are required");

  FlowNetwork net(rays * nodes);
  for (int r = 0; r < rays; ++r) {
    for (int z = 1; z < nodes; ++z) net.add_arc(grid_node(r, z, nodes), grid_node(r, z - 1, nodes), kInfinite);
  }
  for (int r = 0; r < rays; ++r) {
    const int next = (r + 1) % rays;
    const int prev = (r + rays - 1) % rays;
    for (int z = 0; z < nodes; ++z) {
      const int target = std::max(0, z - delta);
      net.add_arc(grid_node(r, z, nodes), grid_node(next, target, nodes), kInfinite);
      net.add_arc(grid_node(r, z, nodes), grid_node(prev, target, nodes), kInfinite);
    }
  }
  for (int r = 0; r < rays; ++r) {
    for (int z = 0; z < nodes; ++z) {
      const double w = weights.w(r, z);
      if (w < 0.0) {
        net.add_arc(FlowNetwork::kSource, grid_node(r, z, nodes), -w);
      } else {
        net.add_arc(grid_node(r, z, nodes), FlowNetwork::kSink, w);
      }
    }
  }
  net.add_arc(FlowNetwork::kSource, grid_node(0, 0, nodes), kInfinite);
  return net;
}

double boundary_cost(const CostGrid& costs, const std::vector<int>& boundary) {
  if (boundary.size() != static_cast<std::size_t>(costs.c.rays())) {
    throw Error(Errc::invalid_argument, "boundary length does not match the ray count");
  }
  double total = 0.0;
  for (int r = 0; r < costs.c.rays(); ++r) total += costs.c(r, boundary[r]);
  return total;
}

CutResult solve_boundary(const CostGrid& costs, int delta) {
  const int rays = costs.c.rays();
  const int nodes = costs.c.nodes();
  FlowNetwork net = build_network(compute_weights(costs), delta);

  CutResult out;
  out.flow_value = net.max_flow();
  out.source_set = net.min_cut_source_set();

  const Capacity cut = net.cut_capacity(out.source_set);
  if (!std::isfinite(cut) || std::abs(cut - out.flow_value) > 1e-6 * std::max(1.0, std::abs(out.flow_value))) {
    throw Error(Errc::solver_invariant, "max flow " + std::to_string(out.flow_value) +
                                            " does not match the cut capacity " + std::to_string(cut));
  }
  out.boundary = extract_boundary(out.source_set, rays, nodes);
  const int effective = std::min(delta, nodes - 1);
  for (int r = 0; r < rays; ++r) {
    for (int z = 0; z <= out.boundary[r]; ++z) {
      if (!out.source_set[static_cast<std::size_t>(r) * nodes + z]) {
        throw Error(Errc::solver_invariant, "closed set has a gap on ray " + std::to_string(r));
      }
    }
    if (std::abs(out.boundary[r] - out.boundary[(r + 1) % rays]) > effective) {
      throw Error(Errc::solver_invariant, "boundary violates the smoothness constraint at ray " + std::to_string(r));
    }
  }
  out.cut_cost = boundary_cost(costs, out.boundary);
  return out;
}

}  // namespace squarecut
