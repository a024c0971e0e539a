#pragma once

#include <cstddef>
#include <vector>

#include "squarecut/geometry.hpp"
#include "squarecut/imaging.hpp"
#include "squarecut/maxflow.hpp"

namespace squarecut {

/// How node intensities are turned into the per-node boundary cost that the
/// closed set minimizes.
enum class CostModel {
  /// c = |mean - I(node)|. The cut then only sees the cost at the boundary
  /// node itself, so every interior node of a homogeneous object ties.
  intensity,
  /// c = d(z) - d(z+1) with d = |mean - I|: lowest where the ray leaves
  /// object-like intensities. The outermost node has zero cost.
  transition,
};

struct SegParams {
  int rays = 30;
  int nodes = 30;
  int delta = 4;
  double radius_scale = 20.0;
  int patch = 5;
  Sampling sampling = Sampling::nearest;
  int smoothing_iterations = 1;
  CostModel cost_model = CostModel::transition;
  /// Round the seed-patch mean to an integer so integer images give exact,
  /// integer-valued costs.
  bool integer_mean = false;
  double angle_offset = 0.0;
  TemplatePolygon shape = square_template();

  /// Throws Errc::invalid_argument on out-of-range values.
  void validate() const;
  /// Delta clamped to [0, nodes - 1]; larger values add no constraint.
  int effective_delta() const;
};

/// Row-major R x Z grid of reals indexed by (ray, level).
class RayGrid {
 public:
  RayGrid() = default;
  RayGrid(int rays, int nodes, double fill = 0.0);

  int rays() const { return rays_; }
  int nodes() const { return nodes_; }
  double& operator()(int ray, int level) { return values_[index(ray, level)]; }
  double operator()(int ray, int level) const { return values_[index(ray, level)]; }
  const std::vector<double>& values() const { return values_; }

  friend bool operator==(const RayGrid&, const RayGrid&) = default;

 private:
  std::size_t index(int ray, int level) const { return static_cast<std::size_t>(ray) * nodes_ + level; }

  int rays_ = 0;
  int nodes_ = 0;
  std::vector<double> values_;
};

struct CostGrid {
  RayGrid c;
  double mean_intensity = 0.0;
};

struct WeightGrid {
  RayGrid w;
};

/// Mean of the d x d window centred on the pixel nearest to the seed, with
/// border replication.
double estimate_mean(const GrayImage& img, Point2 seed, int patch);

/// c[r][z] = |mean - I(node(r, z))|.
CostGrid compute_costs(const GrayImage& img, const RayFan& fan, double mean, Sampling mode = Sampling::nearest);

/// Rewrites intensity costs into transition costs, see CostModel::transition.
CostGrid transition_costs(const CostGrid& intensity);

/// w[r][0] = c[r][0], w[r][z] = c[r][z] - c[r][z-1].
WeightGrid compute_weights(const CostGrid& costs);

inline FlowNetwork::NodeId grid_node(int ray, int level, int nodes_per_ray) {
  return static_cast<FlowNetwork::NodeId>(ray * nodes_per_ray + level);
}

/// Network whose minimum s-t cut is the minimum-weight closed set:
///  - (r, z) -> (r, z-1) for z > 0, infinite
///  - (r, z) -> (r +/- 1 mod R, max(0, z - delta)), infinite
///  - s -> (r, z) with -w when w < 0, otherwise (r, z) -> t with w
///  - s -> (0, 0), infinite, so the closed set is never empty
FlowNetwork build_network(const WeightGrid& weights, int delta);

/// Builds the network for the given costs, solves it and reads the boundary.
/// Verifies max-flow/min-cut duality and the closed set invariants; a breach
/// throws Errc::solver_invariant.
CutResult solve_boundary(const CostGrid& costs, int delta);

/// Sum over rays of c[r][b(r)].
double boundary_cost(const CostGrid& costs, const std::vector<int>& boundary);

}  // namespace squarecut
