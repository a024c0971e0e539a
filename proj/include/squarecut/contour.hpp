#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "squarecut/geometry.hpp"
#include "squarecut/imaging.hpp"

namespace squarecut {

/// Closed polygon with one point per ray, in ray order.
struct Contour {
  std::vector<Point2> points;
};

/// Boundary distance along each ray, measured from the seed.
struct RadialProfile {
  Point2 seed;
  std::vector<Point2> directions;
  std::vector<double> radii;

  Contour to_contour() const;
};

/// radius[r] = (b[r] + 1) * intersect_dist[r] / Z.
RadialProfile boundary_to_profile(const RayFan& fan, const std::vector<int>& boundary);

/// Circular convolution of the radii with [0.25 0.5 0.25], repeated.
RadialProfile smooth_profile(RadialProfile profile, int iterations);

/// Even-odd fill of a closed polygon, sampled at pixel centres. Centres on a
/// left or top edge are inside, on a right or bottom edge outside.
BinaryMask rasterize_polygon(std::span<const Point2> polygon, int width, int height, Spacing spacing = {});

/// Rasterizes the profile polygon. Edge crossings are computed relative to
/// the seed so an integer shift of the seed shifts the mask exactly.
BinaryMask profile_to_mask(const RadialProfile& profile, int width, int height, Spacing spacing = {});

/// "x,y" header followed by one row per contour point.
void write_contour_csv(std::ostream& out, const Contour& contour);
void save_contour_csv(const std::string& path, const Contour& contour);

}  // namespace squarecut
