#include "squarecut/contour.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>

#include "squarecut/error.hpp"

namespace squarecut {

namespace {

// Smallest integer i with (i - origin) >= bound, evaluated exactly as the
// membership test below evaluates it.
int first_pixel_at_or_after(double bound, double origin) {
  double guess = std::ceil(bound + origin);
  while ((guess - 1.0) - origin >= bound) guess -= 1.0;
  while (guess - origin < bound) guess += 1.0;
  return static_cast<int>(std::clamp(guess, -1.0e9, 1.0e9));
}

// Polygon vertices are given relative to `origin`; pixel (i, j) has its centre
// at (i - origin.x, j - origin.y) in that frame.
BinaryMask fill_even_odd(std::span<const Point2> poly, Point2 origin, int width, int height, Spacing spacing) {
  BinaryMask mask(width, height, spacing);
  const std::size_t n = poly.size();
  if (n < 3) return mask;

  double min_y = poly[0].y;
  double max_y = poly[0].y;
  for (const Point2& p : poly) {
    min_y = std::min(min_y, p.y);
    max_y = std::max(max_y, p.y);
  }
  const int row_begin = std::max(0, static_cast<int>(std::floor(min_y + origin.y)) - 1);
  const int row_end = std::min(height, static_cast<int>(std::ceil(max_y + origin.y)) + 2);

  std::vector<double> crossings;
  for (int row = row_begin; row < row_end; ++row) {
    const double y = row - origin.y;
    crossings.clear();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
      const Point2& a = poly[i];
      const Point2& b = poly[j];
      // Half-open in y: an edge covers [min_y, max_y).
      if ((a.y > y) != (b.y > y)) crossings.push_back((b.x - a.x) * (y - a.y) / (b.y - a.y) + a.x);
    }
    std::sort(crossings.begin(), crossings.end());
    for (std::size_t k = 0; k + 1 < crossings.size(); k += 2) {
      const int begin = std::max(0, first_pixel_at_or_after(crossings[k], origin.x));
      const int end = std::min(width, first_pixel_at_or_after(crossings[k + 1], origin.x));
      for (int col = begin; col < end; ++col) mask.set(col, row, true);
    }
  }
  return mask;
}

}  // namespace

Contour RadialProfile::to_contour() const {
  Contour out;
  out.points.reserve(radii.size());
  for (std::size_t r = 0; r < radii.size(); ++r) out.points.push_back(seed + radii[r] * directions[r]);
  return out;
}

RadialProfile boundary_to_profile(const RayFan& fan, const std::vector<int>& boundary) {
  if (boundary.size() != fan.directions.size()) {
    throw Error(Errc::invalid_argument, "boundary length does not match the ray count");
  }
  RadialProfile out{fan.seed, fan.directions, {}};
  out.radii.reserve(boundary.size());
  for (std::size_t r = 0; r < boundary.size(); ++r) {
    const int level = boundary[r];
    if (level < 0 || level >= fan.nodes_per_ray) {
      throw Error(Errc::invalid_argument, "boundary level out of range on ray " + std::to_string(r));
    }
    out.radii.push_back(level + 1 == fan.nodes_per_ray ? fan.intersect_dist[r]
                                                      : fan.intersect_dist[r] * (level + 1) / fan.nodes_per_ray);
  }
  return out;
}

RadialProfile smooth_profile(RadialProfile profile, int iterations) {
  if (iterations < 0) throw Error(Errc::invalid_argument, "smoothing iterations must be non-negative");
  const std::size_t n = profile.radii.size();
  if (n == 0) return profile;
  std::vector<double> next(n);
  for (int it = 0; it < iterations; ++it) {
    const auto& cur = profile.radii;
    for (std::size_t r = 0; r < n; ++r) {
      next[r] = 0.25 * cur[(r + n - 1) % n] + 0.5 * cur[r] + 0.25 * cur[(r + 1) % n];
    }
    profile.radii.swap(next);
  }
  return profile;
}

BinaryMask rasterize_polygon(std::span<const Point2> polygon, int width, int height, Spacing spacing) {
  return fill_even_odd(polygon, {0.0, 0.0}, width, height, spacing);
}

BinaryMask profile_to_mask(const RadialProfile& profile, int width, int height, Spacing spacing) {
  std::vector<Point2> relative;
  relative.reserve(profile.radii.size());
  for (std::size_t r = 0; r < profile.radii.size(); ++r) relative.push_back(profile.radii[r] * profile.directions[r]);
  return fill_even_odd(relative, profile.seed, width, height, spacing);
}

void write_contour_csv(std::ostream& out, const Contour& contour) {
  out << "x,y\n";
  char buf[64];
  for (const Point2& p : contour.points) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", p.x, p.y);
    out << buf;
  }
}

void save_contour_csv(const std::string& path, const Contour& contour) {
  std::ofstream out(path);
  if (!out) throw Error(Errc::io_error, "cannot create " + path);
  write_contour_csv(out, contour);
  if (!out) throw Error(Errc::io_error, "write failed: " + path);
}

}  // namespace squarecut
