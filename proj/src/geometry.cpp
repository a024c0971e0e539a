#include "squarecut/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include "squarecut/error.hpp"

namespace squarecut {

namespace {

constexpr double kParallelEps = 1e-12;
constexpr double kSegmentEps = 1e-12;

}  // namespace

double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }

double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }

double norm(Point2 p) { return std::hypot(p.x, p.y); }

double signed_area(const TemplatePolygon& poly) {
  const auto& c = poly.corners;
  double twice = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    twice += cross(c[i], c[(i + 1) % c.size()]);
  }
  return 0.5 * twice;
}

void validate_template(const TemplatePolygon& poly) {
  const auto& c = poly.corners;
  if (c.size() < 3) {
    throw Error(Errc::invalid_template, "template needs at least 3 corners, got " + std::to_string(c.size()));
  }
  for (std::size_t i = 0; i < c.size(); ++i) {
    const Point2& p = c[i];
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
      throw Error(Errc::invalid_template, "template corner " + std::to_string(i) + " is not finite");
    }
    if (p == c[(i + 1) % c.size()]) {
      throw Error(Errc::invalid_template, "template corners " + std::to_string(i) + " and " +
                                              std::to_string((i + 1) % c.size()) + " coincide");
    }
  }
  if (!(signed_area(poly) > 0.0)) {
    throw Error(Errc::invalid_template, "template corners must be ordered clockwise (y axis down)");
  }
}

TemplatePolygon square_template() {
  const double h = 1.0 / std::numbers::sqrt2;
  return {{{-h, -h}, {h, -h}, {h, h}, {-h, h}}};
}

TemplatePolygon rectangle_template(double aspect) {
  if (!(aspect > 0.0) || !std::isfinite(aspect)) {
    throw Error(Errc::invalid_argument, "rectangle aspect must be positive");
  }
  return normalize_template({{{-aspect, -1.0}, {aspect, -1.0}, {aspect, 1.0}, {-aspect, 1.0}}});
}

TemplatePolygon parse_template(std::istream& in) {
  TemplatePolygon poly;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    double x = 0.0;
    double y = 0.0;
    if (!(ls >> x)) continue;  // blank or comment-only
    std::string rest;
    if (!(ls >> y) || (ls >> rest)) {
      throw Error(Errc::format_error, "template line " + std::to_string(line_no) + ": expected \"x y\"");
    }
    poly.corners.push_back({x, y});
  }
  validate_template(poly);
  return poly;
}

TemplatePolygon load_template(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::io_error, "cannot open template file " + path);
  return parse_template(in);
}

Point2 centroid(const TemplatePolygon& poly) {
  if (poly.corners.empty()) throw Error(Errc::invalid_template, "template has no corners");
  Point2 sum;
  for (const Point2& p : poly.corners) sum = sum + p;
  return (1.0 / static_cast<double>(poly.corners.size())) * sum;
}

TemplatePolygon normalize_template(const TemplatePolygon& poly) {
  const Point2 center = centroid(poly);
  double max_radius = 0.0;
  for (const Point2& p : poly.corners) max_radius = std::max(max_radius, norm(p - center));
  if (!(max_radius > 0.0)) {
    throw Error(Errc::degenerate_template, "all template corners coincide with the centroid");
  }
  TemplatePolygon out;
  out.corners.reserve(poly.corners.size());
  for (const Point2& p : poly.corners) out.corners.push_back((1.0 / max_radius) * (p - center));
  return out;
}

std::optional<double> ray_segment_intersection(Point2 origin, Point2 dir, Point2 a, Point2 b) {
  const Point2 edge = b - a;
  const double denom = cross(dir, edge);
  if (std::abs(denom) < kParallelEps * std::max(1.0, norm(edge))) return std::nullopt;
  const Point2 to_a = a - origin;
  const double t = cross(to_a, edge) / denom;
  const double u = cross(to_a, dir) / denom;
  if (u < -kSegmentEps || u > 1.0 + kSegmentEps) return std::nullopt;
  if (!(t > kSegmentEps)) return std::nullopt;
  return t;
}

RayFan cast_rays(const TemplatePolygon& normalized, Point2 seed, double radius_scale, int ray_count,
                 double angle_offset) {
  if (ray_count < 3) throw Error(Errc::invalid_argument, "at least 3 rays are required");
  if (!(radius_scale > 0.0) || !std::isfinite(radius_scale)) {
    throw Error(Errc::invalid_argument, "radius scale must be positive");
  }
  const auto& c = normalized.corners;
  if (c.size() < 3) throw Error(Errc::invalid_template, "template needs at least 3 corners");

  RayFan fan;
  fan.seed = seed;
  fan.angle_offset = angle_offset;
  fan.directions.reserve(ray_count);
  fan.intersect_dist.reserve(ray_count);
  const double step = 2.0 * std::numbers::pi / ray_count;
  for (int r = 0; r < ray_count; ++r) {
    const double angle = angle_offset + step * r;
    const Point2 dir{std::cos(angle), std::sin(angle)};
    double nearest = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < c.size(); ++i) {
      if (auto t = ray_segment_intersection({0.0, 0.0}, dir, c[i], c[(i + 1) % c.size()])) {
        nearest = std::min(nearest, *t);
      }
    }
    if (!std::isfinite(nearest)) {
      throw Error(Errc::no_intersection, "ray " + std::to_string(r) + " misses the template contour");
    }
    fan.directions.push_back(dir);
    fan.intersect_dist.push_back(radius_scale * nearest);
  }
  return fan;
}

RayFan sample_nodes(RayFan fan, int nodes_per_ray) {
  if (nodes_per_ray < 1) throw Error(Errc::invalid_argument, "at least one node per ray is required");
  const int rays = fan.ray_count();
  fan.nodes_per_ray = nodes_per_ray;
  fan.node_positions.clear();
  fan.node_positions.reserve(static_cast<std::size_t>(rays) * nodes_per_ray);
  for (int r = 0; r < rays; ++r) {
    const double reach = fan.intersect_dist[r];
    if (!(reach > 0.0)) {
      throw Error(Errc::degenerate_ray, "ray " + std::to_string(r) + " has zero length");
    }
    for (int z = 0; z < nodes_per_ray; ++z) {
      // Last node lands exactly on the contour.
      const double t = z + 1 == nodes_per_ray ? reach : reach * (z + 1) / nodes_per_ray;
      fan.node_positions.push_back(fan.seed + t * fan.directions[r]);
    }
  }
  return fan;
}

}  // namespace squarecut
