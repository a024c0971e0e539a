#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace squarecut {

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Point2 operator*(double s, Point2 p) { return {s * p.x, s * p.y}; }
  friend bool operator==(const Point2&, const Point2&) = default;
};

double dot(Point2 a, Point2 b);
double cross(Point2 a, Point2 b);
double norm(Point2 p);

/// Closed template contour. Corners are clockwise on screen (y axis pointing
/// down), and the last corner connects back to the first.
struct TemplatePolygon {
  std::vector<Point2> corners;
};

/// Shoelace area in image coordinates. Positive for clockwise-on-screen order.
double signed_area(const TemplatePolygon& poly);

/// Throws Errc::invalid_template unless the polygon has at least three
/// corners, no repeated consecutive corners and clockwise orientation.
void validate_template(const TemplatePolygon& poly);

/// Unit square with corners on the unit circle, clockwise on screen.
TemplatePolygon square_template();

/// Axis-aligned rectangle template with the given aspect ratio (width/height).
TemplatePolygon rectangle_template(double aspect);

/// Reads "x y" pairs, one per line; '#' starts a comment.
TemplatePolygon parse_template(std::istream& in);
TemplatePolygon load_template(const std::string& path);

Point2 centroid(const TemplatePolygon& poly);

/// Moves the centroid to the origin and scales so the farthest corner sits at
/// distance 1.
TemplatePolygon normalize_template(const TemplatePolygon& poly);

/// Smallest t > 0 with origin + t*dir on the closed segment [a, b].
std::optional<double> ray_segment_intersection(Point2 origin, Point2 dir, Point2 a, Point2 b);

/// R rays leaving the seed, equally spaced in angle, each with Z nodes placed
/// evenly between the seed and the scaled template contour.
struct RayFan {
  Point2 seed;
  double angle_offset = 0.0;
  std::vector<Point2> directions;
  std::vector<double> intersect_dist;
  int nodes_per_ray = 0;
  // Row-major: ray r occupies [r * nodes_per_ray, (r + 1) * nodes_per_ray).
  std::vector<Point2> node_positions;

  int ray_count() const { return static_cast<int>(directions.size()); }
  const Point2& node(int ray, int level) const {
    return node_positions[static_cast<std::size_t>(ray) * nodes_per_ray + level];
  }
};

RayFan cast_rays(const TemplatePolygon& normalized, Point2 seed, double radius_scale, int ray_count,
                 double angle_offset = 0.0);

RayFan sample_nodes(RayFan fan, int nodes_per_ray);

}  // namespace squarecut
