#pragma once

#include <Eigen/Core>

#include <optional>

namespace trackstride {

/// Image-plane point in pixels. Origin top-left, y grows downward.
struct PixelPoint {
  double x = 0.0;
  double y = 0.0;

  Eigen::Vector2d vec() const { return {x, y}; }
  static PixelPoint from(const Eigen::Vector2d& v) { return {v.x(), v.y()}; }
  bool operator==(const PixelPoint&) const = default;
};

/// Track-plane point in meters.
struct WorldPoint {
  double x = 0.0;
  double y = 0.0;

  Eigen::Vector2d vec() const { return {x, y}; }
  static WorldPoint from(const Eigen::Vector2d& v) { return {v.x(), v.y()}; }
  bool operator==(const WorldPoint&) const = default;
};

/// Finite line segment with distinct endpoints.
class Segment {
 public:
  Segment() = default;
  /// Throws Error{InvalidParams} if the endpoints coincide or are not finite.
  Segment(PixelPoint p1, PixelPoint p2);

  const PixelPoint& p1() const { return p1_; }
  const PixelPoint& p2() const { return p2_; }
  double length() const { return (p2_.vec() - p1_.vec()).norm(); }
  PixelPoint midpoint() const { return PixelPoint::from(0.5 * (p1_.vec() + p2_.vec())); }
  double min_x() const { return std::min(p1_.x, p2_.x); }
  double max_x() const { return std::max(p1_.x, p2_.x); }

  bool operator==(const Segment&) const = default;

 private:
  PixelPoint p1_{0.0, 0.0};
  PixelPoint p2_{1.0, 0.0};
};

/// Line a*x + b*y + c = 0 with a^2 + b^2 = 1, c <= 0 (ties broken by a > 0).
struct HomogeneousLine {
  double a = 0.0;
  double b = 1.0;
  double c = 0.0;

  /// Signed distance of p from the line.
  double signed_distance(const PixelPoint& p) const { return a * p.x + b * p.y + c; }
  Eigen::Vector3d vec() const { return {a, b, c}; }
};

/// Angle from the image x-axis in degrees, in (-90, 90]. Independent of endpoint order.
double segment_angle(const Segment& s);

/// Smallest difference between two undirected line angles, in [0, 90].
double angle_distance(double deg_a, double deg_b);

HomogeneousLine line_through(const Segment& s);
HomogeneousLine line_through(const PixelPoint& p, const PixelPoint& q);

/// Intersection of two normalized lines. std::nullopt when they are parallel
/// (|cross product of normals| < 1e-9).
std::optional<PixelPoint> intersect(const HomogeneousLine& l1, const HomogeneousLine& l2);

/// Minimum Euclidean distance over the four endpoint pairs.
double endpoint_distance(const Segment& s1, const Segment& s2);

}  // namespace trackstride
