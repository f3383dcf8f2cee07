#include "trackstride/geometry.hpp"

#include "trackstride/error.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace trackstride {

Segment::Segment(PixelPoint p1, PixelPoint p2) : p1_(p1), p2_(p2) {
  if (!std::isfinite(p1.x) || !std::isfinite(p1.y) || !std::isfinite(p2.x) ||
      !std::isfinite(p2.y)) {
    throw Error(ErrorCode::InvalidParams, "segment endpoints must be finite");
  }
  if (p1 == p2) {
    throw Error(ErrorCode::InvalidParams, "segment endpoints coincide");
  }
}

double segment_angle(const Segment& s) {
  const double dx = s.p2().x - s.p1().x;
  const double dy = s.p2().y - s.p1().y;
  double deg = std::atan2(dy, dx) * 180.0 / std::numbers::pi;
  // fold the direction onto an undirected angle in (-90, 90]
  if (deg > 90.0) deg -= 180.0;
  if (deg <= -90.0) deg += 180.0;
  return deg;
}

double angle_distance(double deg_a, double deg_b) {
  double d = std::fmod(std::abs(deg_a - deg_b), 180.0);
  return d > 90.0 ? 180.0 - d : d;
}

HomogeneousLine line_through(const PixelPoint& p, const PixelPoint& q) {
  const Eigen::Vector3d l = Eigen::Vector3d(p.x, p.y, 1.0).cross(Eigen::Vector3d(q.x, q.y, 1.0));
  const double n = l.head<2>().norm();
  if (n == 0.0) {
    throw Error(ErrorCode::InvalidParams, "line through coincident points");
  }
  Eigen::Vector3d u = l / n;
  const bool flip = u.z() > 0.0 || (u.z() == 0.0 && (u.x() < 0.0 || (u.x() == 0.0 && u.y() < 0.0)));
  if (flip) u = -u;
  return {u.x(), u.y(), u.z() == 0.0 ? 0.0 : u.z()};
}

HomogeneousLine line_through(const Segment& s) { return line_through(s.p1(), s.p2()); }

std::optional<PixelPoint> intersect(const HomogeneousLine& l1, const HomogeneousLine& l2) {
  const double det = l1.a * l2.b - l2.a * l1.b;
  if (std::abs(det) < 1e-9) return std::nullopt;
  // Cramer's rule; the expression is antisymmetric in numerator and
  // denominator so swapping the arguments yields the identical result.
  const double x = (l1.b * l2.c - l2.b * l1.c) / det;
  const double y = (l2.a * l1.c - l1.a * l2.c) / det;
  return PixelPoint{x, y};
}

double endpoint_distance(const Segment& s1, const Segment& s2) {
  const auto d = [](const PixelPoint& p, const PixelPoint& q) { return (p.vec() - q.vec()).norm(); };
  return std::min({d(s1.p1(), s2.p1()), d(s1.p1(), s2.p2()), d(s1.p2(), s2.p1()),
                   d(s1.p2(), s2.p2())});
}

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::InvalidSigma: return "InvalidSigma";
    case ErrorCode::InvalidThresholds: return "InvalidThresholds";
    case ErrorCode::InvalidPolygon: return "InvalidPolygon";
    case ErrorCode::InvalidParams: return "InvalidParams";
    case ErrorCode::OutOfBounds: return "OutOfBounds";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::InsufficientVerticals: return "InsufficientVerticals";
    case ErrorCode::NoVanishingPoint: return "NoVanishingPoint";
    case ErrorCode::DegenerateConfiguration: return "DegenerateConfiguration";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::PointAtInfinity: return "PointAtInfinity";
    case ErrorCode::NoValidPair: return "NoValidPair";
    case ErrorCode::EmptyList: return "EmptyList";
    case ErrorCode::SchemaError: return "SchemaError";
    case ErrorCode::DuplicateFrame: return "DuplicateFrame";
    case ErrorCode::NoIntersection: return "NoIntersection";
    case ErrorCode::InsufficientContacts: return "InsufficientContacts";
    case ErrorCode::SpecError: return "SpecError";
    case ErrorCode::NoFrames: return "NoFrames";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

ErrorKind kind_of(ErrorCode code) {
  switch (code) {
    case ErrorCode::ConfigError:
    case ErrorCode::SpecError:
      return ErrorKind::Config;
    case ErrorCode::NoValidPair:
    case ErrorCode::InsufficientContacts:
    case ErrorCode::InsufficientVerticals:
    case ErrorCode::NoVanishingPoint:
    case ErrorCode::NoFrames:
      return ErrorKind::Pipeline;
    case ErrorCode::SchemaError:
    case ErrorCode::DuplicateFrame:
    case ErrorCode::IoError:
      return ErrorKind::Io;
    default:
      return ErrorKind::Argument;
  }
}

}  // namespace trackstride
