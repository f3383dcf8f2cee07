#pragma once

#include "trackstride/geometry.hpp"

#include <array>
#include <utility>
#include <vector>

namespace trackstride {

struct ClassifiedSegments {
  std::vector<Segment> horizontal;
  std::vector<Segment> vertical;
  std::vector<Segment> rejected;
};

/// Left/mid/right split of the frame and one merge threshold per area.
struct AreaConfig {
  std::array<double, 2> boundaries{};        ///< x coordinates, 0 < b1 < b2 < width
  std::array<double, 3> merge_thresholds{};  ///< pixels, left/mid/right
  double join_threshold = 20.0;              ///< pixels, for chaining across areas

  /// Boundaries at width/3 and 2*width/3, thresholds 25/15/8 px scaled by height/720.
  static AreaConfig defaults(int width, int height);
  void validate(int width) const;
};

struct ClassifyParams {
  double horizontal_tolerance = 10.0;  ///< degrees
  double vertical_min_angle = 2.0;     ///< degrees away from the base angle
  double vertical_band = 45.0;         ///< |angle| >= 90 - band counts as near-vertical
};

struct LineParams {
  ClassifyParams classify;
  double vertical_group_tolerance = 15.0;  ///< degrees
  AreaConfig areas;
  double corner_snap_px = 5.0;  ///< 0 disables snap_corners
};

/// Horizontals ordered nearest first (decreasing midpoint y).
struct TrackLines {
  std::vector<Segment> horizontals;
  Segment vertical_left;
  Segment vertical_right;
};

struct VanishingPoint {
  PixelPoint p;
};

/// Median angle of the horizontal class, 0 when the class is empty.
double base_angle(const std::vector<Segment>& horizontals);

ClassifiedSegments classify(const std::vector<Segment>& segments, const ClassifyParams& params = {});

/// Three-area adaptive grouping of horizontal fragments into whole lines.
///
/// Fragments are cut at the area boundaries, assigned to an area by midpoint,
/// clustered around the longest remaining fragment using that area's
/// perpendicular-distance threshold, and each cluster merged into one segment
/// from its minimum-x endpoint to its maximum-x endpoint. Merged pieces in
/// neighbouring areas are chained when their nearest endpoints are closer than
/// the join threshold; each chain is returned as its overall extent.
/// Throws Error{EmptyInput} for an empty list.
std::vector<Segment> group_horizontals(const std::vector<Segment>& horizontals, const AreaConfig& areas);

/// Longest segment of each angle cluster; returns the leftmost and rightmost
/// survivors by midpoint x. Throws Error{InsufficientVerticals} below two clusters.
std::pair<Segment, Segment> select_verticals(const std::vector<Segment>& verticals,
                                             double group_tolerance = 15.0);

/// Intersection of the two extended verticals. Throws Error{NoVanishingPoint} when parallel.
VanishingPoint vanishing_point(const Segment& left, const Segment& right);

/// Endpoints lying within tolerance of a horizontal/vertical intersection
/// are moved onto it, so lines that meet at a grid corner end exactly there.
void snap_corners(TrackLines& lines, double tolerance);

/// classify -> group_horizontals -> select_verticals -> snap_corners.
/// Horizontals come back nearest first. Throws whatever the stages throw.
TrackLines extract_track_lines(const std::vector<Segment>& segments, const LineParams& params);

}  // namespace trackstride
