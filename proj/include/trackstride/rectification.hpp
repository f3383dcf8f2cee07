#pragma once

#include "trackstride/geometry.hpp"
#include "trackstride/homography.hpp"
#include "trackstride/line_structure.hpp"

#include <array>
#include <span>
#include <vector>

namespace trackstride {

struct Correspondence {
  PixelPoint image;
  WorldPoint world;
};

/// Metric layout of the reference lines on the track plane. World x runs
/// along the horizontals (x = 0 at the left vertical, x = lane_width_m at the
/// right one); world y runs across them, horizontal i sitting at
/// horizontal_spacing_m[i] with the nearest line at 0.
struct WorldModel {
  double lane_width_m = 1.22;
  std::vector<double> horizontal_spacing_m{0.0, 5.0, 10.0, 15.0, 20.0};

  void validate() const;
};

/// DLT over image -> world correspondences.
Homography dlt_homography(std::span<const Correspondence> corrs);

/// (x'/w', y'/w'). Throws Error{PointAtInfinity} when |w'| < 1e-12.
WorldPoint apply(const Homography& h, const PixelPoint& p);

/// World -> image through the inverse map.
PixelPoint apply_inverse(const Homography& h, const WorldPoint& p);

struct PairHomography {
  Homography h;
  int pair_id = 0;  ///< 0: lines 1-2, 1: lines 2-3, 2: lines 4-5
  std::array<Correspondence, 4> corners;
};

/// The horizontal-line pairs used per frame, as 0-based indices.
inline constexpr std::array<std::array<int, 2>, 3> kLinePairs{{{0, 1}, {1, 2}, {3, 4}}};

/// Four-corner homographies for the line pairs (1,2), (2,3) and (4,5).
/// Pairs that are missing or whose intersections fail are skipped.
/// Throws Error{NoValidPair} when nothing survives.
std::vector<PairHomography> frame_homographies(const TrackLines& lines, const WorldModel& world);

/// Entry-wise median, lower median for an even count. Signs are aligned with
/// a first-pass median of the canonical forms. Throws Error{EmptyList}.
Homography median_homography(std::span<const Homography> hs);

/// RMS world-plane distance between apply(h, image) and world.
double reprojection_error(const Homography& h, std::span<const Correspondence> corrs);

}  // namespace trackstride
