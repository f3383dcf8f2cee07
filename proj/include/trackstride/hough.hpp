#pragma once

#include "trackstride/geometry.hpp"
#include "trackstride/imaging.hpp"

#include <cstdint>
#include <vector>

namespace trackstride {

struct PhtParams {
  double rho_resolution = 1.0;    ///< pixels
  double theta_resolution = 1.0;  ///< degrees
  int vote_threshold = 30;
  double min_line_length = 40.0;  ///< pixels
  double max_line_gap = 10.0;     ///< pixels
  std::uint64_t rng_seed = 0;
  /// Half-width in pixels of the corridor searched while walking a line.
  int walk_band = 1;

  /// Throws Error{InvalidParams} when a bound is violated.
  void validate() const;
};

/// Progressive probabilistic Hough transform (Matas, Galambos & Kittler).
///
/// Edge pixels are drawn in seeded random order and voted into a (rho, theta)
/// accumulator. When a bin reaches the vote threshold the line is walked in
/// both directions from the drawn pixel, bridging gaps up to max_line_gap.
/// The walk direction is refit to the gathered pixels by total least squares
/// and the walk repeated until the support stops growing, which keeps long
/// lines in one piece despite the accumulator's angular quantization.
/// Segments at least min_line_length long are emitted; their pixels leave the
/// working set and their votes are withdrawn. Output is in emission order.
std::vector<Segment> probabilistic_hough(const EdgeMap& edges, const PhtParams& params);

/// Bresenham pixels of the rounded segment p1-p2 on an empty width x height map.
/// Throws Error{OutOfBounds} if an endpoint falls outside the image.
EdgeMap render_test_line(int width, int height, const PixelPoint& p1, const PixelPoint& p2);

/// Bresenham pixels between two integer points, endpoints included.
std::vector<Eigen::Vector2i> bresenham(const Eigen::Vector2i& a, const Eigen::Vector2i& b);

}  // namespace trackstride
