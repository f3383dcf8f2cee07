#include "trackstride/line_structure.hpp"

#include "trackstride/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <tuple>

namespace trackstride {

AreaConfig AreaConfig::defaults(int width, int height) {
  const double scale = height / 720.0;
  AreaConfig c;
  c.boundaries = {width / 3.0, 2.0 * width / 3.0};
  c.merge_thresholds = {25.0 * scale, 15.0 * scale, 8.0 * scale};
  c.join_threshold = 20.0 * scale;
  return c;
}

void AreaConfig::validate(int width) const {
  if (!(boundaries[0] > 0.0 && boundaries[0] < boundaries[1] && boundaries[1] < width)) {
    throw Error(ErrorCode::InvalidParams, "area boundaries must satisfy 0 < b1 < b2 < width");
  }
  for (double t : merge_thresholds) {
    if (!(t > 0.0)) throw Error(ErrorCode::InvalidParams, "merge thresholds must be > 0");
  }
  if (!(join_threshold > 0.0)) throw Error(ErrorCode::InvalidParams, "join threshold must be > 0");
}

double base_angle(const std::vector<Segment>& horizontals) {
  if (horizontals.empty()) return 0.0;
  std::vector<double> angles;
  angles.reserve(horizontals.size());
  for (const auto& s : horizontals) angles.push_back(segment_angle(s));
  const auto mid = angles.begin() + static_cast<std::ptrdiff_t>((angles.size() - 1) / 2);
  std::nth_element(angles.begin(), mid, angles.end());
  return *mid;
}

ClassifiedSegments classify(const std::vector<Segment>& segments, const ClassifyParams& params) {
  if (!(params.horizontal_tolerance > 0.0) || !(params.vertical_min_angle > 0.0) ||
      !(params.vertical_band > 0.0)) {
    throw Error(ErrorCode::InvalidParams, "classification tolerances must be > 0");
  }
  ClassifiedSegments out;
  std::vector<const Segment*> rest;
  for (const auto& s : segments) {
    if (std::abs(segment_angle(s)) <= params.horizontal_tolerance) {
      out.horizontal.push_back(s);
    } else {
      rest.push_back(&s);
    }
  }
  const double base = base_angle(out.horizontal);
  for (const Segment* s : rest) {
    const double angle = segment_angle(*s);
    if (angle_distance(angle, base) > params.vertical_min_angle &&
        std::abs(angle) >= 90.0 - params.vertical_band) {
      out.vertical.push_back(*s);
    } else {
      out.rejected.push_back(*s);
    }
  }
  return out;
}

namespace {

struct Piece {
  Segment seg;
  int area = 0;
};

double y_at(const Segment& s, double x) {
  const double t = (x - s.p1().x) / (s.p2().x - s.p1().x);
  return s.p1().y + t * (s.p2().y - s.p1().y);
}

int area_of(double x, const AreaConfig& areas) {
  if (x < areas.boundaries[0]) return 0;
  if (x < areas.boundaries[1]) return 1;
  return 2;
}

// Cuts a segment at every area boundary strictly inside its x-extent.
std::vector<Segment> split_at_boundaries(const Segment& s, const AreaConfig& areas) {
  PixelPoint a = s.p1();
  PixelPoint b = s.p2();
  if (a.x > b.x) std::swap(a, b);
  if (a.x == b.x) return {s};
  std::vector<PixelPoint> cuts{a};
  const Segment ordered(a, b);
  for (double bx : areas.boundaries) {
    if (bx > a.x && bx < b.x) cuts.push_back({bx, y_at(ordered, bx)});
  }
  cuts.push_back(b);
  std::vector<Segment> out;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    if (cuts[i] == cuts[i + 1]) continue;
    out.emplace_back(cuts[i], cuts[i + 1]);
  }
  return out;
}

// Segment from the minimum-x endpoint to the maximum-x endpoint of the members.
std::optional<Segment> span_of(const std::vector<Segment>& members) {
  PixelPoint lo = members.front().p1();
  PixelPoint hi = lo;
  for (const auto& s : members) {
    for (const auto& p : {s.p1(), s.p2()}) {
      if (p.x < lo.x) lo = p;
      if (p.x > hi.x) hi = p;
    }
  }
  if (lo == hi) return std::nullopt;
  return Segment(lo, hi);
}

bool longer_first(const Segment& a, const Segment& b) {
  const double la = a.length();
  const double lb = b.length();
  if (la != lb) return la > lb;
  return a.midpoint().y < b.midpoint().y;
}

bool nearer_first(const Segment& a, const Segment& b) { return a.midpoint().y > b.midpoint().y; }

}  // namespace

std::vector<Segment> group_horizontals(const std::vector<Segment>& horizontals, const AreaConfig& areas) {
  if (horizontals.empty()) throw Error(ErrorCode::EmptyInput, "no horizontal segments to group");

  // (1) + (2): cut at boundaries and bucket by midpoint
  std::array<std::vector<Segment>, 3> by_area;
  for (const auto& s : horizontals) {
    for (auto& piece : split_at_boundaries(s, areas)) {
      by_area[area_of(piece.midpoint().x, areas)].push_back(piece);
    }
  }

  // (3) + (4): cluster around the longest remaining piece, merge to min-x..max-x
  std::array<std::vector<Segment>, 3> merged;
  for (int area = 0; area < 3; ++area) {
    auto pieces = by_area[area];
    std::sort(pieces.begin(), pieces.end(), longer_first);
    std::vector<bool> taken(pieces.size(), false);
    for (std::size_t r = 0; r < pieces.size(); ++r) {
      if (taken[r]) continue;
      const HomogeneousLine ref = line_through(pieces[r]);
      std::vector<Segment> cluster;
      for (std::size_t i = r; i < pieces.size(); ++i) {
        if (taken[i]) continue;
        if (std::abs(ref.signed_distance(pieces[i].midpoint())) < areas.merge_thresholds[area]) {
          taken[i] = true;
          cluster.push_back(pieces[i]);
        }
      }
      if (auto m = span_of(cluster)) merged[area].push_back(*m);
    }
  }

  // (5): chain across neighbouring areas, closest pairs first
  std::vector<std::vector<Segment>> chains;
  std::vector<int> tail_area;
  for (int area = 0; area < 3; ++area) {
    const auto& cands = merged[area];
    std::vector<std::tuple<double, std::size_t, std::size_t>> pairs;
    for (std::size_t c = 0; c < chains.size(); ++c) {
      if (tail_area[c] != area - 1) continue;
      for (std::size_t k = 0; k < cands.size(); ++k) {
        const double d = endpoint_distance(chains[c].back(), cands[k]);
        if (d < areas.join_threshold) pairs.emplace_back(d, c, k);
      }
    }
    std::sort(pairs.begin(), pairs.end());
    std::vector<bool> chain_used(chains.size(), false);
    std::vector<bool> cand_used(cands.size(), false);
    for (const auto& [d, c, k] : pairs) {
      if (chain_used[c] || cand_used[k]) continue;
      chain_used[c] = cand_used[k] = true;
      chains[c].push_back(cands[k]);
      tail_area[c] = area;
    }
    for (std::size_t k = 0; k < cands.size(); ++k) {
      if (cand_used[k]) continue;
      chains.push_back({cands[k]});
      tail_area.push_back(area);
    }
  }

  std::vector<Segment> out;
  for (const auto& chain : chains) {
    if (auto s = span_of(chain)) out.push_back(*s);
  }
  std::stable_sort(out.begin(), out.end(), nearer_first);
  return out;
}

std::pair<Segment, Segment> select_verticals(const std::vector<Segment>& verticals, double group_tolerance) {
  auto sorted = verticals;
  std::sort(sorted.begin(), sorted.end(), [](const Segment& a, const Segment& b) {
    const double la = a.length();
    const double lb = b.length();
    if (la != lb) return la > lb;
    return a.midpoint().x < b.midpoint().x;
  });
  // representatives are the first (longest) member of each cluster
  std::vector<Segment> reps;
  for (const auto& s : sorted) {
    const double angle = segment_angle(s);
    const bool joins = std::any_of(reps.begin(), reps.end(), [&](const Segment& r) {
      return angle_distance(angle, segment_angle(r)) <= group_tolerance;
    });
    if (!joins) reps.push_back(s);
  }
  if (reps.size() < 2) {
    throw Error(ErrorCode::InsufficientVerticals,
                "need two vertical clusters, found " + std::to_string(reps.size()));
  }
  const auto by_x = [](const Segment& a, const Segment& b) { return a.midpoint().x < b.midpoint().x; };
  const auto [lo, hi] = std::minmax_element(reps.begin(), reps.end(), by_x);
  return {*lo, *hi};
}

VanishingPoint vanishing_point(const Segment& left, const Segment& right) {
  const auto p = intersect(line_through(left), line_through(right));
  if (!p) throw Error(ErrorCode::NoVanishingPoint, "vertical lines are parallel");
  return {*p};
}

namespace {

/// Moves whichever endpoint of s lies within tolerance of x onto x.
Segment snap_endpoint(const Segment& s, const PixelPoint& x, double tolerance) {
  const double d1 = (s.p1().vec() - x.vec()).norm();
  const double d2 = (s.p2().vec() - x.vec()).norm();
  if (std::min(d1, d2) > tolerance) return s;
  try {
    return d1 <= d2 ? Segment(x, s.p2()) : Segment(s.p1(), x);
  } catch (const Error&) {
    return s;  // would collapse the segment
  }
}

}  // namespace

void snap_corners(TrackLines& lines, double tolerance) {
  const HomogeneousLine verticals[] = {line_through(lines.vertical_left), line_through(lines.vertical_right)};
  std::vector<PixelPoint> corners;
  for (auto& h : lines.horizontals) {
    const HomogeneousLine lh = line_through(h);
    for (const auto& v : verticals) {
      if (const auto x = intersect(lh, v)) {
        h = snap_endpoint(h, *x, tolerance);
        corners.push_back(*x);
      }
    }
  }
  for (const auto& x : corners) {
    lines.vertical_left = snap_endpoint(lines.vertical_left, x, tolerance);
    lines.vertical_right = snap_endpoint(lines.vertical_right, x, tolerance);
  }
}

TrackLines extract_track_lines(const std::vector<Segment>& segments, const LineParams& params) {
  const auto classes = classify(segments, params.classify);
  auto horizontals = group_horizontals(classes.horizontal, params.areas);
  auto [left, right] = select_verticals(classes.vertical, params.vertical_group_tolerance);
  TrackLines lines{std::move(horizontals), left, right};
  if (params.corner_snap_px > 0.0) snap_corners(lines, params.corner_snap_px);
  return lines;
}

}  // namespace trackstride
