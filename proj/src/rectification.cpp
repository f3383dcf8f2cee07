#include "trackstride/rectification.hpp"

#include <algorithm>
#include <cmath>

namespace trackstride {

void WorldModel::validate() const {
  if (!(lane_width_m > 0.0)) throw Error(ErrorCode::ConfigError, "lane_width_m must be > 0");
  if (horizontal_spacing_m.empty() || horizontal_spacing_m.front() != 0.0) {
    throw Error(ErrorCode::ConfigError, "horizontal spacing must start at 0");
  }
  for (std::size_t i = 1; i < horizontal_spacing_m.size(); ++i) {
    if (!(horizontal_spacing_m[i] > horizontal_spacing_m[i - 1])) {
      throw Error(ErrorCode::ConfigError, "horizontal spacing must be strictly increasing");
    }
  }
}

Homography dlt_homography(std::span<const Correspondence> corrs) {
  Eigen::Matrix2Xd src(2, corrs.size());
  Eigen::Matrix2Xd dst(2, corrs.size());
  for (std::size_t i = 0; i < corrs.size(); ++i) {
    src.col(static_cast<Eigen::Index>(i)) = corrs[i].image.vec();
    dst.col(static_cast<Eigen::Index>(i)) = corrs[i].world.vec();
  }
  return dlt_homography<double>(src, dst);
}

WorldPoint apply(const Homography& h, const PixelPoint& p) { return WorldPoint::from(h.map(p.vec())); }

PixelPoint apply_inverse(const Homography& h, const WorldPoint& p) {
  return PixelPoint::from(h.inverse().map(p.vec()));
}

std::vector<PairHomography> frame_homographies(const TrackLines& lines, const WorldModel& world) {
  const HomogeneousLine left = line_through(lines.vertical_left);
  const HomogeneousLine right = line_through(lines.vertical_right);
  const auto n = static_cast<int>(std::min(lines.horizontals.size(), world.horizontal_spacing_m.size()));

  std::vector<PairHomography> out;
  for (int pair_id = 0; pair_id < static_cast<int>(kLinePairs.size()); ++pair_id) {
    const auto [i, j] = kLinePairs[pair_id];
    if (j >= n) continue;
    std::array<Correspondence, 4> corners;
    bool ok = true;
    int k = 0;
    for (int line : {i, j}) {
      const HomogeneousLine h = line_through(lines.horizontals[line]);
      const double wy = world.horizontal_spacing_m[line];
      for (const auto& [vertical, wx] : {std::pair{left, 0.0}, std::pair{right, world.lane_width_m}}) {
        const auto p = intersect(h, vertical);
        if (!p) {
          ok = false;
          break;
        }
        corners[k++] = {*p, {wx, wy}};
      }
      if (!ok) break;
    }
    if (!ok) continue;
    try {
      out.push_back({dlt_homography(corners), pair_id, corners});
    } catch (const Error&) {
      // degenerate corners for this pair; the others may still hold
    }
  }
  if (out.empty()) throw Error(ErrorCode::NoValidPair, "no line pair produced a homography");
  return out;
}

namespace {

Eigen::Matrix3d entrywise_median(std::span<const Homography> hs, const Eigen::Matrix3d* reference) {
  std::array<std::vector<double>, 9> entries;
  for (const auto& h : hs) {
    Eigen::Matrix3d m = h.matrix();
    if (reference && (m.array() * reference->array()).sum() < 0.0) m = -m;
    for (int e = 0; e < 9; ++e) entries[e].push_back(m(e / 3, e % 3));
  }
  Eigen::Matrix3d med;
  for (int e = 0; e < 9; ++e) {
    auto& v = entries[e];
    const auto mid = v.begin() + static_cast<std::ptrdiff_t>((v.size() - 1) / 2);
    std::nth_element(v.begin(), mid, v.end());
    med(e / 3, e % 3) = *mid;
  }
  return med;
}

}  // namespace

Homography median_homography(std::span<const Homography> hs) {
  if (hs.empty()) throw Error(ErrorCode::EmptyList, "median of no homographies");
  // sign reference from the multiset itself, so input order cannot matter
  const Eigen::Matrix3d reference = entrywise_median(hs, nullptr);
  return Homography(entrywise_median(hs, &reference));
}

double reprojection_error(const Homography& h, std::span<const Correspondence> corrs) {
  if (corrs.empty()) throw Error(ErrorCode::EmptyList, "no correspondences");
  double sum = 0.0;
  for (const auto& c : corrs) sum += (apply(h, c.image).vec() - c.world.vec()).squaredNorm();
  return std::sqrt(sum / static_cast<double>(corrs.size()));
}

}  // namespace trackstride
