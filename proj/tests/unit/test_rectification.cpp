#include "support/fixtures.hpp"

#include "trackstride/error.hpp"
#include "trackstride/rectification.hpp"
#include "trackstride/synthetic.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

namespace ts = trackstride;
using ts::Correspondence;
using ts::Homography;
using ts::PixelPoint;
using ts::WorldPoint;

namespace {

std::vector<Correspondence> through(const Eigen::Matrix3d& h, const Eigen::Matrix2Xd& pts) {
  std::vector<Correspondence> out;
  for (Eigen::Index i = 0; i < pts.cols(); ++i) {
    out.push_back({PixelPoint::from(pts.col(i)), WorldPoint::from(fixtures::project(h, pts.col(i)))});
  }
  return out;
}

std::vector<Correspondence> unit_square_to(double s) {
  return {{{0, 0}, {0, 0}}, {{1, 0}, {s, 0}}, {{1, 1}, {s, s}}, {{0, 1}, {0, s}}};
}

/// Frobenius-normalized with the sign of the entry of largest magnitude made positive.
Eigen::Matrix3d aligned(const Eigen::Matrix3d& m) {
  Eigen::Index r, c;
  m.cwiseAbs().maxCoeff(&r, &c);
  return m / m.norm() * (m(r, c) < 0 ? -1.0 : 1.0);
}

ts::ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const ts::Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ts::ErrorCode::IoError;
}

}  // namespace

TEST(Homography, CanonicalForm) {
  const Homography h(Eigen::Matrix3d::Identity() * -4.0);
  EXPECT_NEAR(h.matrix().norm(), 1.0, 1e-15);
  EXPECT_GT(h(2, 2), 0.0);
  EXPECT_EQ(code_of([] { Homography(Eigen::Matrix3d::Zero()); }), ts::ErrorCode::RankDeficient);
  Eigen::Matrix3d singular = Eigen::Matrix3d::Identity();
  singular(1, 1) = 0;
  EXPECT_EQ(code_of([&] { Homography{singular}; }), ts::ErrorCode::RankDeficient);
}

TEST(Dlt, UnitSquareToItselfIsIdentity) {
  const auto corrs = unit_square_to(1.0);
  const Homography h = ts::dlt_homography(corrs);
  EXPECT_LT((h.matrix() - Eigen::Matrix3d::Identity() / std::sqrt(3.0)).cwiseAbs().maxCoeff(), 1e-9);
  EXPECT_LT(ts::reprojection_error(h, corrs), 1e-9);
}

TEST(Dlt, ScaledSquareIsDiagonal) {
  const Homography h = ts::dlt_homography(unit_square_to(2.0));
  Eigen::Matrix3d expected = Eigen::Vector3d(2, 2, 1).asDiagonal();
  expected /= expected.norm();
  EXPECT_LT((h.matrix() - expected).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(Dlt, RecoversRandomHomographyFromFourPoints) {
  fixtures::Rng rng(40);
  for (int i = 0; i < 500; ++i) {
    const Eigen::Matrix3d truth = fixtures::random_homography(rng);
    const Homography h = ts::dlt_homography(through(truth, fixtures::spread_quad(rng)));
    EXPECT_LT((aligned(h.matrix()) - aligned(truth)).cwiseAbs().maxCoeff(), 1e-7) << i;
  }
}

TEST(Dlt, HeldOutPointsReproject) {
  fixtures::Rng rng(41);
  for (int i = 0; i < 200; ++i) {
    const Eigen::Matrix3d truth = fixtures::random_homography(rng);
    const Homography h = ts::dlt_homography(through(truth, fixtures::spread_quad(rng)));
    Eigen::Matrix2Xd fresh(2, 100);
    for (int k = 0; k < 100; ++k) fresh.col(k) = fixtures::random_point(rng);
    EXPECT_LT(ts::reprojection_error(h, through(truth, fresh)), 1e-6);
  }
}

TEST(Dlt, OverdeterminedExactFit) {
  fixtures::Rng rng(42);
  for (int i = 0; i < 100; ++i) {
    const Eigen::Matrix3d truth = fixtures::random_homography(rng);
    Eigen::Matrix2Xd pts(2, 12);
    pts.leftCols<4>() = fixtures::spread_quad(rng);
    for (int k = 4; k < 12; ++k) pts.col(k) = fixtures::random_point(rng);
    const auto corrs = through(truth, pts);
    EXPECT_LT(ts::reprojection_error(ts::dlt_homography(corrs), corrs), 1e-9);
  }
}

TEST(Dlt, InvariantUnderUniformImageScaling) {
  fixtures::Rng rng(43);
  for (int i = 0; i < 200; ++i) {
    const Eigen::Matrix3d truth = fixtures::random_homography(rng);
    const Eigen::Matrix<double, 2, 4> quad = fixtures::spread_quad(rng);
    const double s = rng.uniform(0.1, 10);
    auto corrs = through(truth, quad);
    auto scaled = corrs;
    for (auto& c : scaled) c.image = PixelPoint::from(s * c.image.vec());
    const Homography a = ts::dlt_homography(corrs);
    const Homography b = ts::dlt_homography(scaled);
    // b must equal a composed with the inverse scaling
    const Eigen::Matrix3d undo = Eigen::Vector3d(1 / s, 1 / s, 1).asDiagonal();
    EXPECT_LT((aligned(b.matrix()) - aligned(a.matrix() * undo)).cwiseAbs().maxCoeff(), 1e-8) << i;
  }
}

TEST(Dlt, DegenerateInputs) {
  std::vector<Correspondence> three = unit_square_to(1.0);
  three.pop_back();
  EXPECT_EQ(code_of([&] { ts::dlt_homography(three); }), ts::ErrorCode::DegenerateConfiguration);

  const std::vector<Correspondence> collinear{{{0, 0}, {0, 0}}, {{1, 1}, {1, 0}}, {{2, 2}, {2, 0}}, {{0, 5}, {0, 1}}};
  EXPECT_EQ(code_of([&] { ts::dlt_homography(collinear); }), ts::ErrorCode::DegenerateConfiguration);
}

TEST(Dlt, TemplatedOnScalar) {
  Eigen::Matrix<float, 2, Eigen::Dynamic> src(2, 4), dst(2, 4);
  src << 0, 1, 1, 0, 0, 0, 1, 1;
  dst = 3.0f * src;
  const auto h = ts::dlt_homography<float>(src, dst);
  EXPECT_NEAR(h.map(Eigen::Vector2f(0.5f, 0.25f)).x(), 1.5f, 1e-4f);
  EXPECT_NEAR(h.map(Eigen::Vector2f(0.5f, 0.25f)).y(), 0.75f, 1e-4f);
}

TEST(Apply, Examples) {
  const WorldPoint a = ts::apply(Homography::identity(), {3, 4});
  EXPECT_DOUBLE_EQ(a.x, 3);
  EXPECT_DOUBLE_EQ(a.y, 4);
  const WorldPoint b = ts::apply(Homography(Eigen::Vector3d(2, 2, 1).asDiagonal()), {3, 4});
  EXPECT_NEAR(b.x, 6, 1e-12);
  EXPECT_NEAR(b.y, 8, 1e-12);
}

TEST(Apply, VanishingPointGoesToInfinity) {
  const auto scene = ts::render_scene(ts::SceneSpec::defaults());
  ASSERT_TRUE(scene.truth.vp);
  const Homography image_to_world = scene.truth.truth_h.inverse();
  EXPECT_EQ(code_of([&] { ts::apply(image_to_world, scene.truth.vp->p); }), ts::ErrorCode::PointAtInfinity);
}

TEST(Apply, InverseRoundTrip) {
  fixtures::Rng rng(44);
  for (int i = 0; i < 200; ++i) {
    const Homography h(fixtures::random_homography(rng));
    const PixelPoint p = PixelPoint::from(fixtures::random_point(rng));
    const PixelPoint back = ts::apply_inverse(h, ts::apply(h, p));
    EXPECT_NEAR(back.x, p.x, 1e-6);
    EXPECT_NEAR(back.y, p.y, 1e-6);
  }
}

TEST(Apply, CollinearityPreserved) {
  fixtures::Rng rng(45);
  for (int i = 0; i < 500; ++i) {
    const Homography h(fixtures::random_homography(rng));
    const Eigen::Vector2d a = fixtures::random_point(rng), b = fixtures::random_point(rng);
    if ((a - b).norm() < 10) continue;
    const Eigen::Vector2d c = a + rng.uniform(-1, 2) * (b - a);
    const Eigen::Vector2d wa = ts::apply(h, PixelPoint::from(a)).vec();
    const Eigen::Vector2d wb = ts::apply(h, PixelPoint::from(b)).vec();
    const Eigen::Vector2d wc = ts::apply(h, PixelPoint::from(c)).vec();
    const Eigen::Vector2d u = wb - wa, v = wc - wa;
    // distance of wc from the line wa-wb
    EXPECT_LT(std::abs(u.x() * v.y() - u.y() * v.x()) / u.norm(), 1e-9 * (1 + v.norm())) << i;
  }
}

TEST(FrameHomographies, RecoverSyntheticTruth) {
  const auto spec = ts::SceneSpec::defaults();
  const auto scene = ts::render_scene(spec);
  const auto pairs = ts::frame_homographies(scene.truth.lines, spec.world);
  ASSERT_EQ(pairs.size(), 3u);
  const Homography truth = spec.truth_h;
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    EXPECT_EQ(pairs[k].pair_id, static_cast<int>(k));
    for (const auto& c : pairs[k].corners) {
      const PixelPoint back = ts::apply_inverse(pairs[k].h, c.world);
      const PixelPoint expected = PixelPoint::from(truth.map(c.world.vec()));
      EXPECT_LT((back.vec() - expected.vec()).norm(), 0.5);
    }
  }
}

TEST(FrameHomographies, CornersUseWorldModel) {
  const auto spec = ts::SceneSpec::defaults();
  const auto scene = ts::render_scene(spec);
  const auto pairs = ts::frame_homographies(scene.truth.lines, spec.world);
  ASSERT_EQ(pairs.size(), 3u);
  const auto& w = spec.world;
  for (const auto& p : pairs) {
    const auto [near, far] = ts::kLinePairs[p.pair_id];
    std::vector<WorldPoint> world;
    for (const auto& c : p.corners) world.push_back(c.world);
    for (const WorldPoint expected : {WorldPoint{0, w.horizontal_spacing_m[near]}, WorldPoint{w.lane_width_m, w.horizontal_spacing_m[near]},
                                      WorldPoint{0, w.horizontal_spacing_m[far]}, WorldPoint{w.lane_width_m, w.horizontal_spacing_m[far]}}) {
      EXPECT_NE(std::find(world.begin(), world.end(), expected), world.end());
    }
  }
}

TEST(FrameHomographies, ThreeHorizontalsGiveFirstTwoPairs) {
  const auto spec = ts::SceneSpec::defaults();
  auto lines = ts::render_scene(spec).truth.lines;
  lines.horizontals.resize(3);
  const auto pairs = ts::frame_homographies(lines, spec.world);
  ASSERT_EQ(pairs.size(), 2u);
  EXPECT_EQ(pairs[0].pair_id, 0);
  EXPECT_EQ(pairs[1].pair_id, 1);
}

TEST(FrameHomographies, ParallelVerticalsGiveNoValidPair) {
  const ts::WorldModel world{1.0, {0, 1, 2, 3, 4}};
  ts::TrackLines lines;
  // the two verticals coincide as lines: no quadrilateral
  lines.vertical_left = ts::Segment({100, 100}, {100, 600});
  lines.vertical_right = ts::Segment({100, 650}, {100, 700});
  for (int k = 0; k < 5; ++k) lines.horizontals.emplace_back(PixelPoint{50, 600.0 - 100 * k}, PixelPoint{900, 600.0 - 100 * k});
  EXPECT_EQ(code_of([&] { ts::frame_homographies(lines, world); }), ts::ErrorCode::NoValidPair);
}

TEST(Median, SingleAndRepeated) {
  fixtures::Rng rng(46);
  const Homography h(fixtures::random_homography(rng));
  const std::vector<Homography> one{h};
  EXPECT_TRUE(ts::median_homography(one).matrix().isApprox(h.matrix(), 1e-15));
  const std::vector<Homography> three{h, h, h};
  EXPECT_TRUE(ts::median_homography(three).matrix().isApprox(h.matrix(), 1e-15));
  EXPECT_EQ(code_of([] { ts::median_homography({}); }), ts::ErrorCode::EmptyList);
}

TEST(Median, IgnoresFortyPercentOutliers) {
  fixtures::Rng rng(47);
  for (int i = 0; i < 100; ++i) {
    const Homography truth(fixtures::random_homography(rng));
    std::vector<Homography> hs(7, truth);
    for (int k = 0; k < 3; ++k) {
      Eigen::Matrix3d m = truth.matrix();
      for (int e = 0; e < 9; ++e) m(e / 3, e % 3) *= 10.0 * rng.uniform(0.5, 2.0) * (rng.below(2) ? 1 : -1);
      try {
        hs.emplace_back(m);
      } catch (const ts::Error&) {
        hs.emplace_back(fixtures::random_homography(rng));
      }
    }
    for (std::size_t k = hs.size() - 1; k > 0; --k) std::swap(hs[k], hs[rng.below(k + 1)]);
    const Homography med = ts::median_homography(hs);
    EXPECT_LT((med.matrix() - truth.matrix()).cwiseAbs().maxCoeff(), 1e-6) << i;
  }
}

TEST(Median, FlipsOppositeSigns) {
  fixtures::Rng rng(48);
  const Homography h(fixtures::random_homography(rng));
  // canonical form removes the sign, so the median of h and h is h regardless of input sign
  const std::vector<Homography> hs{h, Homography(-h.matrix()), Homography(-3.0 * h.matrix())};
  EXPECT_TRUE(ts::median_homography(hs).matrix().isApprox(h.matrix(), 1e-12));
}

TEST(Median, PermutationInvariant) {
  fixtures::Rng rng(49);
  for (int i = 0; i < 100; ++i) {
    std::vector<Homography> hs;
    const int n = 1 + static_cast<int>(rng.below(9));
    for (int k = 0; k < n; ++k) hs.emplace_back(fixtures::random_homography(rng));
    auto shuffled = hs;
    for (std::size_t k = shuffled.size() - 1; k > 0; --k) std::swap(shuffled[k], shuffled[rng.below(k + 1)]);
    EXPECT_EQ(ts::median_homography(hs).matrix(), ts::median_homography(shuffled).matrix());
  }
}

TEST(Median, LowerMedianForEvenCount) {
  const Homography a(Eigen::Vector3d(1, 1, 1).asDiagonal());
  const Homography b(Eigen::Vector3d(1, 2, 1).asDiagonal());
  const std::vector<Homography> hs{b, a};
  // entries of the canonical a and b: lower median picks the smaller of each pair
  Eigen::Matrix3d expected = a.matrix().cwiseMin(b.matrix());
  expected /= expected.norm();
  EXPECT_TRUE(ts::median_homography(hs).matrix().isApprox(expected, 1e-12));
}

TEST(ReprojectionError, Examples) {
  const std::vector<Correspondence> same{{{0, 0}, {0, 0}}, {{5, 1}, {5, 1}}, {{2, 7}, {2, 7}}};
  EXPECT_NEAR(ts::reprojection_error(Homography::identity(), same), 0.0, 1e-12);

  auto corrs = unit_square_to(1.0);
  corrs[2].world.x += 0.1;
  EXPECT_NEAR(ts::reprojection_error(Homography::identity(), corrs), std::sqrt(0.1 * 0.1 / 4), 1e-12);
  EXPECT_EQ(code_of([] { ts::reprojection_error(Homography::identity(), {}); }), ts::ErrorCode::EmptyList);
}

TEST(WorldModel, Validation) {
  EXPECT_NO_THROW(ts::WorldModel{}.validate());
  EXPECT_THROW((ts::WorldModel{0.0, {0, 1}}).validate(), ts::Error);
  EXPECT_THROW((ts::WorldModel{1.0, {0.5, 1}}).validate(), ts::Error);
  EXPECT_THROW((ts::WorldModel{1.0, {0, 2, 2}}).validate(), ts::Error);
  EXPECT_THROW((ts::WorldModel{1.0, {0, 2, 1}}).validate(), ts::Error);
}
