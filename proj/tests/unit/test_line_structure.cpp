#include "support/fixtures.hpp"

#include "trackstride/error.hpp"
#include "trackstride/hough.hpp"
#include "trackstride/line_structure.hpp"
#include "trackstride/synthetic.hpp"

#include <gtest/gtest.h>

#include <cmath>

namespace ts = trackstride;
using ts::PixelPoint;
using ts::Segment;

namespace {

Segment at_angle(PixelPoint centre, double deg, double length) {
  const double r = deg * M_PI / 180.0;
  const Eigen::Vector2d d(std::cos(r) * length / 2, std::sin(r) * length / 2);
  return Segment(PixelPoint::from(centre.vec() - d), PixelPoint::from(centre.vec() + d));
}

double rms_to_line(const Segment& s, const Segment& truth) {
  const auto l = ts::line_through(truth);
  double sum = 0.0;
  const int n = 50;
  for (int k = 0; k <= n; ++k) {
    const Eigen::Vector2d p = s.p1().vec() + (s.p2().vec() - s.p1().vec()) * (double(k) / n);
    sum += std::pow(l.signed_distance(PixelPoint::from(p)), 2);
  }
  return std::sqrt(sum / (n + 1));
}

const ts::AreaConfig kAreas = ts::AreaConfig::defaults(1280, 720);

}  // namespace

TEST(Classify, Examples) {
  const auto c = ts::classify({at_angle({600, 400}, 3, 100), at_angle({300, 400}, 88, 100), at_angle({900, 400}, 30, 100)});
  ASSERT_EQ(c.horizontal.size(), 1u);
  ASSERT_EQ(c.vertical.size(), 1u);
  ASSERT_EQ(c.rejected.size(), 1u);
  EXPECT_NEAR(ts::segment_angle(c.horizontal[0]), 3, 1e-9);
  EXPECT_NEAR(ts::segment_angle(c.vertical[0]), 88, 1e-9);
  EXPECT_NEAR(ts::segment_angle(c.rejected[0]), 30, 1e-9);
}

TEST(Classify, NearBaseAngleIsNotVertical) {
  // band wide enough to admit everything, so only the base-angle rule can reject
  ts::ClassifyParams p;
  p.horizontal_tolerance = 5;
  p.vertical_band = 90;
  const auto c = ts::classify({at_angle({0, 0}, 0, 50), at_angle({0, 0}, 1, 50), at_angle({0, 0}, 6.5, 50),
                               at_angle({0, 0}, 1.5, 50)},
                              p);
  EXPECT_EQ(c.horizontal.size(), 3u);
  EXPECT_EQ(c.vertical.size(), 1u);  // 6.5 deg is more than 2 deg away from the base of 1 deg
}

TEST(Classify, Partitions) {
  fixtures::Rng rng(30);
  for (int i = 0; i < 200; ++i) {
    std::vector<Segment> in;
    const int n = static_cast<int>(rng.below(40));
    for (int k = 0; k < n; ++k) in.push_back(at_angle({rng.uniform(0, 1280), rng.uniform(0, 720)}, rng.uniform(-90, 90), rng.uniform(5, 300)));
    const auto c = ts::classify(in);
    EXPECT_EQ(c.horizontal.size() + c.vertical.size() + c.rejected.size(), in.size());
  }
}

TEST(BaseAngle, MedianOrZero) {
  EXPECT_EQ(ts::base_angle({}), 0.0);
  EXPECT_NEAR(ts::base_angle({at_angle({0, 0}, -2, 10), at_angle({0, 0}, 5, 10), at_angle({0, 0}, 1, 10)}), 1.0, 1e-9);
}

TEST(GroupHorizontals, CleanFullWidthSegmentIsUnchanged) {
  const Segment s({100, 500}, {1180, 505});
  const auto out = ts::group_horizontals({s}, kAreas);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_NEAR(out[0].p1().x, 100, 1e-9);
  EXPECT_NEAR(out[0].p1().y, 500, 1e-9);
  EXPECT_NEAR(out[0].p2().x, 1180, 1e-9);
  EXPECT_NEAR(out[0].p2().y, 505, 1e-9);
}

TEST(GroupHorizontals, CollinearHalvesWithSmallGapMerge) {
  ts::AreaConfig areas = kAreas;
  areas.join_threshold = 20;
  const auto out = ts::group_horizontals({Segment({100, 400}, {637, 400}), Segment({642, 400}, {1180, 400})}, areas);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_DOUBLE_EQ(out[0].min_x(), 100);
  EXPECT_DOUBLE_EQ(out[0].max_x(), 1180);
}

TEST(GroupHorizontals, WideGapsStaySplit) {
  ts::AreaConfig areas = kAreas;
  areas.join_threshold = 20;
  const auto out = ts::group_horizontals({Segment({100, 400}, {400, 400}), Segment({500, 400}, {800, 400})}, areas);
  EXPECT_EQ(out.size(), 2u);
}

TEST(GroupHorizontals, FragmentedLaneLinesRegroup) {
  const auto scene = ts::render_scene(ts::SceneSpec::defaults());
  const auto& truth = scene.truth.lines.horizontals;
  fixtures::Rng rng(31);
  std::vector<Segment> fragments;
  for (const auto& t : truth) {
    // six pieces separated by small holes, each nudged off the line
    const Eigen::Vector2d a = t.p1().vec(), d = t.p2().vec() - a;
    for (int k = 0; k < 6; ++k) {
      const double u0 = k / 6.0 + 0.004, u1 = (k + 1) / 6.0 - 0.004;
      const Eigen::Vector2d j0(0, rng.uniform(-0.5, 0.5)), j1(0, rng.uniform(-0.5, 0.5));
      fragments.emplace_back(PixelPoint::from(a + u0 * d + j0), PixelPoint::from(a + u1 * d + j1));
    }
  }
  for (std::size_t i = fragments.size() - 1; i > 0; --i) std::swap(fragments[i], fragments[rng.below(i + 1)]);
  ASSERT_EQ(fragments.size(), 30u);
  const auto out = ts::group_horizontals(fragments, kAreas);
  ASSERT_EQ(out.size(), 5u);
  for (int k = 0; k < 5; ++k) {
    EXPECT_LT(rms_to_line(out[k], truth[k]), 3.0) << k;
    EXPECT_NEAR(out[k].min_x(), truth[k].min_x(), 10.0);
    EXPECT_NEAR(out[k].max_x(), truth[k].max_x(), 10.0);
  }
}

TEST(GroupHorizontals, NearestFirstAndNeverGrows) {
  fixtures::Rng rng(32);
  for (int i = 0; i < 200; ++i) {
    std::vector<Segment> in;
    const int n = 1 + static_cast<int>(rng.below(30));
    for (int k = 0; k < n; ++k) in.push_back(at_angle({rng.uniform(50, 1230), rng.uniform(50, 670)}, rng.uniform(-8, 8), rng.uniform(20, 400)));
    const auto out = ts::group_horizontals(in, kAreas);
    EXPECT_LE(out.size(), in.size() * 3);  // a segment can be cut into at most three pieces
    for (std::size_t k = 1; k < out.size(); ++k) EXPECT_GE(out[k - 1].midpoint().y, out[k].midpoint().y);
  }
}

TEST(GroupHorizontals, OutputNoLargerThanInputForSingleAreaPieces) {
  fixtures::Rng rng(33);
  for (int i = 0; i < 200; ++i) {
    std::vector<Segment> in;
    const int n = 1 + static_cast<int>(rng.below(30));
    for (int k = 0; k < n; ++k) {
      const int area = static_cast<int>(rng.below(3));
      const double x0 = 1280.0 / 3 * area + 5, x1 = 1280.0 / 3 * (area + 1) - 5;
      const double a = rng.uniform(x0, x1 - 10), b = rng.uniform(a + 5, x1);
      const double y = rng.uniform(50, 670);
      in.emplace_back(PixelPoint{a, y}, PixelPoint{b, y + rng.uniform(-1, 1)});
    }
    EXPECT_LE(ts::group_horizontals(in, kAreas).size(), in.size());
  }
}

TEST(GroupHorizontals, TranslationEquivariantInY) {
  fixtures::Rng rng(34);
  for (int i = 0; i < 100; ++i) {
    std::vector<Segment> in, shifted;
    const double dy = std::round(rng.uniform(-40, 40));
    const int n = 1 + static_cast<int>(rng.below(20));
    for (int k = 0; k < n; ++k) {
      const Segment s = at_angle({std::round(rng.uniform(100, 1180)), std::round(rng.uniform(80, 640))},
                                 rng.uniform(-5, 5), rng.uniform(20, 300));
      in.push_back(s);
      shifted.emplace_back(PixelPoint{s.p1().x, s.p1().y + dy}, PixelPoint{s.p2().x, s.p2().y + dy});
    }
    const auto a = ts::group_horizontals(in, kAreas);
    const auto b = ts::group_horizontals(shifted, kAreas);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t k = 0; k < a.size(); ++k) {
      EXPECT_NEAR(b[k].p1().x, a[k].p1().x, 1e-6);
      EXPECT_NEAR(b[k].p1().y, a[k].p1().y + dy, 1e-6);
      EXPECT_NEAR(b[k].p2().x, a[k].p2().x, 1e-6);
      EXPECT_NEAR(b[k].p2().y, a[k].p2().y + dy, 1e-6);
    }
  }
}

TEST(GroupHorizontals, EmptyInputThrows) {
  try {
    ts::group_horizontals({}, kAreas);
    FAIL();
  } catch (const ts::Error& e) {
    EXPECT_EQ(e.code(), ts::ErrorCode::EmptyInput);
  }
}

TEST(AreaConfig, DefaultsScaleWithFrame) {
  const auto a = ts::AreaConfig::defaults(1280, 720);
  EXPECT_DOUBLE_EQ(a.boundaries[0], 1280 / 3.0);
  EXPECT_DOUBLE_EQ(a.boundaries[1], 2 * 1280 / 3.0);
  EXPECT_DOUBLE_EQ(a.merge_thresholds[0], 25);
  EXPECT_DOUBLE_EQ(a.merge_thresholds[1], 15);
  EXPECT_DOUBLE_EQ(a.merge_thresholds[2], 8);
  const auto b = ts::AreaConfig::defaults(1920, 1080);
  EXPECT_DOUBLE_EQ(b.merge_thresholds[0], 37.5);
  EXPECT_NO_THROW(a.validate(1280));
  auto bad = a;
  bad.boundaries = {900, 400};
  EXPECT_THROW(bad.validate(1280), ts::Error);
}

TEST(SelectVerticals, TwoSegmentsComeBackLeftRight) {
  const Segment right = at_angle({1000, 400}, -66, 300);
  const Segment left = at_angle({250, 400}, 66, 300);
  const auto [l, r] = ts::select_verticals({right, left});
  EXPECT_EQ(l, left);
  EXPECT_EQ(r, right);
}

TEST(SelectVerticals, LongestRepresentsItsCluster) {
  const Segment a = at_angle({200, 400}, 70, 50), b = at_angle({230, 400}, 72, 80), c = at_angle({260, 400}, 74, 60);
  const Segment other = at_angle({1000, 400}, -70, 100);
  const auto [l, r] = ts::select_verticals({a, b, c, other});
  EXPECT_EQ(l, b);
  EXPECT_EQ(r, other);
}

TEST(SelectVerticals, OneVerticalIsNotEnough) {
  try {
    ts::select_verticals({at_angle({200, 400}, 70, 50)});
    FAIL();
  } catch (const ts::Error& e) {
    EXPECT_EQ(e.code(), ts::ErrorCode::InsufficientVerticals);
  }
}

TEST(VanishingPoint, Examples) {
  // y = 700 - 3 (x - 100) and y = 700 + 3 (x - 1100), solved as a 2x2 system
  Eigen::Matrix2d a;
  a << 3, 1, -3, 1;
  const Eigen::Vector2d b(1000, -2600);
  const Eigen::Vector2d expected = a.colPivHouseholderQr().solve(b);
  ASSERT_NEAR(expected.x(), 600, 1e-9);
  ASSERT_NEAR(expected.y(), -800, 1e-9);
  const auto vp = ts::vanishing_point(Segment({100, 700}, {300, 100}), Segment({1100, 700}, {900, 100}));
  EXPECT_NEAR(vp.p.x, expected.x(), 1e-9);
  EXPECT_NEAR(vp.p.y, expected.y(), 1e-9);

  try {
    ts::vanishing_point(Segment({100, 700}, {100, 100}), Segment({900, 700}, {900, 100}));
    FAIL();
  } catch (const ts::Error& e) {
    EXPECT_EQ(e.code(), ts::ErrorCode::NoVanishingPoint);
  }

  const auto shared = ts::vanishing_point(Segment({300, 600}, {500, 50}), Segment({700, 600}, {500, 50}));
  EXPECT_NEAR(shared.p.x, 500, 1e-9);
  EXPECT_NEAR(shared.p.y, 50, 1e-9);
}

TEST(VanishingPoint, Symmetric) {
  fixtures::Rng rng(35);
  for (int i = 0; i < 500; ++i) {
    const Segment l = at_angle({rng.uniform(0, 600), rng.uniform(0, 720)}, rng.uniform(50, 89), 200);
    const Segment r = at_angle({rng.uniform(700, 1280), rng.uniform(0, 720)}, rng.uniform(-89, -50), 200);
    const auto a = ts::vanishing_point(l, r), b = ts::vanishing_point(r, l);
    EXPECT_EQ(a.p.x, b.p.x);
    EXPECT_EQ(a.p.y, b.p.y);
  }
}

TEST(SnapCorners, MovesNearbyEndpointsOntoIntersections) {
  ts::TrackLines lines{{Segment({202, 530}, {1077, 531}), Segment({330, 240}, {948, 240})},
                       Segment({200, 530}, {330, 240}),
                       Segment({1080, 530}, {950, 240})};
  const auto near_corner = ts::intersect(ts::line_through(lines.horizontals[0]), ts::line_through(lines.vertical_left));
  ts::snap_corners(lines, 5.0);
  EXPECT_NEAR(lines.horizontals[0].p1().x, near_corner->x, 1e-9);
  EXPECT_NEAR(lines.horizontals[0].p1().y, near_corner->y, 1e-9);
  for (const auto& h : lines.horizontals) {
    for (const auto& v : {lines.vertical_left, lines.vertical_right}) {
      const auto x = ts::intersect(ts::line_through(h), ts::line_through(v));
      EXPECT_LT(ts::endpoint_distance(h, Segment(*x, {x->x + 1, x->y})), 1e-6);
    }
  }

  ts::TrackLines far{{Segment({100, 530}, {1180, 531})}, Segment({200, 530}, {330, 240}),
                     Segment({1080, 530}, {950, 240})};
  const auto before = far.horizontals[0];
  ts::snap_corners(far, 5.0);
  EXPECT_EQ(far.horizontals[0], before);
}

TEST(ExtractTrackLines, NoiselessScenesGiveExactStructure) {
  fixtures::Rng rng(36);
  for (int i = 0; i < 25; ++i) {
    const auto spec = fixtures::random_scene(rng, 600 + i, 0.0, 0.0);
    const auto scene = ts::render_scene(spec);
    ts::LineParams params;
    params.areas = ts::AreaConfig::defaults(spec.width, spec.height);
    const auto lines = ts::extract_track_lines(ts::probabilistic_hough(scene.edges, {}), params);
    EXPECT_EQ(lines.horizontals.size(), scene.truth.lines.horizontals.size()) << i;
    const auto vp = ts::vanishing_point(lines.vertical_left, lines.vertical_right);
    EXPECT_LT((vp.p.vec() - scene.truth.vp->p.vec()).norm(), 1.0) << i;
  }
}
