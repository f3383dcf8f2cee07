#include "trackstride/synthetic.hpp"

#include "trackstride/error.hpp"
#include "trackstride/random.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace trackstride {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

Eigen::Vector2d project(const Homography& h, const Eigen::Vector2d& world) {
  const Eigen::Vector3d q = h.matrix() * world.homogeneous();
  if (!(q.z() > 0.0)) throw Error(ErrorCode::SpecError, "reference line passes behind the camera");
  return q.hnormalized();
}

/// One pixel per step along the major axis, nearest to the exact segment.
/// Equals Bresenham for integer endpoints but keeps sub-pixel endpoint
/// positions instead of rounding them first.
std::vector<Eigen::Vector2i> raster_segment(const Segment& s) {
  const Eigen::Vector2d a = s.p1().vec();
  const Eigen::Vector2d b = s.p2().vec();
  const Eigen::Vector2d d = b - a;
  const int major = std::abs(d.x()) >= std::abs(d.y()) ? 0 : 1;
  const int minor = 1 - major;
  long lo = std::lround(std::min(a[major], b[major]));
  long hi = std::lround(std::max(a[major], b[major]));
  std::vector<Eigen::Vector2i> out;
  for (long m = lo; m <= hi; ++m) {
    const double t = std::clamp((m - a[major]) / d[major], 0.0, 1.0);
    Eigen::Vector2i p;
    p[major] = static_cast<int>(m);
    p[minor] = static_cast<int>(std::lround(a[minor] + t * d[minor]));
    out.push_back(p);
  }
  return out;
}

}  // namespace

Homography camera_homography(const CameraSpec& camera, const WorldModel& world, int width, int height) {
  world.validate();
  const double far = world.horizontal_spacing_m.back();
  const double pitch = camera.pitch_deg
                           ? *camera.pitch_deg * kDeg
                           : std::atan2(camera.height_m, camera.distance_m + 0.5 * far);
  const Eigen::Vector3d centre(camera.x_m.value_or(0.5 * world.lane_width_m), -camera.distance_m,
                               camera.height_m);

  // rows: image right, image down, optical axis
  Eigen::Matrix3d look;
  look << 1.0, 0.0, 0.0,
          0.0, -std::sin(pitch), -std::cos(pitch),
          0.0, std::cos(pitch), -std::sin(pitch);
  const Eigen::Matrix3d r = Eigen::AngleAxisd(camera.roll_deg * kDeg, Eigen::Vector3d::UnitZ()).toRotationMatrix() *
                            look *
                            Eigen::AngleAxisd(-camera.yaw_deg * kDeg, Eigen::Vector3d::UnitZ()).toRotationMatrix();
  Eigen::Matrix3d k;
  k << camera.focal_px, 0.0, width / 2.0, 0.0, camera.focal_px, height / 2.0, 0.0, 0.0, 1.0;
  Eigen::Matrix3d rt;
  rt << r.col(0), r.col(1), -r * centre;
  return Homography(k * rt);
}

SceneSpec SceneSpec::defaults() {
  SceneSpec s;
  s.world.lane_width_m = 8.0;
  s.world.horizontal_spacing_m = {0.0, 1.22, 2.44, 3.66, 4.88};
  s.truth_h = camera_homography(CameraSpec{}, s.world, s.width, s.height);
  return s;
}

RenderedScene render_scene(const SceneSpec& spec) {
  if (spec.width < 1 || spec.height < 1) throw Error(ErrorCode::SpecError, "image size must be positive");
  if (spec.n_horizontals < 5) throw Error(ErrorCode::SpecError, "need at least 5 horizontals");
  if (spec.world.horizontal_spacing_m.size() < static_cast<std::size_t>(spec.n_horizontals)) {
    throw Error(ErrorCode::SpecError, "world model has fewer spacings than horizontals");
  }
  if (!(spec.noise.dropout_prob >= 0.0 && spec.noise.dropout_prob <= 1.0) || !(spec.noise.jitter_px >= 0.0) ||
      spec.noise.clutter_segments < 0) {
    throw Error(ErrorCode::SpecError, "noise parameters out of range");
  }
  try {
    spec.world.validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::SpecError, e.what());
  }

  const auto& ys = spec.world.horizontal_spacing_m;
  const double lane = spec.world.lane_width_m;
  const double y_far = ys[spec.n_horizontals - 1];

  const auto image_point = [&](double x, double y) {
    const Eigen::Vector2d p = project(spec.truth_h, {x, y});
    if (p.x() < 0.0 || p.y() < 0.0 || p.x() > spec.width - 1 || p.y() > spec.height - 1) {
      throw Error(ErrorCode::SpecError, "reference line projects outside the image");
    }
    return PixelPoint::from(p);
  };

  std::vector<Segment> horizontals;
  for (int i = 0; i < spec.n_horizontals; ++i) {
    horizontals.emplace_back(image_point(0.0, ys[i]), image_point(lane, ys[i]));
  }
  std::stable_sort(horizontals.begin(), horizontals.end(),
                   [](const Segment& a, const Segment& b) { return a.midpoint().y > b.midpoint().y; });
  Segment left(image_point(0.0, ys[0]), image_point(0.0, y_far));
  Segment right(image_point(lane, ys[0]), image_point(lane, y_far));
  if (left.midpoint().x > right.midpoint().x) std::swap(left, right);

  EdgeMap clean(spec.width, spec.height);
  const auto raster = [&](EdgeMap& map, const Segment& s) {
    for (const auto& p : raster_segment(s)) {
      if (map.contains(p.x(), p.y())) map.set(p.x(), p.y());
    }
  };
  for (const auto& s : horizontals) raster(clean, s);
  raster(clean, left);
  raster(clean, right);

  Rng rng(spec.rng_seed);
  EdgeMap edges(spec.width, spec.height);
  const double j = spec.noise.jitter_px;
  for (int y = 0; y < spec.height; ++y) {
    for (int x = 0; x < spec.width; ++x) {
      if (!clean.at(x, y)) continue;
      if (rng.unit() < spec.noise.dropout_prob) continue;
      int nx = x;
      int ny = y;
      if (j > 0.0) {
        nx += static_cast<int>(std::lround(rng.uniform(-j, j)));
        ny += static_cast<int>(std::lround(rng.uniform(-j, j)));
      }
      if (edges.contains(nx, ny)) edges.set(nx, ny);
    }
  }
  for (int c = 0; c < spec.noise.clutter_segments; ++c) {
    const double cx = rng.uniform(0.0, spec.width - 1);
    const double cy = rng.uniform(0.0, spec.height - 1);
    const double len = rng.uniform(10.0, 30.0);
    const double ang = rng.uniform(0.0, std::numbers::pi);
    const PixelPoint a{cx - 0.5 * len * std::cos(ang), cy - 0.5 * len * std::sin(ang)};
    const PixelPoint b{cx + 0.5 * len * std::cos(ang), cy + 0.5 * len * std::sin(ang)};
    raster(edges, Segment(a, b));
  }

  SceneTruth truth{{horizontals, left, right}, std::nullopt, spec.truth_h};
  const Eigen::Vector3d vp = spec.truth_h.matrix().col(1);
  if (std::abs(vp.z()) > 1e-12 * vp.head<2>().norm()) truth.vp = VanishingPoint{PixelPoint::from(vp.hnormalized())};
  return {std::move(edges), std::move(truth)};
}

namespace {

struct Plant {
  double frame;  // may be virtual (outside the clip)
  Eigen::Vector2d world;
};

}  // namespace

KeypointStream generate_trace(const TraceSpec& spec) {
  const auto& cf = spec.contact_frames;
  if (cf.empty()) throw Error(ErrorCode::SpecError, "trace needs at least one contact frame");
  if (cf.front() < 0) throw Error(ErrorCode::SpecError, "contact frames must be >= 0");
  for (std::size_t i = 1; i < cf.size(); ++i) {
    if (cf[i] <= cf[i - 1]) throw Error(ErrorCode::SpecError, "contact frames must be strictly increasing");
  }
  if (!(spec.stride_m > 0.0) || !(spec.fps > 0.0) || !(spec.jitter_px >= 0.0) || spec.hold_frames < 2) {
    throw Error(ErrorCode::SpecError, "stride, fps, jitter or hold out of range");
  }
  const int total = spec.total_frames > 0 ? spec.total_frames : cf.back() + 20;
  if (total < cf.back() + spec.hold_frames) throw Error(ErrorCode::SpecError, "trace ends during a contact");

  const double mean_gap = cf.size() > 1 ? static_cast<double>(cf.back() - cf.front()) / (cf.size() - 1) : 20.0;
  const Foot other = spec.first_foot == Foot::Left ? Foot::Right : Foot::Left;

  std::array<std::vector<Plant>, 2> plants;  // indexed by Foot
  for (std::size_t k = 0; k < cf.size(); ++k) {
    const Foot foot = k % 2 == 0 ? spec.first_foot : other;
    const double side = foot == Foot::Left ? 0.5 : -0.5;
    plants[static_cast<int>(foot)].push_back(
        {static_cast<double>(cf[k]), {spec.start_x_m + k * spec.stride_m, spec.lane_y_m + side * spec.toe_spread_m}});
  }
  // virtual plants outside the clip keep every foot moving at running pace
  const double swing = 2.0 * mean_gap;
  const double reach = 2.0 * spec.stride_m;
  for (int f = 0; f < 2; ++f) {
    auto& p = plants[f];
    if (p.empty()) {
      const Foot foot = static_cast<Foot>(f);
      const double side = foot == Foot::Left ? 0.5 : -0.5;
      const double frame = cf.front() + mean_gap;
      p.push_back({frame, {spec.start_x_m + spec.stride_m, spec.lane_y_m + side * spec.toe_spread_m}});
      // a foot without contacts is never planted inside the clip
      p.front().frame = -spec.hold_frames - swing;
    }
    const double k_before = std::max(1.0, std::ceil((p.front().frame + spec.hold_frames + 1) / swing));
    p.insert(p.begin(), {p.front().frame - k_before * swing, p.front().world - Eigen::Vector2d(k_before * reach, 0)});
    const double k_after = std::max(1.0, std::ceil((total - p.back().frame + 1) / swing));
    p.push_back({p.back().frame + k_after * swing, p.back().world + Eigen::Vector2d(k_after * reach, 0)});
  }

  Rng rng(spec.rng_seed);
  const auto pixel_of = [&](const Eigen::Vector2d& w) { return project(spec.truth_h, w); };

  KeypointStream stream;
  stream.fps = spec.fps;
  stream.source_id = spec.source_id;
  for (int frame = 0; frame < total; ++frame) {
    KeypointFrame kf;
    kf.frame_index = frame;
    kf.timestamp_s = frame / spec.fps;
    for (Foot foot : {Foot::Left, Foot::Right}) {
      const auto& p = plants[static_cast<int>(foot)];
      Eigen::Vector2d px = Eigen::Vector2d::Zero();
      bool resolved = false;
      for (std::size_t i = 0; i + 1 < p.size() && !resolved; ++i) {
        const double hold_end = p[i].frame + spec.hold_frames - 1;
        if (frame >= p[i].frame && frame <= hold_end) {
          px = pixel_of(p[i].world);
          resolved = true;
        } else if (frame > hold_end && frame < p[i + 1].frame) {
          const double u = (frame - hold_end) / (p[i + 1].frame - hold_end);
          px = pixel_of(p[i].world + u * (p[i + 1].world - p[i].world));
          px.y() -= spec.lift_px * std::sin(std::numbers::pi * u);
          if (spec.jitter_px > 0.0) {
            px.x() += rng.uniform(-spec.jitter_px, spec.jitter_px);
            px.y() += rng.uniform(-spec.jitter_px, spec.jitter_px);
          }
          resolved = true;
        }
      }
      kf.joints[foot == Foot::Left ? kLeftToe : kRightToe] = {PixelPoint::from(px), 1.0};
    }
    stream.frames.push_back(std::move(kf));
  }
  return stream;
}

}  // namespace trackstride
