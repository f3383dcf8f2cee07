#pragma once

#include "trackstride/gait.hpp"
#include "trackstride/imaging.hpp"
#include "trackstride/line_structure.hpp"
#include "trackstride/rectification.hpp"

#include <cstdint>
#include <optional>

namespace trackstride {

/// Pinhole camera standing beside the track, looking across it (+y world)
/// and pitched down towards the middle of the reference grid.
struct CameraSpec {
  double focal_px = 1000.0;
  double height_m = 7.0;    ///< above the track plane
  double distance_m = 6.0;  ///< from the nearest horizontal line
  std::optional<double> x_m;  ///< along-track position, default centred between the verticals
  double yaw_deg = 1.0;  ///< off zero so horizontals do not rasterize onto single rows
  double roll_deg = 0.0;
  std::optional<double> pitch_deg;  ///< default aims at the grid centre
};

/// World -> image homography of the camera for a width x height frame.
Homography camera_homography(const CameraSpec& camera, const WorldModel& world, int width, int height);

struct NoiseSpec {
  double dropout_prob = 0.0;
  double jitter_px = 0.0;
  int clutter_segments = 0;
};

struct SceneSpec {
  Homography truth_h = Homography::identity();  ///< world -> image
  int n_horizontals = 5;  ///< >= 5
  WorldModel world;
  NoiseSpec noise;
  int width = 1280;
  int height = 720;
  std::uint64_t rng_seed = 0;

  /// 1280x720 frame, verticals 8 m apart, lines every 1.22 m, default camera.
  static SceneSpec defaults();
};

struct SceneTruth {
  TrackLines lines;                  ///< projected ground-truth segments, nearest horizontal first
  std::optional<VanishingPoint> vp;  ///< empty when the verticals stay parallel in the image
  Homography truth_h;                ///< world -> image
};

struct RenderedScene {
  EdgeMap edges;
  SceneTruth truth;
};

/// Projects the reference grid through truth_h, rasterizes it, then applies
/// per-pixel dropout, per-pixel jitter and random clutter segments.
/// Throws Error{SpecError} if a line leaves the image or the spec is invalid.
RenderedScene render_scene(const SceneSpec& spec);

struct TraceSpec {
  double stride_m = 1.80;
  std::vector<int> contact_frames{12, 31, 50};
  Foot first_foot = Foot::Left;  ///< feet alternate from here
  Homography truth_h = Homography::identity();  ///< world -> image
  double fps = 30.0;
  double jitter_px = 0.0;  ///< flight-phase jitter only
  std::uint64_t rng_seed = 0;
  double lane_y_m = 0.61;   ///< across-track position of the runner
  double start_x_m = 1.0;   ///< along-track position of the first contact
  int hold_frames = 2;      ///< frames the toe stays planted, >= 2
  int total_frames = 0;     ///< 0: frames 0 .. last contact + 19
  double toe_spread_m = 0.1;
  double lift_px = 12.0;    ///< peak toe clearance during swing, in pixels
  std::string source_id = "synthetic";
};

/// Toe keypoints of a runner whose contacts are stride_m apart along the
/// track. Planted toes repeat their pixel exactly for hold_frames frames.
/// Throws Error{SpecError} for an invalid spec.
KeypointStream generate_trace(const TraceSpec& spec);

}  // namespace trackstride
