#pragma once

#include "trackstride/gait.hpp"
#include "trackstride/hough.hpp"
#include "trackstride/imaging.hpp"
#include "trackstride/line_structure.hpp"
#include "trackstride/rectification.hpp"
#include "trackstride/synthetic.hpp"

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace trackstride {

struct ImagingConfig {
  double sigma = 1.4;
  double canny_low = 50.0;
  double canny_high = 150.0;
  std::vector<PixelPoint> roi;  ///< empty: whole frame
  /// Frames already hold edge maps (nonzero = edge); blur and Canny are skipped.
  bool frames_are_edges = false;
};

/// Line-structure settings. Area boundaries and merge thresholds default to
/// values derived from the frame size.
struct LinesConfig {
  ClassifyParams classify;
  double vertical_group_tolerance = 15.0;
  std::optional<std::array<double, 2>> area_boundaries;
  std::optional<std::array<double, 3>> merge_thresholds;
  double join_threshold = 20.0;
  double corner_snap_px = 5.0;

  LineParams resolve(int width, int height) const;
};

struct GaitConfig {
  ContactParams contact;
  std::optional<double> reference_y;  ///< default: nearest horizontal line
  std::optional<double> fps;          ///< default: from the keypoint file
  std::string athlete_id = "athlete";
  bool overlays = true;
};

struct IoConfig {
  std::filesystem::path frames_dir;
  std::filesystem::path keypoints_file;
  std::filesystem::path out_dir = "out";
};

struct RunConfig {
  ImagingConfig imaging;
  PhtParams hough;
  LinesConfig lines;
  WorldModel world;
  GaitConfig gait;
  IoConfig io;
};

/// INI file with sections imaging, hough, lines, world, gait, io. Missing keys
/// keep their defaults; unknown keys are rejected. Relative paths resolve
/// against the directory holding the file.
/// Throws Error{ConfigError} for bad syntax, values or bounds, Error{IoError}
/// when the file cannot be read.
RunConfig load_run_config(const std::filesystem::path& path);
RunConfig parse_run_config(const std::string& text, const std::filesystem::path& base_dir = {});

/// Everything cmd_synth needs: one scene spec (rendered `frames` times with
/// consecutive seeds) and one trace spec sharing the scene's homography.
struct SynthSpec {
  SceneSpec scene;
  CameraSpec camera;
  int frames = 1;
  TraceSpec trace;
  std::string athlete_id = "synthetic";
};

/// INI file with sections scene, camera, world and trace. The scene
/// homography comes from the camera unless scene.truth_h lists 9 numbers.
/// Throws Error{SpecError} for invalid content, Error{IoError} when unreadable.
SynthSpec load_synth_spec(const std::filesystem::path& path);
SynthSpec parse_synth_spec(const std::string& text);

}  // namespace trackstride
