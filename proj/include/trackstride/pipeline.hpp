#pragma once

#include "trackstride/config.hpp"
#include "trackstride/gait.hpp"

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace trackstride {

/// What happened to one frame during rectification.
struct FrameDiagnostics {
  int index = 0;
  std::string file;
  int segments = 0;
  int horizontals = 0;
  int verticals = 0;
  std::optional<VanishingPoint> vp;
  std::optional<double> reference_y;
  int homographies = 0;
  std::string skip_reason;  ///< empty when the frame contributed
};

/// Per-frame line detection result.
struct FrameAnalysis {
  std::vector<Segment> segments;
  std::optional<TrackLines> lines;
  std::optional<VanishingPoint> vp;
  std::vector<PairHomography> homographies;  ///< image -> world
  std::string skip_reason;
};

/// Edge extraction, Hough, line structure and per-pair homographies for one frame.
/// Stage failures are reported through skip_reason, never thrown.
FrameAnalysis analyze_frame(const GrayImage& frame, const RunConfig& config);

struct Rectification {
  Homography h = Homography::identity();  ///< image -> world, median over every pair of every frame
  VanishingPoint vp;
  double reference_y = 0.0;  ///< image row of the nearest horizontal line
  std::vector<FrameDiagnostics> frames;
};

/// Runs analyze_frame over io.frames_dir without writing anything.
/// Throws Error{NoFrames} for an empty directory and Error{NoValidPair} when no
/// frame yields a homography, naming the failed frames.
Rectification rectify(const RunConfig& config);

/// rectify, then writes homography.txt, diagnostics.csv and rectification.json to io.out_dir.
Rectification cmd_rectify(const RunConfig& config);

void write_rectification(const std::filesystem::path& path, const Rectification& r);
Rectification read_rectification(const std::filesystem::path& path);

/// Gait pipeline on io.keypoints_file. Reuses out_dir/rectification.json when
/// present and runs cmd_rectify otherwise. Writes strides.csv, strides.json and
/// overlay PNGs (yellow: every toe keypoint, red: contacts).
StrideReport cmd_strides(const RunConfig& config);

/// Writes frames/frame_NNNN.pgm, truth.json, keypoints.json and run.ini to out_dir.
/// Throws Error{SpecError}.
void cmd_synth(const SynthSpec& spec, const std::filesystem::path& out_dir);

/// Loads report JSON files and tabulates them.
SummaryTable cmd_summarize(std::span<const std::filesystem::path> reports);

}  // namespace trackstride
