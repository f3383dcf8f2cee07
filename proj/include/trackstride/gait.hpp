#pragma once

#include "trackstride/geometry.hpp"
#include "trackstride/line_structure.hpp"
#include "trackstride/rectification.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace trackstride {

enum class Foot { Left, Right };

const char* to_string(Foot foot);

inline constexpr const char* kLeftToe = "left_toe";
inline constexpr const char* kRightToe = "right_toe";

struct Joint {
  PixelPoint p;
  double confidence = 0.0;
};

struct KeypointFrame {
  int frame_index = 0;
  double timestamp_s = 0.0;
  std::map<std::string, Joint> joints;

  const Joint& toe(Foot foot) const { return joints.at(foot == Foot::Left ? kLeftToe : kRightToe); }
};

/// Contents of one keypoint file.
struct KeypointStream {
  double fps = 0.0;
  std::string source_id;
  std::vector<KeypointFrame> frames;  ///< sorted by frame_index
};

/// Parses the keypoint wire format. Pose-model landmark names
/// "left_foot_index"/"right_foot_index" are accepted for the toe joints.
/// Throws Error{SchemaError} on malformed records and Error{DuplicateFrame}.
KeypointStream parse_keypoints(const nlohmann::json& doc);
KeypointStream load_keypoints(const std::filesystem::path& path);
nlohmann::json to_json(const KeypointStream& stream);

struct ContactEvent {
  int frame_index = 0;
  Foot foot = Foot::Left;
  PixelPoint raw_pixel;
  PixelPoint stabilized_pixel;
  WorldPoint world;  ///< filled by compute_strides
};

struct ContactParams {
  double stationarity_px = 1.0;
  double min_confidence = 0.3;
};

/// A toe that moves less than stationarity_px between two consecutive frames,
/// both confident, is on the ground. Each maximal stationary run yields one
/// event at its first frame, located at the mean toe position over the run.
/// Events are ordered by frame, left before right on ties.
std::vector<ContactEvent> detect_contacts(std::span<const KeypointFrame> frames, const ContactParams& params = {});

/// Slides raw along its ray to the vanishing point until it meets the image
/// row y = reference_y. Throws Error{NoIntersection} when the ray is horizontal.
PixelPoint stabilize_contact(const PixelPoint& raw, const VanishingPoint& vp, double reference_y);

struct Stride {
  ContactEvent from;
  ContactEvent to;
  double length_m = 0.0;
  double duration_s = 0.0;
  double speed_mps = 0.0;
};

struct StrideWarning {
  int from_frame = 0;
  int to_frame = 0;
  std::string message;
};

struct StrideReport {
  std::string athlete_id;
  std::string source_id;
  std::vector<ContactEvent> contacts;
  std::vector<Stride> strides;
  std::vector<StrideWarning> warnings;
  double average_length_m = 0.0;
  bool empty = true;
};

/// Maps stabilized contacts to the track plane and forms one stride per
/// consecutive opposite-foot pair. Same-foot neighbours produce a warning.
/// Throws Error{InsufficientContacts} below two contacts, Error{InvalidParams} for fps <= 0.
StrideReport compute_strides(std::span<const ContactEvent> contacts, const Homography& h, double fps);

/// One CSV row per stride: athlete,source,stride_idx,from_frame,to_frame,length_m,duration_s,speed_mps
std::string to_csv(const StrideReport& report);
nlohmann::json to_json(const StrideReport& report);
StrideReport report_from_json(const nlohmann::json& doc);

struct SourceStats {
  std::string athlete_id;
  std::string source_id;
  std::size_t count = 0;
  double mean_m = 0.0;
  double stddev_m = 0.0;  ///< sample standard deviation, 0 for fewer than two strides
  double min_m = 0.0;
  double max_m = 0.0;
};

/// Change of an athlete's mean stride from one source to the next.
struct SourceDifference {
  std::string athlete_id;
  std::string from_source;
  std::string to_source;
  double difference_m = 0.0;
  double percent = 0.0;  ///< relative to the earlier source
};

struct SummaryTable {
  std::vector<SourceStats> rows;
  std::vector<SourceDifference> differences;
};

/// Per-athlete, per-source statistics plus differences between consecutive
/// sources of the same athlete, in input order.
SummaryTable summarize(std::span<const StrideReport> reports);
std::string to_csv(const SummaryTable& table);
std::string to_text(const SummaryTable& table);

}  // namespace trackstride
