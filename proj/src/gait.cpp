#include "trackstride/gait.hpp"

#include "trackstride/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>

namespace trackstride {

using nlohmann::json;

const char* to_string(Foot foot) { return foot == Foot::Left ? "left" : "right"; }

namespace {

double number_field(const json& obj, const char* key, const std::string& where) {
  const auto it = obj.find(key);
  if (it == obj.end() || !it->is_number()) {
    throw Error(ErrorCode::SchemaError, where + ": missing numeric field \"" + key + "\"");
  }
  const double v = it->get<double>();
  if (!std::isfinite(v)) throw Error(ErrorCode::SchemaError, where + ": non-finite \"" + key + "\"");
  return v;
}

Joint parse_joint(const json& j, const std::string& where) {
  if (!j.is_object()) throw Error(ErrorCode::SchemaError, where + ": joint must be an object");
  Joint out{{number_field(j, "x", where), number_field(j, "y", where)}, number_field(j, "c", where)};
  if (out.confidence < 0.0 || out.confidence > 1.0) {
    throw Error(ErrorCode::SchemaError, where + ": confidence outside [0, 1]");
  }
  return out;
}

}  // namespace

KeypointStream parse_keypoints(const json& doc) {
  if (!doc.is_object()) throw Error(ErrorCode::SchemaError, "keypoint document must be an object");
  KeypointStream stream;
  stream.fps = number_field(doc, "fps", "header");
  if (!(stream.fps > 0.0)) throw Error(ErrorCode::SchemaError, "header: fps must be > 0");
  const auto sid = doc.find("source_id");
  if (sid == doc.end() || !sid->is_string()) {
    throw Error(ErrorCode::SchemaError, "header: missing string field \"source_id\"");
  }
  stream.source_id = sid->get<std::string>();
  const auto frames = doc.find("frames");
  if (frames == doc.end() || !frames->is_array()) {
    throw Error(ErrorCode::SchemaError, "header: missing array field \"frames\"");
  }

  static const std::map<std::string, std::string> aliases{{"left_foot_index", kLeftToe},
                                                          {"right_foot_index", kRightToe}};
  for (std::size_t i = 0; i < frames->size(); ++i) {
    const json& rec = (*frames)[i];
    const std::string where = "frames[" + std::to_string(i) + "]";
    if (!rec.is_object()) throw Error(ErrorCode::SchemaError, where + ": record must be an object");
    const auto fi = rec.find("frame");
    if (fi == rec.end() || !fi->is_number_integer() || fi->get<long long>() < 0) {
      throw Error(ErrorCode::SchemaError, where + ": \"frame\" must be a non-negative integer");
    }
    KeypointFrame frame;
    frame.frame_index = fi->get<int>();
    frame.timestamp_s = number_field(rec, "t", where);
    const auto joints = rec.find("joints");
    if (joints == rec.end() || !joints->is_object()) {
      throw Error(ErrorCode::SchemaError, where + ": missing object field \"joints\"");
    }
    for (const auto& [name, value] : joints->items()) {
      frame.joints[name] = parse_joint(value, where + "." + name);
    }
    for (const auto& [alias, canonical] : aliases) {
      const auto it = frame.joints.find(alias);
      if (it != frame.joints.end() && !frame.joints.contains(canonical)) frame.joints[canonical] = it->second;
    }
    for (const char* required : {kLeftToe, kRightToe}) {
      if (!frame.joints.contains(required)) {
        throw Error(ErrorCode::SchemaError, where + ": missing joint \"" + required + "\"");
      }
    }
    stream.frames.push_back(std::move(frame));
  }

  std::sort(stream.frames.begin(), stream.frames.end(),
            [](const KeypointFrame& a, const KeypointFrame& b) { return a.frame_index < b.frame_index; });
  for (std::size_t i = 1; i < stream.frames.size(); ++i) {
    if (stream.frames[i].frame_index == stream.frames[i - 1].frame_index) {
      throw Error(ErrorCode::DuplicateFrame, "frame " + std::to_string(stream.frames[i].frame_index));
    }
  }
  return stream;
}

KeypointStream load_keypoints(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::SchemaError, path.string() + ": " + e.what());
  }
  return parse_keypoints(doc);
}

json to_json(const KeypointStream& stream) {
  json frames = json::array();
  for (const auto& f : stream.frames) {
    json joints = json::object();
    for (const auto& [name, j] : f.joints) joints[name] = {{"x", j.p.x}, {"y", j.p.y}, {"c", j.confidence}};
    frames.push_back({{"frame", f.frame_index}, {"t", f.timestamp_s}, {"joints", joints}});
  }
  return {{"fps", stream.fps}, {"source_id", stream.source_id}, {"frames", frames}};
}

std::vector<ContactEvent> detect_contacts(std::span<const KeypointFrame> frames, const ContactParams& params) {
  std::vector<ContactEvent> out;
  for (Foot foot : {Foot::Left, Foot::Right}) {
    const auto stationary = [&](std::size_t i) {
      const Joint& a = frames[i].toe(foot);
      const Joint& b = frames[i + 1].toe(foot);
      return a.confidence >= params.min_confidence && b.confidence >= params.min_confidence &&
             (a.p.vec() - b.p.vec()).norm() < params.stationarity_px;
    };
    std::size_t i = 0;
    while (i + 1 < frames.size()) {
      if (!stationary(i)) {
        ++i;
        continue;
      }
      std::size_t end = i;  // last qualifying start frame of the run
      while (end + 2 < frames.size() && stationary(end + 1)) ++end;
      Eigen::Vector2d sum = Eigen::Vector2d::Zero();
      for (std::size_t k = i; k <= end + 1; ++k) sum += frames[k].toe(foot).p.vec();
      const PixelPoint raw = PixelPoint::from(sum / static_cast<double>(end + 2 - i));
      out.push_back({frames[i].frame_index, foot, raw, raw, {}});
      i = end + 1;
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const ContactEvent& a, const ContactEvent& b) {
    if (a.frame_index != b.frame_index) return a.frame_index < b.frame_index;
    return a.foot == Foot::Left && b.foot == Foot::Right;
  });
  return out;
}

PixelPoint stabilize_contact(const PixelPoint& raw, const VanishingPoint& vp, double reference_y) {
  if (raw.y == reference_y) return raw;
  const Eigen::Vector2d d = vp.p.vec() - raw.vec();
  if (std::abs(d.y()) < 1e-12) {
    throw Error(ErrorCode::NoIntersection, "ray to the vanishing point never reaches the reference row");
  }
  const double t = (reference_y - raw.y) / d.y();
  return {raw.x + t * d.x(), reference_y};
}

StrideReport compute_strides(std::span<const ContactEvent> contacts, const Homography& h, double fps) {
  if (!(fps > 0.0)) throw Error(ErrorCode::InvalidParams, "fps must be > 0");
  if (contacts.size() < 2) {
    throw Error(ErrorCode::InsufficientContacts,
                "need at least two contacts, found " + std::to_string(contacts.size()));
  }
  StrideReport report;
  report.contacts.assign(contacts.begin(), contacts.end());
  for (auto& c : report.contacts) c.world = apply(h, c.stabilized_pixel);

  for (std::size_t i = 0; i + 1 < report.contacts.size(); ++i) {
    const ContactEvent& a = report.contacts[i];
    const ContactEvent& b = report.contacts[i + 1];
    if (a.foot == b.foot) {
      report.warnings.push_back({a.frame_index, b.frame_index,
                                 fmt::format("consecutive {} foot contacts", to_string(a.foot))});
      continue;
    }
    if (b.frame_index <= a.frame_index) {
      report.warnings.push_back({a.frame_index, b.frame_index, "simultaneous contacts"});
      continue;
    }
    Stride s{a, b, 0.0, 0.0, 0.0};
    s.length_m = (b.world.vec() - a.world.vec()).norm();
    s.duration_s = (b.frame_index - a.frame_index) / fps;
    s.speed_mps = s.length_m / s.duration_s;
    report.strides.push_back(s);
  }
  report.empty = report.strides.empty();
  if (!report.empty) {
    double sum = 0.0;
    for (const auto& s : report.strides) sum += s.length_m;
    report.average_length_m = sum / static_cast<double>(report.strides.size());
  }
  return report;
}

std::string to_csv(const StrideReport& report) {
  std::string out = "athlete,source,stride_idx,from_frame,to_frame,length_m,duration_s,speed_mps\n";
  for (std::size_t i = 0; i < report.strides.size(); ++i) {
    const auto& s = report.strides[i];
    out += fmt::format("{},{},{},{},{},{:.6f},{:.6f},{:.6f}\n", report.athlete_id, report.source_id, i,
                       s.from.frame_index, s.to.frame_index, s.length_m, s.duration_s, s.speed_mps);
  }
  return out;
}

namespace {

json contact_json(const ContactEvent& c) {
  return {{"frame", c.frame_index},
          {"foot", to_string(c.foot)},
          {"raw_pixel", {c.raw_pixel.x, c.raw_pixel.y}},
          {"stabilized_pixel", {c.stabilized_pixel.x, c.stabilized_pixel.y}},
          {"world", {c.world.x, c.world.y}}};
}

ContactEvent contact_from_json(const json& j) {
  ContactEvent c;
  c.frame_index = j.at("frame").get<int>();
  c.foot = j.at("foot").get<std::string>() == "left" ? Foot::Left : Foot::Right;
  c.raw_pixel = {j.at("raw_pixel").at(0).get<double>(), j.at("raw_pixel").at(1).get<double>()};
  c.stabilized_pixel = {j.at("stabilized_pixel").at(0).get<double>(), j.at("stabilized_pixel").at(1).get<double>()};
  c.world = {j.at("world").at(0).get<double>(), j.at("world").at(1).get<double>()};
  return c;
}

}  // namespace

json to_json(const StrideReport& report) {
  json contacts = json::array();
  for (const auto& c : report.contacts) contacts.push_back(contact_json(c));
  json strides = json::array();
  for (const auto& s : report.strides) {
    strides.push_back({{"from", contact_json(s.from)},
                       {"to", contact_json(s.to)},
                       {"length_m", s.length_m},
                       {"duration_s", s.duration_s},
                       {"speed_mps", s.speed_mps}});
  }
  json warnings = json::array();
  for (const auto& w : report.warnings) {
    warnings.push_back({{"from_frame", w.from_frame}, {"to_frame", w.to_frame}, {"message", w.message}});
  }
  return {{"athlete_id", report.athlete_id},
          {"source_id", report.source_id},
          {"average_length_m", report.average_length_m},
          {"empty", report.empty},
          {"contacts", contacts},
          {"strides", strides},
          {"warnings", warnings}};
}

StrideReport report_from_json(const json& doc) {
  try {
    StrideReport r;
    r.athlete_id = doc.at("athlete_id").get<std::string>();
    r.source_id = doc.at("source_id").get<std::string>();
    r.average_length_m = doc.at("average_length_m").get<double>();
    r.empty = doc.at("empty").get<bool>();
    for (const auto& c : doc.at("contacts")) r.contacts.push_back(contact_from_json(c));
    for (const auto& s : doc.at("strides")) {
      r.strides.push_back({contact_from_json(s.at("from")), contact_from_json(s.at("to")),
                           s.at("length_m").get<double>(), s.at("duration_s").get<double>(),
                           s.at("speed_mps").get<double>()});
    }
    for (const auto& w : doc.at("warnings")) {
      r.warnings.push_back({w.at("from_frame").get<int>(), w.at("to_frame").get<int>(),
                            w.at("message").get<std::string>()});
    }
    return r;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::SchemaError, std::string("stride report: ") + e.what());
  }
}

SummaryTable summarize(std::span<const StrideReport> reports) {
  SummaryTable table;
  for (const auto& r : reports) {
    SourceStats row;
    row.athlete_id = r.athlete_id;
    row.source_id = r.source_id;
    row.count = r.strides.size();
    if (row.count > 0) {
      std::vector<double> v;
      for (const auto& s : r.strides) v.push_back(s.length_m);
      row.mean_m = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
      const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
      row.min_m = *lo;
      row.max_m = *hi;
      if (v.size() > 1) {
        double ss = 0.0;
        for (double x : v) ss += (x - row.mean_m) * (x - row.mean_m);
        row.stddev_m = std::sqrt(ss / static_cast<double>(v.size() - 1));
      }
    }
    table.rows.push_back(row);
  }

  std::map<std::string, const SourceStats*> previous;
  for (const auto& row : table.rows) {
    auto it = previous.find(row.athlete_id);
    if (it != previous.end() && it->second->count > 0 && row.count > 0) {
      const SourceStats& prev = *it->second;
      const double diff = row.mean_m - prev.mean_m;
      table.differences.push_back({row.athlete_id, prev.source_id, row.source_id, diff, 100.0 * diff / prev.mean_m});
    }
    if (row.count > 0) previous[row.athlete_id] = &row;
  }
  return table;
}

namespace {

const SourceDifference* difference_into(const SummaryTable& table, const SourceStats& row) {
  for (const auto& d : table.differences) {
    if (d.athlete_id == row.athlete_id && d.to_source == row.source_id) return &d;
  }
  return nullptr;
}

}  // namespace

std::string to_csv(const SummaryTable& table) {
  std::string out = "athlete,source,count,mean_m,stddev_m,min_m,max_m,diff_m,diff_pct\n";
  for (const auto& row : table.rows) {
    out += fmt::format("{},{},{},{:.4f},{:.4f},{:.4f},{:.4f},", row.athlete_id, row.source_id, row.count,
                       row.mean_m, row.stddev_m, row.min_m, row.max_m);
    if (const auto* d = difference_into(table, row)) {
      out += fmt::format("{:+.2f},{:+.2f}\n", d->difference_m, d->percent);
    } else {
      out += ",\n";
    }
  }
  return out;
}

std::string to_text(const SummaryTable& table) {
  std::string out = fmt::format("{:<12} {:<16} {:>5} {:>8} {:>8} {:>8} {:>8} {:>8} {:>8}\n", "athlete",
                                "source", "n", "mean_m", "std_m", "min_m", "max_m", "diff_m", "diff_%");
  for (const auto& row : table.rows) {
    out += fmt::format("{:<12} {:<16} {:>5} {:>8.2f} {:>8.2f} {:>8.2f} {:>8.2f}", row.athlete_id, row.source_id,
                       row.count, row.mean_m, row.stddev_m, row.min_m, row.max_m);
    if (const auto* d = difference_into(table, row)) {
      out += fmt::format(" {:>+8.2f} {:>+8.2f}\n", d->difference_m, d->percent);
    } else {
      out += "\n";
    }
  }
  return out;
}

}  // namespace trackstride
