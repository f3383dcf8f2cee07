#include "trackstride/config.hpp"

#include "trackstride/error.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace trackstride {

namespace pt = boost::property_tree;

namespace {

std::vector<std::string> tokens(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',' || c == ';' || c == ' ' || c == '\t') {
      if (!cur.empty()) out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

/// Reads one INI file, remembering which keys were consumed so leftovers
/// can be reported as typos.
class Reader {
 public:
  Reader(const std::string& text, ErrorCode code) : code_(code) {
    std::istringstream in(text);
    try {
      pt::read_ini(in, tree_);
    } catch (const pt::ini_parser_error& e) {
      fail(e.message() + " at line " + std::to_string(e.line()));
    }
    for (const auto& [name, section] : tree_) {
      if (section.empty() && !section.data().empty()) fail("key '" + name + "' outside a section");
    }
  }

  [[noreturn]] void fail(const std::string& msg) const { throw Error(code_, msg); }

  std::optional<std::string> raw(const std::string& section, const std::string& key) {
    used_.insert(section + "." + key);
    const auto s = tree_.get_child_optional(pt::ptree::path_type(section, '\0'));
    if (!s) return std::nullopt;
    const auto v = s->get_child_optional(pt::ptree::path_type(key, '\0'));
    if (!v) return std::nullopt;
    return v->data();
  }

  double number(const std::string& text, const std::string& where) const {
    double v = 0.0;
    const char* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc() || ptr != end || !std::isfinite(v)) fail(where + ": not a number: '" + text + "'");
    return v;
  }

  void real(const std::string& section, const std::string& key, double& out) {
    if (auto s = raw(section, key)) out = number(*s, section + "." + key);
  }
  void real(const std::string& section, const std::string& key, std::optional<double>& out) {
    if (auto s = raw(section, key)) out = number(*s, section + "." + key);
  }
  template <typename Int>
  void integer(const std::string& section, const std::string& key, Int& out) {
    if (auto s = raw(section, key)) {
      Int v{};
      const char* end = s->data() + s->size();
      const auto [ptr, ec] = std::from_chars(s->data(), end, v);
      if (ec != std::errc() || ptr != end) fail(section + "." + key + ": not an integer: '" + *s + "'");
      out = v;
    }
  }
  void boolean(const std::string& section, const std::string& key, bool& out) {
    if (auto s = raw(section, key)) {
      if (*s == "true" || *s == "1" || *s == "yes") {
        out = true;
      } else if (*s == "false" || *s == "0" || *s == "no") {
        out = false;
      } else {
        fail(section + "." + key + ": expected true or false");
      }
    }
  }
  void string(const std::string& section, const std::string& key, std::string& out) {
    if (auto s = raw(section, key)) out = *s;
  }
  std::optional<std::vector<double>> list(const std::string& section, const std::string& key) {
    auto s = raw(section, key);
    if (!s) return std::nullopt;
    std::vector<double> out;
    for (const auto& t : tokens(*s)) out.push_back(number(t, section + "." + key));
    return out;
  }
  template <std::size_t N>
  void array(const std::string& section, const std::string& key, std::optional<std::array<double, N>>& out) {
    if (auto v = list(section, key)) {
      if (v->size() != N) fail(section + "." + key + ": expected " + std::to_string(N) + " numbers");
      std::array<double, N> a{};
      std::copy(v->begin(), v->end(), a.begin());
      out = a;
    }
  }

  /// Rejects sections and keys nobody asked for.
  void finish(const std::set<std::string>& sections) const {
    for (const auto& [name, section] : tree_) {
      if (!sections.count(name)) fail("unknown section [" + name + "]");
      for (const auto& [key, value] : section) {
        if (!used_.count(name + "." + key)) fail("unknown key '" + key + "' in [" + name + "]");
      }
    }
  }

 private:
  pt::ptree tree_;
  ErrorCode code_;
  std::set<std::string> used_;
};

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void read_world(Reader& r, WorldModel& world) {
  r.real("world", "lane_width_m", world.lane_width_m);
  if (auto v = r.list("world", "horizontal_spacing_m")) world.horizontal_spacing_m = *v;
}

template <typename Fn>
void rethrow_as(ErrorCode code, Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    if (e.code() == code) throw;
    throw Error(code, e.what());
  }
}

}  // namespace

LineParams LinesConfig::resolve(int width, int height) const {
  LineParams p;
  p.classify = classify;
  p.vertical_group_tolerance = vertical_group_tolerance;
  p.areas = AreaConfig::defaults(width, height);
  if (area_boundaries) p.areas.boundaries = *area_boundaries;
  if (merge_thresholds) p.areas.merge_thresholds = *merge_thresholds;
  p.areas.join_threshold = join_threshold;
  p.corner_snap_px = corner_snap_px;
  rethrow_as(ErrorCode::ConfigError, [&] { p.areas.validate(width); });
  return p;
}

RunConfig parse_run_config(const std::string& text, const std::filesystem::path& base_dir) {
  Reader r(text, ErrorCode::ConfigError);
  RunConfig c;

  r.real("imaging", "sigma", c.imaging.sigma);
  r.real("imaging", "canny_low", c.imaging.canny_low);
  r.real("imaging", "canny_high", c.imaging.canny_high);
  r.boolean("imaging", "frames_are_edges", c.imaging.frames_are_edges);
  if (auto roi = r.list("imaging", "roi")) {
    if (roi->size() % 2 != 0) r.fail("imaging.roi: expected x,y pairs");
    for (std::size_t i = 0; i < roi->size(); i += 2) c.imaging.roi.push_back({(*roi)[i], (*roi)[i + 1]});
    rethrow_as(ErrorCode::ConfigError, [&] { (void)RoiPolygon(c.imaging.roi); });
  }
  if (!(c.imaging.sigma > 0.0)) r.fail("imaging.sigma must be > 0");
  if (!(c.imaging.canny_low >= 0.0 && c.imaging.canny_low < c.imaging.canny_high)) {
    r.fail("imaging: need 0 <= canny_low < canny_high");
  }

  r.real("hough", "rho_resolution", c.hough.rho_resolution);
  r.real("hough", "theta_resolution", c.hough.theta_resolution);
  r.integer("hough", "vote_threshold", c.hough.vote_threshold);
  r.real("hough", "min_line_length", c.hough.min_line_length);
  r.real("hough", "max_line_gap", c.hough.max_line_gap);
  r.integer("hough", "rng_seed", c.hough.rng_seed);
  r.integer("hough", "walk_band", c.hough.walk_band);
  rethrow_as(ErrorCode::ConfigError, [&] { c.hough.validate(); });

  r.real("lines", "horizontal_tolerance", c.lines.classify.horizontal_tolerance);
  r.real("lines", "vertical_min_angle", c.lines.classify.vertical_min_angle);
  r.real("lines", "vertical_band", c.lines.classify.vertical_band);
  r.real("lines", "vertical_group_tolerance", c.lines.vertical_group_tolerance);
  r.array("lines", "area_boundaries", c.lines.area_boundaries);
  r.array("lines", "merge_thresholds", c.lines.merge_thresholds);
  r.real("lines", "join_threshold", c.lines.join_threshold);
  r.real("lines", "corner_snap_px", c.lines.corner_snap_px);
  if (!(c.lines.classify.horizontal_tolerance > 0.0 && c.lines.classify.vertical_min_angle > 0.0 &&
        c.lines.classify.vertical_band > 0.0 && c.lines.classify.vertical_band <= 90.0 &&
        c.lines.vertical_group_tolerance > 0.0 && c.lines.join_threshold > 0.0 &&
        c.lines.corner_snap_px >= 0.0)) {
    r.fail("lines: tolerance out of range");
  }
  if (c.lines.merge_thresholds) {
    for (double t : *c.lines.merge_thresholds) {
      if (!(t > 0.0)) r.fail("lines.merge_thresholds must be > 0");
    }
  }

  read_world(r, c.world);
  rethrow_as(ErrorCode::ConfigError, [&] { c.world.validate(); });

  r.real("gait", "stationarity_px", c.gait.contact.stationarity_px);
  r.real("gait", "min_confidence", c.gait.contact.min_confidence);
  r.real("gait", "reference_y", c.gait.reference_y);
  r.real("gait", "fps", c.gait.fps);
  r.string("gait", "athlete", c.gait.athlete_id);
  r.boolean("gait", "overlays", c.gait.overlays);
  if (!(c.gait.contact.stationarity_px > 0.0)) r.fail("gait.stationarity_px must be > 0");
  if (!(c.gait.contact.min_confidence >= 0.0 && c.gait.contact.min_confidence <= 1.0)) {
    r.fail("gait.min_confidence must be in [0, 1]");
  }
  if (c.gait.fps && !(*c.gait.fps > 0.0)) r.fail("gait.fps must be > 0");

  const auto path = [&](const std::string& key, std::filesystem::path& out) {
    std::string s;
    r.string("io", key, s);
    if (!s.empty()) out = s;
    if (!out.empty() && out.is_relative() && !base_dir.empty()) out = base_dir / out;
  };
  path("frames_dir", c.io.frames_dir);
  path("keypoints_file", c.io.keypoints_file);
  path("out_dir", c.io.out_dir);

  r.finish({"imaging", "hough", "lines", "world", "gait", "io"});
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  return parse_run_config(slurp(path), path.parent_path());
}

SynthSpec parse_synth_spec(const std::string& text) {
  Reader r(text, ErrorCode::SpecError);
  SynthSpec s;
  s.scene = SceneSpec::defaults();

  rethrow_as(ErrorCode::SpecError, [&] {
    read_world(r, s.scene.world);
    s.scene.world.validate();
  });

  r.integer("scene", "width", s.scene.width);
  r.integer("scene", "height", s.scene.height);
  r.integer("scene", "n_horizontals", s.scene.n_horizontals);
  r.integer("scene", "rng_seed", s.scene.rng_seed);
  r.integer("scene", "frames", s.frames);
  r.real("scene", "dropout_prob", s.scene.noise.dropout_prob);
  r.real("scene", "jitter_px", s.scene.noise.jitter_px);
  r.integer("scene", "clutter_segments", s.scene.noise.clutter_segments);
  if (s.scene.width < 1 || s.scene.height < 1) r.fail("scene: image size must be positive");
  if (s.frames < 1) r.fail("scene.frames must be >= 1");

  r.real("camera", "focal_px", s.camera.focal_px);
  r.real("camera", "height_m", s.camera.height_m);
  r.real("camera", "distance_m", s.camera.distance_m);
  r.real("camera", "x_m", s.camera.x_m);
  r.real("camera", "yaw_deg", s.camera.yaw_deg);
  r.real("camera", "roll_deg", s.camera.roll_deg);
  r.real("camera", "pitch_deg", s.camera.pitch_deg);
  if (!(s.camera.focal_px > 0.0)) r.fail("camera.focal_px must be > 0");

  if (auto h = r.list("scene", "truth_h")) {
    if (h->size() != 9) r.fail("scene.truth_h: expected 9 numbers");
    rethrow_as(ErrorCode::SpecError,
               [&] { s.scene.truth_h = Homography(Eigen::Matrix<double, 3, 3, Eigen::RowMajor>(h->data())); });
  } else {
    rethrow_as(ErrorCode::SpecError, [&] {
      s.scene.truth_h = camera_homography(s.camera, s.scene.world, s.scene.width, s.scene.height);
    });
  }

  auto& t = s.trace;
  t.truth_h = s.scene.truth_h;
  r.real("trace", "stride_m", t.stride_m);
  if (auto frames = r.list("trace", "contact_frames")) {
    t.contact_frames.clear();
    for (double f : *frames) {
      if (f != std::floor(f)) r.fail("trace.contact_frames must be integers");
      t.contact_frames.push_back(static_cast<int>(f));
    }
  }
  std::string first = "left";
  r.string("trace", "first_foot", first);
  if (first == "left") {
    t.first_foot = Foot::Left;
  } else if (first == "right") {
    t.first_foot = Foot::Right;
  } else {
    r.fail("trace.first_foot must be left or right");
  }
  r.real("trace", "fps", t.fps);
  r.real("trace", "jitter_px", t.jitter_px);
  r.integer("trace", "rng_seed", t.rng_seed);
  r.real("trace", "lane_y_m", t.lane_y_m);
  r.real("trace", "start_x_m", t.start_x_m);
  r.integer("trace", "hold_frames", t.hold_frames);
  r.integer("trace", "total_frames", t.total_frames);
  r.real("trace", "toe_spread_m", t.toe_spread_m);
  r.real("trace", "lift_px", t.lift_px);
  r.string("trace", "source_id", t.source_id);
  r.string("trace", "athlete", s.athlete_id);

  r.finish({"scene", "camera", "world", "trace"});
  return s;
}

SynthSpec load_synth_spec(const std::filesystem::path& path) { return parse_synth_spec(slurp(path)); }

}  // namespace trackstride
