#include "trackstride/pipeline.hpp"

#include "trackstride/error.hpp"
#include "trackstride/hough.hpp"
#include "trackstride/image_io.hpp"
#include "trackstride/imaging.hpp"
#include "trackstride/synthetic.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <fstream>

namespace trackstride {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

double median(std::vector<double> v) {
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>((v.size() - 1) / 2);
  std::nth_element(v.begin(), mid, v.end());
  return *mid;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
}

void write_json(const fs::path& path, const json& doc) { write_text(path, doc.dump(2) + "\n"); }

json read_json(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot read " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::SchemaError, path.string() + ": " + e.what());
  }
}

void make_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create " + dir.string() + ": " + ec.message());
}

json matrix_json(const Eigen::Matrix3d& m) {
  json a = json::array();
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) a.push_back(m(r, c));
  }
  return a;
}

Eigen::Matrix3d matrix_from_json(const json& a) {
  if (!a.is_array() || a.size() != 9) throw Error(ErrorCode::SchemaError, "homography needs 9 numbers");
  Eigen::Matrix3d m;
  for (int e = 0; e < 9; ++e) m(e / 3, e % 3) = a.at(e).get<double>();
  return m;
}

json segment_json(const Segment& s) { return {s.p1().x, s.p1().y, s.p2().x, s.p2().y}; }

std::string frame_name(int i) { return fmt::format("frame_{:04d}", i); }

}  // namespace

FrameAnalysis analyze_frame(const GrayImage& frame, const RunConfig& config) {
  FrameAnalysis out;
  EdgeMap edges = config.imaging.frames_are_edges
                      ? threshold_nonzero(frame)
                      : canny(gaussian_blur(frame, config.imaging.sigma), config.imaging.canny_low,
                              config.imaging.canny_high);
  if (!config.imaging.roi.empty()) edges = apply_roi(edges, RoiPolygon(config.imaging.roi));

  out.segments = probabilistic_hough(edges, config.hough);
  try {
    out.lines = extract_track_lines(out.segments, config.lines.resolve(frame.width(), frame.height()));
    out.vp = vanishing_point(out.lines->vertical_left, out.lines->vertical_right);
    out.homographies = frame_homographies(*out.lines, config.world);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Config) throw;
    out.skip_reason = to_string(e.code());
  }
  return out;
}

Rectification rectify(const RunConfig& config) {
  const auto files = list_frames(config.io.frames_dir);
  if (files.empty()) throw Error(ErrorCode::NoFrames, "no frames in " + config.io.frames_dir.string());

  Rectification r;
  std::vector<Homography> hs;
  std::vector<double> vx, vy, ref;
  std::vector<std::string> failed;
  for (std::size_t i = 0; i < files.size(); ++i) {
    const FrameAnalysis a = analyze_frame(read_gray_image(files[i]), config);
    FrameDiagnostics d;
    d.index = static_cast<int>(i);
    d.file = files[i].filename().string();
    d.segments = static_cast<int>(a.segments.size());
    if (a.lines) {
      d.horizontals = static_cast<int>(a.lines->horizontals.size());
      d.verticals = 2;
      d.reference_y = a.lines->horizontals.front().midpoint().y;
    }
    d.vp = a.vp;
    d.homographies = static_cast<int>(a.homographies.size());
    d.skip_reason = a.skip_reason;
    if (a.homographies.empty()) {
      failed.push_back(fmt::format("{} ({})", d.file, d.skip_reason));
    } else {
      for (const auto& p : a.homographies) hs.push_back(p.h);
      vx.push_back(a.vp->p.x);
      vy.push_back(a.vp->p.y);
      ref.push_back(*d.reference_y);
    }
    r.frames.push_back(std::move(d));
  }
  if (hs.empty()) {
    std::string msg = "no valid line pair in any frame:";
    for (const auto& f : failed) msg += " " + f;
    throw Error(ErrorCode::NoValidPair, msg);
  }
  r.h = median_homography(hs);
  r.vp = VanishingPoint{{median(vx), median(vy)}};
  r.reference_y = median(ref);
  return r;
}

void write_rectification(const fs::path& path, const Rectification& r) {
  json frames = json::array();
  for (const auto& d : r.frames) {
    json f = {{"index", d.index},
              {"file", d.file},
              {"segments", d.segments},
              {"horizontals", d.horizontals},
              {"verticals", d.verticals},
              {"vanishing_point", nullptr},
              {"reference_y", nullptr},
              {"homographies", d.homographies},
              {"skip_reason", d.skip_reason}};
    if (d.vp) f["vanishing_point"] = {d.vp->p.x, d.vp->p.y};
    if (d.reference_y) f["reference_y"] = *d.reference_y;
    frames.push_back(std::move(f));
  }
  write_json(path, {{"homography", matrix_json(r.h.matrix())},
                    {"vanishing_point", {r.vp.p.x, r.vp.p.y}},
                    {"reference_y", r.reference_y},
                    {"frames", frames}});
}

Rectification read_rectification(const fs::path& path) {
  const json doc = read_json(path);
  try {
    Rectification r;
    r.h = Homography(matrix_from_json(doc.at("homography")));
    const auto& vp = doc.at("vanishing_point");
    r.vp = VanishingPoint{{vp.at(0).get<double>(), vp.at(1).get<double>()}};
    r.reference_y = doc.at("reference_y").get<double>();
    for (const auto& f : doc.value("frames", json::array())) {
      FrameDiagnostics d;
      d.index = f.at("index").get<int>();
      d.file = f.at("file").get<std::string>();
      d.segments = f.at("segments").get<int>();
      d.horizontals = f.at("horizontals").get<int>();
      d.verticals = f.at("verticals").get<int>();
      if (const auto& v = f.at("vanishing_point"); !v.is_null()) {
        d.vp = VanishingPoint{{v.at(0).get<double>(), v.at(1).get<double>()}};
      }
      if (const auto& y = f.at("reference_y"); !y.is_null()) d.reference_y = y.get<double>();
      d.homographies = f.at("homographies").get<int>();
      d.skip_reason = f.at("skip_reason").get<std::string>();
      r.frames.push_back(std::move(d));
    }
    return r;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::SchemaError, path.string() + ": " + e.what());
  }
}

Rectification cmd_rectify(const RunConfig& config) {
  Rectification r = rectify(config);
  make_dir(config.io.out_dir);

  const Eigen::Matrix3d& m = r.h.matrix();
  std::string h;
  for (int row = 0; row < 3; ++row) h += fmt::format("{:.17g} {:.17g} {:.17g}\n", m(row, 0), m(row, 1), m(row, 2));
  write_text(config.io.out_dir / "homography.txt", h);

  const auto opt = [](const std::optional<double>& v) { return v ? fmt::format("{:.3f}", *v) : std::string(); };
  std::string csv = "frame,file,segments,horizontals,verticals,vp_x,vp_y,reference_y,homographies,skip_reason\n";
  for (const auto& d : r.frames) {
    const std::optional<double> vx = d.vp ? std::optional(d.vp->p.x) : std::nullopt;
    const std::optional<double> vy = d.vp ? std::optional(d.vp->p.y) : std::nullopt;
    csv += fmt::format("{},{},{},{},{},{},{},{},{},{}\n", d.index, d.file, d.segments, d.horizontals, d.verticals,
                       opt(vx), opt(vy), opt(d.reference_y), d.homographies, d.skip_reason);
  }
  write_text(config.io.out_dir / "diagnostics.csv", csv);
  write_rectification(config.io.out_dir / "rectification.json", r);
  return r;
}

StrideReport cmd_strides(const RunConfig& config) {
  if (config.io.keypoints_file.empty()) throw Error(ErrorCode::ConfigError, "io.keypoints_file is not set");
  const KeypointStream stream = load_keypoints(config.io.keypoints_file);

  const fs::path artifact = config.io.out_dir / "rectification.json";
  const Rectification rect = fs::exists(artifact) ? read_rectification(artifact) : cmd_rectify(config);
  const double reference_y = config.gait.reference_y.value_or(rect.reference_y);
  const double fps = config.gait.fps.value_or(stream.fps);

  std::vector<ContactEvent> contacts = detect_contacts(stream.frames, config.gait.contact);
  for (auto& c : contacts) c.stabilized_pixel = stabilize_contact(c.raw_pixel, rect.vp, reference_y);
  StrideReport report = compute_strides(contacts, rect.h, fps);
  report.athlete_id = config.gait.athlete_id;
  report.source_id = stream.source_id;

  make_dir(config.io.out_dir);
  write_text(config.io.out_dir / "strides.csv", to_csv(report));
  write_json(config.io.out_dir / "strides.json", to_json(report));

  if (config.gait.overlays) {
    const auto files = config.io.frames_dir.empty() ? std::vector<fs::path>{} : list_frames(config.io.frames_dir);
    GrayImage background = files.empty() ? GrayImage(1280, 720) : read_gray_image(files.front());
    RgbImage base = RgbImage::from_gray(background);
    for (const auto& f : stream.frames) {
      for (Foot foot : {Foot::Left, Foot::Right}) {
        const Joint& j = f.toe(foot);
        if (j.confidence >= config.gait.contact.min_confidence) base.disc(j.p, 2.0, 255, 255, 0);
      }
    }
    const fs::path dir = config.io.out_dir / "overlays";
    make_dir(dir);
    RgbImage summary = base;
    for (const auto& c : report.contacts) {
      summary.line(c.raw_pixel, c.stabilized_pixel, 255, 0, 0);
      summary.disc(c.stabilized_pixel, 4.0, 255, 0, 0);
    }
    write_png(dir / "summary.png", summary);
    for (const auto& c : report.contacts) {
      RgbImage img = base;
      img.line(c.raw_pixel, c.stabilized_pixel, 255, 0, 0);
      img.disc(c.raw_pixel, 4.0, 255, 0, 0);
      img.disc(c.stabilized_pixel, 4.0, 255, 0, 0);
      write_png(dir / fmt::format("contact_{:05d}_{}.png", c.frame_index, to_string(c.foot)), img);
    }
  }
  return report;
}

void cmd_synth(const SynthSpec& spec, const fs::path& out_dir) {
  std::vector<RenderedScene> scenes;
  for (int i = 0; i < spec.frames; ++i) {
    SceneSpec s = spec.scene;
    s.rng_seed = spec.scene.rng_seed + static_cast<std::uint64_t>(i);
    scenes.push_back(render_scene(s));
  }
  const KeypointStream trace = generate_trace(spec.trace);

  make_dir(out_dir / "frames");
  for (int i = 0; i < spec.frames; ++i) write_pgm(out_dir / "frames" / (frame_name(i) + ".pgm"), scenes[i].edges);

  const SceneTruth& t = scenes.front().truth;
  json horizontals = json::array();
  for (const auto& s : t.lines.horizontals) horizontals.push_back(segment_json(s));
  json truth = {{"truth_h", matrix_json(t.truth_h.matrix())},
                {"image_to_world", matrix_json(t.truth_h.inverse().matrix())},
                {"horizontals", horizontals},
                {"vertical_left", segment_json(t.lines.vertical_left)},
                {"vertical_right", segment_json(t.lines.vertical_right)},
                {"vanishing_point", t.vp ? json{t.vp->p.x, t.vp->p.y} : json(nullptr)},
                {"stride_m", spec.trace.stride_m},
                {"contact_frames", spec.trace.contact_frames},
                {"width", spec.scene.width},
                {"height", spec.scene.height}};
  write_json(out_dir / "truth.json", truth);
  write_json(out_dir / "keypoints.json", to_json(trace));

  std::string spacing;
  for (double y : spec.scene.world.horizontal_spacing_m) spacing += fmt::format("{}{:.17g}", spacing.empty() ? "" : " ", y);
  write_text(out_dir / "run.ini", fmt::format("[imaging]\nframes_are_edges = true\n\n"
                                              "[world]\nlane_width_m = {:.17g}\nhorizontal_spacing_m = {}\n\n"
                                              "[gait]\nathlete = {}\n\n"
                                              "[io]\nframes_dir = frames\nkeypoints_file = keypoints.json\nout_dir = out\n",
                                              spec.scene.world.lane_width_m, spacing, spec.athlete_id));
}

SummaryTable cmd_summarize(std::span<const fs::path> reports) {
  if (reports.empty()) throw Error(ErrorCode::EmptyList, "no reports to summarize");
  std::vector<StrideReport> loaded;
  for (const auto& p : reports) loaded.push_back(report_from_json(read_json(p)));
  return summarize(loaded);
}

}  // namespace trackstride
