#include "trackstride/config.hpp"
#include "trackstride/error.hpp"
#include "trackstride/pipeline.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <fstream>
#include <iostream>

namespace ts = trackstride;
namespace fs = std::filesystem;

namespace {

int exit_code(ts::ErrorKind kind) {
  switch (kind) {
    case ts::ErrorKind::Config:
    case ts::ErrorKind::Argument:
      return 2;
    case ts::ErrorKind::Pipeline:
      return 3;
    case ts::ErrorKind::Io:
      return 4;
  }
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stride length from fixed-camera track video"};
  app.require_subcommand(1);

  fs::path config_path;
  std::optional<fs::path> keypoints, out_dir;

  auto* rectify = app.add_subcommand("rectify", "estimate the image-to-track homography from the frames");
  rectify->add_option("-c,--config", config_path, "run config (INI)")->required();
  rectify->add_option("-o,--out", out_dir, "override io.out_dir");

  auto* strides = app.add_subcommand("strides", "detect contacts and measure strides");
  strides->add_option("-c,--config", config_path, "run config (INI)")->required();
  strides->add_option("-k,--keypoints", keypoints, "override io.keypoints_file");
  strides->add_option("-o,--out", out_dir, "override io.out_dir");

  fs::path spec_path, synth_out;
  auto* synth = app.add_subcommand("synth", "render a synthetic scene and runner trace");
  synth->add_option("-s,--spec", spec_path, "scene/trace spec (INI)")->required();
  synth->add_option("-o,--out", synth_out, "output directory")->required();

  std::vector<fs::path> reports;
  std::optional<fs::path> csv_path;
  auto* summarize = app.add_subcommand("summarize", "compare stride reports per athlete and source");
  summarize->add_option("reports", reports, "strides.json files, in source order")->required();
  summarize->add_option("--csv", csv_path, "also write the table as CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    const auto load = [&] {
      ts::RunConfig c = ts::load_run_config(config_path);
      if (keypoints) c.io.keypoints_file = *keypoints;
      if (out_dir) c.io.out_dir = *out_dir;
      return c;
    };
    if (*rectify) {
      const ts::Rectification r = ts::cmd_rectify(load());
      int used = 0;
      for (const auto& f : r.frames) used += f.skip_reason.empty() ? 1 : 0;
      std::cout << fmt::format("{} of {} frames used, vanishing point ({:.1f}, {:.1f}), reference row {:.1f}\n", used,
                               r.frames.size(), r.vp.p.x, r.vp.p.y, r.reference_y);
    } else if (*strides) {
      const ts::StrideReport report = ts::cmd_strides(load());
      for (const auto& w : report.warnings) std::cerr << "warning: " << w.message << "\n";
      std::cout << fmt::format("{} contacts, {} strides, average {:.3f} m\n", report.contacts.size(),
                               report.strides.size(), report.average_length_m);
    } else if (*synth) {
      ts::cmd_synth(ts::load_synth_spec(spec_path), synth_out);
    } else if (*summarize) {
      const ts::SummaryTable table = ts::cmd_summarize(reports);
      std::cout << ts::to_text(table);
      if (csv_path) {
        std::ofstream out(*csv_path, std::ios::binary);
        out << ts::to_csv(table);
        if (!out) throw ts::Error(ts::ErrorCode::IoError, "cannot write " + csv_path->string());
      }
    }
  } catch (const ts::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
