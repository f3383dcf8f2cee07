#pragma once

#include "trackstride/geometry.hpp"
#include "trackstride/homography.hpp"
#include "trackstride/random.hpp"
#include "trackstride/synthetic.hpp"

#include <Eigen/Core>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <unistd.h>

namespace fixtures {

using trackstride::Homography;
using trackstride::Rng;

/// Plane-to-plane map that stays well conditioned over [0, 1000]^2:
/// random affine part with singular values in [0.3, 3] plus a small
/// perspective row, so every point of the square keeps w in [0.2, 1.8].
inline Eigen::Matrix3d random_homography(Rng& rng) {
  for (;;) {
    Eigen::Matrix3d m;
    m << rng.uniform(-3, 3), rng.uniform(-3, 3), rng.uniform(-500, 500),  //
        rng.uniform(-3, 3), rng.uniform(-3, 3), rng.uniform(-500, 500),   //
        rng.uniform(-4e-4, 4e-4), rng.uniform(-4e-4, 4e-4), 1.0;
    Eigen::JacobiSVD<Eigen::Matrix2d> svd(m.topLeftCorner<2, 2>());
    const auto s = svd.singularValues();
    if (s(1) >= 0.3 && s(0) <= 3.0) return m;
  }
}

inline Eigen::Vector2d random_point(Rng& rng, double lo = 0.0, double hi = 1000.0) {
  return {rng.uniform(lo, hi), rng.uniform(lo, hi)};
}

inline double triangle_area(const Eigen::Vector2d& a, const Eigen::Vector2d& b, const Eigen::Vector2d& c) {
  const Eigen::Vector2d u = b - a;
  const Eigen::Vector2d v = c - a;
  return 0.5 * std::abs(u.x() * v.y() - u.y() * v.x());
}

/// Four points of [0, 1000]^2 with every triangle larger than min_area.
inline Eigen::Matrix<double, 2, 4> spread_quad(Rng& rng, double min_area = 5000.0) {
  for (;;) {
    Eigen::Matrix<double, 2, 4> q;
    for (int i = 0; i < 4; ++i) q.col(i) = random_point(rng);
    bool ok = true;
    for (int i = 0; i < 4 && ok; ++i) {
      Eigen::Vector2d t[3];
      int k = 0;
      for (int j = 0; j < 4; ++j) {
        if (j != i) t[k++] = q.col(j);
      }
      ok = triangle_area(t[0], t[1], t[2]) > min_area;
    }
    if (ok) return q;
  }
}

inline Eigen::Vector2d project(const Eigen::Matrix3d& h, const Eigen::Vector2d& p) {
  return (h * p.homogeneous()).hnormalized();
}

/// Side-of-track camera with slightly randomized placement and the given
/// edge noise. Yaw tilts the horizontals by a few degrees.
inline trackstride::SceneSpec random_scene(Rng& rng, std::uint64_t seed, double max_dropout, double max_jitter,
                                           double max_yaw_deg = 3.0) {
  trackstride::SceneSpec spec = trackstride::SceneSpec::defaults();
  trackstride::CameraSpec cam;
  cam.distance_m = rng.uniform(5.5, 6.5);
  cam.height_m = rng.uniform(6.5, 7.5);
  cam.yaw_deg = rng.uniform(-max_yaw_deg, max_yaw_deg);
  cam.x_m = spec.world.lane_width_m / 2 + rng.uniform(-0.3, 0.3);
  spec.truth_h = trackstride::camera_homography(cam, spec.world, spec.width, spec.height);
  spec.noise.dropout_prob = rng.uniform(0.0, max_dropout);
  spec.noise.jitter_px = rng.uniform(0.0, max_jitter);
  spec.rng_seed = seed;
  return spec;
}

/// Scratch directory removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("trackstride_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void spit(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

}  // namespace fixtures
