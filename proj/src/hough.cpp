#include "trackstride/hough.hpp"

#include "trackstride/error.hpp"
#include "trackstride/random.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace trackstride {

void PhtParams::validate() const {
  if (!(rho_resolution > 0.0)) throw Error(ErrorCode::InvalidParams, "rho_resolution must be > 0");
  if (!(theta_resolution > 0.0) || theta_resolution > 90.0) {
    throw Error(ErrorCode::InvalidParams, "theta_resolution must be in (0, 90]");
  }
  if (vote_threshold < 1) throw Error(ErrorCode::InvalidParams, "vote_threshold must be >= 1");
  if (!(min_line_length >= 1.0)) throw Error(ErrorCode::InvalidParams, "min_line_length must be >= 1");
  if (!(max_line_gap >= 0.0)) throw Error(ErrorCode::InvalidParams, "max_line_gap must be >= 0");
  if (walk_band < 0) throw Error(ErrorCode::InvalidParams, "walk_band must be >= 0");
}

std::vector<Eigen::Vector2i> bresenham(const Eigen::Vector2i& a, const Eigen::Vector2i& b) {
  std::vector<Eigen::Vector2i> out;
  int x0 = a.x(), y0 = a.y();
  const int dx = std::abs(b.x() - x0);
  const int dy = -std::abs(b.y() - y0);
  const int sx = x0 < b.x() ? 1 : -1;
  const int sy = y0 < b.y() ? 1 : -1;
  int err = dx + dy;
  out.reserve(static_cast<std::size_t>(std::max(dx, -dy)) + 1);
  for (;;) {
    out.emplace_back(x0, y0);
    if (x0 == b.x() && y0 == b.y()) break;
    const int e2 = 2 * err;
    if (e2 >= dy) {
      err += dy;
      x0 += sx;
    }
    if (e2 <= dx) {
      err += dx;
      y0 += sy;
    }
  }
  return out;
}

EdgeMap render_test_line(int width, int height, const PixelPoint& p1, const PixelPoint& p2) {
  EdgeMap out(width, height);
  const Eigen::Vector2i a(static_cast<int>(std::lround(p1.x)), static_cast<int>(std::lround(p1.y)));
  const Eigen::Vector2i b(static_cast<int>(std::lround(p2.x)), static_cast<int>(std::lround(p2.y)));
  if (!out.contains(a.x(), a.y()) || !out.contains(b.x(), b.y())) {
    throw Error(ErrorCode::OutOfBounds, "test line endpoint outside image");
  }
  for (const auto& p : bresenham(a, b)) out.set(p.x(), p.y());
  return out;
}

namespace {

class Accumulator {
 public:
  Accumulator(int width, int height, const PhtParams& params) {
    num_angle_ = std::max(1, static_cast<int>(std::lround(180.0 / params.theta_resolution)));
    num_rho_ = static_cast<int>(std::lround(((width + height) * 2 + 1) / params.rho_resolution));
    cos_.resize(num_angle_);
    sin_.resize(num_angle_);
    theta_.resize(num_angle_);
    for (int n = 0; n < num_angle_; ++n) {
      const double theta = n * params.theta_resolution * std::numbers::pi / 180.0;
      cos_[n] = std::cos(theta) / params.rho_resolution;
      sin_[n] = std::sin(theta) / params.rho_resolution;
      theta_[n] = theta;
    }
    votes_.assign(static_cast<std::size_t>(num_angle_) * num_rho_, 0);
  }

  /// Adds the point's votes and returns the angle index of the strongest bin it touched.
  std::pair<int, int> vote(int x, int y) {
    int best = -1;
    int best_n = 0;
    for (int n = 0; n < num_angle_; ++n) {
      const int v = ++votes_[index(n, x, y)];
      if (v > best) {
        best = v;
        best_n = n;
      }
    }
    return {best, best_n};
  }

  void withdraw(int x, int y) {
    for (int n = 0; n < num_angle_; ++n) --votes_[index(n, x, y)];
  }

  double theta(int n) const { return theta_.at(n); }

 private:
  std::size_t index(int n, int x, int y) const {
    const int r = static_cast<int>(std::lround(x * cos_[n] + y * sin_[n])) + (num_rho_ - 1) / 2;
    return static_cast<std::size_t>(n) * num_rho_ + r;
  }

  int num_angle_ = 0;
  int num_rho_ = 0;
  std::vector<double> cos_, sin_;
  std::vector<double> theta_;
  std::vector<int> votes_;
};

struct Walk {
  std::vector<Eigen::Vector2i> pixels;
};

// Walks the line through start with direction dir in both senses, collecting
// edge pixels within +-band of the line (measured across the major axis).
Walk walk_line(const EdgeMap& edges, const Eigen::Vector2d& start, const Eigen::Vector2d& dir,
               int band, double max_gap) {
  Walk w;
  const bool x_major = std::abs(dir.x()) >= std::abs(dir.y());
  const double slope = x_major ? dir.y() / dir.x() : dir.x() / dir.y();
  const double major0 = x_major ? start.x() : start.y();
  const double minor0 = x_major ? start.y() : start.x();
  const int major_start = static_cast<int>(std::lround(major0));
  for (int sense : {1, -1}) {
    int gap = 0;
    for (int i = (sense == 1 ? 0 : 1);; ++i) {
      const int major = major_start + sense * i;
      const double minor = minor0 + (major - major0) * slope;
      const int minor_c = static_cast<int>(std::lround(minor));
      if (x_major ? (major < 0 || major >= edges.width()) : (major < 0 || major >= edges.height())) {
        break;
      }
      bool found = false;
      for (int o = -band; o <= band; ++o) {
        const int x = x_major ? major : minor_c + o;
        const int y = x_major ? minor_c + o : major;
        if (edges.contains(x, y) && edges.at(x, y)) {
          w.pixels.emplace_back(x, y);
          found = true;
        }
      }
      if (found) {
        gap = 0;
      } else if (++gap > max_gap) {
        break;
      }
    }
  }
  return w;
}

struct LineFit {
  Eigen::Vector2d centroid;
  Eigen::Vector2d direction;
};

LineFit fit_line(const std::vector<Eigen::Vector2i>& pixels) {
  Eigen::Vector2d mean = Eigen::Vector2d::Zero();
  for (const auto& p : pixels) mean += p.cast<double>();
  mean /= static_cast<double>(pixels.size());
  Eigen::Matrix2d cov = Eigen::Matrix2d::Zero();
  for (const auto& p : pixels) {
    const Eigen::Vector2d d = p.cast<double>() - mean;
    cov += d * d.transpose();
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(cov);
  return {mean, es.eigenvectors().col(1).normalized()};
}

}  // namespace

std::vector<Segment> probabilistic_hough(const EdgeMap& edges, const PhtParams& params) {
  params.validate();
  const int width = edges.width();
  const int height = edges.height();

  std::vector<Eigen::Vector2i> points;
  RowMajorArray<std::uint8_t> available = RowMajorArray<std::uint8_t>::Zero(height, width);
  RowMajorArray<std::uint8_t> voted = RowMajorArray<std::uint8_t>::Zero(height, width);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      if (edges.at(x, y)) {
        points.emplace_back(x, y);
        available(y, x) = 1;
      }
    }
  }

  std::vector<Segment> out;
  if (points.empty()) return out;

  Accumulator acc(width, height, params);
  Rng rng(params.rng_seed);

  for (std::size_t count = points.size(); count > 0; --count) {
    const std::size_t idx = rng.below(count);
    const Eigen::Vector2i pt = points[idx];
    points[idx] = points[count - 1];
    if (!available(pt.y(), pt.x())) continue;

    const auto [max_votes, max_n] = acc.vote(pt.x(), pt.y());
    voted(pt.y(), pt.x()) = 1;
    if (max_votes < params.vote_threshold) continue;

    // the bin's normal is (cos t, sin t); the line runs perpendicular to it
    const double theta = acc.theta(max_n);
    Eigen::Vector2d dir(-std::sin(theta), std::cos(theta));
    Eigen::Vector2d start = pt.cast<double>();
    Walk best = walk_line(edges, start, dir, params.walk_band, params.max_line_gap);
    LineFit fit{start, dir};
    for (int iter = 0; iter < 10 && best.pixels.size() >= 2; ++iter) {
      const LineFit refit = fit_line(best.pixels);
      const Eigen::Vector2d seed = refit.centroid +
                                   refit.direction.dot(pt.cast<double>() - refit.centroid) * refit.direction;
      Walk next = walk_line(edges, seed, refit.direction, params.walk_band, params.max_line_gap);
      if (next.pixels.size() <= best.pixels.size()) {
        fit = refit;
        break;
      }
      best = std::move(next);
      fit = fit_line(best.pixels);
    }

    double t_min = 0.0;
    double t_max = 0.0;
    std::size_t n_available = 0;
    for (std::size_t i = 0; i < best.pixels.size(); ++i) {
      const auto& p = best.pixels[i];
      const double t = fit.direction.dot(p.cast<double>() - fit.centroid);
      if (i == 0 || t < t_min) t_min = t;
      if (i == 0 || t > t_max) t_max = t;
      if (available(p.y(), p.x())) ++n_available;
    }
    // a walk mostly over pixels of earlier segments only re-traces them
    const bool good = t_max - t_min >= params.min_line_length && 2 * n_available >= best.pixels.size();

    for (const auto& p : best.pixels) {
      if (!available(p.y(), p.x())) continue;
      available(p.y(), p.x()) = 0;
      if (voted(p.y(), p.x())) acc.withdraw(p.x(), p.y());
    }
    if (available(pt.y(), pt.x())) {
      available(pt.y(), pt.x()) = 0;
      acc.withdraw(pt.x(), pt.y());
    }
    if (!good) continue;
    const Eigen::Vector2d a = fit.centroid + t_min * fit.direction;
    const Eigen::Vector2d b = fit.centroid + t_max * fit.direction;
    out.emplace_back(PixelPoint::from(a), PixelPoint::from(b));
  }
  return out;
}

}  // namespace trackstride
