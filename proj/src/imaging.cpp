#include "trackstride/imaging.hpp"

#include "trackstride/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace trackstride {

GrayImage::GrayImage(int width, int height, float fill) {
  if (width < 1 || height < 1) {
    throw Error(ErrorCode::DimensionMismatch, "image dimensions must be >= 1");
  }
  pixels = RowMajorArray<float>::Constant(height, width, fill);
}

GrayImage::GrayImage(RowMajorArray<float> data) : pixels(std::move(data)) {
  if (pixels.rows() < 1 || pixels.cols() < 1) {
    throw Error(ErrorCode::DimensionMismatch, "image dimensions must be >= 1");
  }
}

EdgeMap::EdgeMap(int width, int height) {
  if (width < 1 || height < 1) {
    throw Error(ErrorCode::DimensionMismatch, "edge map dimensions must be >= 1");
  }
  bits = RowMajorArray<std::uint8_t>::Zero(height, width);
}

namespace {

double cross(const PixelPoint& o, const PixelPoint& a, const PixelPoint& b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

bool on_segment(const PixelPoint& p, const PixelPoint& a, const PixelPoint& b) {
  if (std::abs(cross(a, b, p)) > 1e-9 * std::max(1.0, (b.vec() - a.vec()).norm())) return false;
  return p.x >= std::min(a.x, b.x) - 1e-9 && p.x <= std::max(a.x, b.x) + 1e-9 &&
         p.y >= std::min(a.y, b.y) - 1e-9 && p.y <= std::max(a.y, b.y) + 1e-9;
}

bool segments_cross(const PixelPoint& a, const PixelPoint& b, const PixelPoint& c,
                    const PixelPoint& d) {
  const double d1 = cross(c, d, a);
  const double d2 = cross(c, d, b);
  const double d3 = cross(a, b, c);
  const double d4 = cross(a, b, d);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0))) {
    return true;
  }
  return on_segment(a, c, d) || on_segment(b, c, d) || on_segment(c, a, b) || on_segment(d, a, b);
}

int clamp_index(int i, int n) { return std::clamp(i, 0, n - 1); }

// Even-odd rule; points on the boundary count as inside.
bool polygon_contains(const std::vector<PixelPoint>& poly, const PixelPoint& p) {
  const auto n = poly.size();
  bool inside = false;
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const auto& a = poly[i];
    const auto& b = poly[j];
    if (on_segment(p, a, b)) return true;
    if ((a.y > p.y) != (b.y > p.y)) {
      const double x_cross = (b.x - a.x) * (p.y - a.y) / (b.y - a.y) + a.x;
      if (p.x < x_cross) inside = !inside;
    }
  }
  return inside;
}

}  // namespace

RoiPolygon::RoiPolygon(std::vector<PixelPoint> vertices) : vertices_(std::move(vertices)) {
  const auto n = vertices_.size();
  if (n < 3) throw Error(ErrorCode::InvalidPolygon, "ROI needs at least 3 vertices");
  double area2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& p = vertices_[i];
    const auto& q = vertices_[(i + 1) % n];
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
      throw Error(ErrorCode::InvalidPolygon, "ROI vertices must be finite");
    }
    area2 += p.x * q.y - q.x * p.y;
  }
  if (std::abs(area2) < 1e-9) throw Error(ErrorCode::InvalidPolygon, "ROI has zero area");
  // non-adjacent edges must not touch
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (j == i + 1 || (i == 0 && j == n - 1)) continue;
      if (segments_cross(vertices_[i], vertices_[(i + 1) % n], vertices_[j],
                         vertices_[(j + 1) % n])) {
        throw Error(ErrorCode::InvalidPolygon, "ROI is self-intersecting");
      }
    }
  }
}

bool RoiPolygon::contains(const PixelPoint& p) const { return polygon_contains(vertices_, p); }

GrayImage to_grayscale(std::span<const std::uint8_t> rgb, int width, int height) {
  if (width < 1 || height < 1 ||
      rgb.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height) * 3) {
    throw Error(ErrorCode::DimensionMismatch, "RGB raster length must be 3 * width * height");
  }
  GrayImage out(width, height);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const std::size_t i = (static_cast<std::size_t>(y) * width + x) * 3;
      const double luma = 0.299 * rgb[i] + 0.587 * rgb[i + 1] + 0.114 * rgb[i + 2];
      out(x, y) = static_cast<float>(std::clamp(std::round(luma), 0.0, 255.0));
    }
  }
  return out;
}

std::vector<double> gaussian_kernel(double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw Error(ErrorCode::InvalidSigma, "sigma must be > 0");
  }
  const int radius = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> k(2 * radius + 1);
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    k[i + radius] = std::exp(-0.5 * i * i / (sigma * sigma));
    sum += k[i + radius];
  }
  for (double& v : k) v /= sum;
  return k;
}

GrayImage gaussian_blur(const GrayImage& img, double sigma) {
  const auto k = gaussian_kernel(sigma);
  const int r = static_cast<int>(k.size() / 2);
  const int w = img.width();
  const int h = img.height();

  RowMajorArray<double> tmp(h, w);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int i = -r; i <= r; ++i) acc += k[i + r] * img(clamp_index(x + i, w), y);
      tmp(y, x) = acc;
    }
  }
  GrayImage out(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int i = -r; i <= r; ++i) acc += k[i + r] * tmp(clamp_index(y + i, h), x);
      out(x, y) = static_cast<float>(acc);
    }
  }
  return out;
}

Gradients sobel(const GrayImage& img) {
  const int w = img.width();
  const int h = img.height();
  Gradients g{RowMajorArray<float>::Zero(h, w), RowMajorArray<float>::Zero(h, w)};
  const auto at = [&](int x, int y) { return img(clamp_index(x, w), clamp_index(y, h)); };
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      g.gx(y, x) = (at(x + 1, y - 1) + 2.0f * at(x + 1, y) + at(x + 1, y + 1)) -
                   (at(x - 1, y - 1) + 2.0f * at(x - 1, y) + at(x - 1, y + 1));
      g.gy(y, x) = (at(x - 1, y + 1) + 2.0f * at(x, y + 1) + at(x + 1, y + 1)) -
                   (at(x - 1, y - 1) + 2.0f * at(x, y - 1) + at(x + 1, y - 1));
    }
  }
  return g;
}

EdgeMap canny(const GrayImage& img, double low, double high) {
  if (!(low >= 0.0) || !(low < high)) {
    throw Error(ErrorCode::InvalidThresholds, "require 0 <= low < high");
  }
  const int w = img.width();
  const int h = img.height();
  const Gradients g = sobel(img);
  const RowMajorArray<float> mag = g.magnitude();
  const auto mag_at = [&](int x, int y) {
    return (x < 0 || y < 0 || x >= w || y >= h) ? 0.0f : mag(y, x);
  };

  // 0 = none, 1 = weak, 2 = strong
  RowMajorArray<std::uint8_t> cls = RowMajorArray<std::uint8_t>::Zero(h, w);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const float m = mag(y, x);
      if (m <= 0.0f || m < low) continue;
      // quantize the gradient direction to 0, 45, 90 or 135 degrees
      double deg = std::atan2(g.gy(y, x), g.gx(y, x)) * 180.0 / std::numbers::pi;
      if (deg < 0.0) deg += 180.0;
      int dx = 0;
      int dy = 0;
      if (deg < 22.5 || deg >= 157.5) {
        dx = 1;
      } else if (deg < 67.5) {
        dx = 1;
        dy = 1;
      } else if (deg < 112.5) {
        dy = 1;
      } else {
        dx = -1;
        dy = 1;
      }
      // strict on one side, non-strict on the other so plateaus keep one pixel
      const bool is_max = m >= mag_at(x + dx, y + dy) && m > mag_at(x - dx, y - dy);
      if (!is_max) continue;
      cls(y, x) = m >= high ? 2 : 1;
    }
  }

  EdgeMap out(w, h);
  std::vector<std::pair<int, int>> stack;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (cls(y, x) == 2 && !out.at(x, y)) {
        out.set(x, y);
        stack.emplace_back(x, y);
      }
      while (!stack.empty()) {
        const auto [cx, cy] = stack.back();
        stack.pop_back();
        for (int ny = cy - 1; ny <= cy + 1; ++ny) {
          for (int nx = cx - 1; nx <= cx + 1; ++nx) {
            if (!out.contains(nx, ny) || out.at(nx, ny) || cls(ny, nx) == 0) continue;
            out.set(nx, ny);
            stack.emplace_back(nx, ny);
          }
        }
      }
    }
  }
  return out;
}

EdgeMap apply_roi(const EdgeMap& edges, const RoiPolygon& roi) {
  const double max_x = edges.width() - 1;
  const double max_y = edges.height() - 1;
  std::vector<PixelPoint> clamped;
  clamped.reserve(roi.vertices().size());
  for (const auto& v : roi.vertices()) {
    clamped.push_back({std::clamp(v.x, 0.0, max_x), std::clamp(v.y, 0.0, max_y)});
  }
  EdgeMap out = edges;
  for (int y = 0; y < edges.height(); ++y) {
    for (int x = 0; x < edges.width(); ++x) {
      if (out.at(x, y) && !polygon_contains(clamped, {static_cast<double>(x), static_cast<double>(y)})) {
        out.set(x, y, false);
      }
    }
  }
  return out;
}

}  // namespace trackstride
