#pragma once

#include "trackstride/geometry.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <span>
#include <vector>

namespace trackstride {

template <typename T>
using RowMajorArray = Eigen::Array<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Single-channel intensity raster, rows = height, cols = width, values in [0, 255].
struct GrayImage {
  RowMajorArray<float> pixels;

  GrayImage() = default;
  GrayImage(int width, int height, float fill = 0.0f);
  explicit GrayImage(RowMajorArray<float> data);

  int width() const { return static_cast<int>(pixels.cols()); }
  int height() const { return static_cast<int>(pixels.rows()); }
  float operator()(int x, int y) const { return pixels(y, x); }
  float& operator()(int x, int y) { return pixels(y, x); }
};

/// Binary edge raster; nonzero entries are edge pixels.
struct EdgeMap {
  RowMajorArray<std::uint8_t> bits;

  EdgeMap() = default;
  EdgeMap(int width, int height);

  int width() const { return static_cast<int>(bits.cols()); }
  int height() const { return static_cast<int>(bits.rows()); }
  bool at(int x, int y) const { return bits(y, x) != 0; }
  void set(int x, int y, bool on = true) { bits(y, x) = on ? 1 : 0; }
  bool contains(int x, int y) const { return x >= 0 && y >= 0 && x < width() && y < height(); }
  long count() const { return (bits != 0).count(); }

  bool operator==(const EdgeMap& o) const {
    return bits.rows() == o.bits.rows() && bits.cols() == o.bits.cols() && (bits == o.bits).all();
  }
};

/// Simple polygon with at least three vertices and nonzero area.
class RoiPolygon {
 public:
  /// Throws Error{InvalidPolygon} for fewer than 3 vertices, zero area, or self-intersection.
  explicit RoiPolygon(std::vector<PixelPoint> vertices);

  const std::vector<PixelPoint>& vertices() const { return vertices_; }
  /// Even-odd rule containment.
  bool contains(const PixelPoint& p) const;

 private:
  std::vector<PixelPoint> vertices_;
};

/// BT.601 luma from an interleaved 8-bit RGB raster.
GrayImage to_grayscale(std::span<const std::uint8_t> rgb, int width, int height);

/// Normalized 1D Gaussian kernel of radius ceil(3 sigma).
std::vector<double> gaussian_kernel(double sigma);

/// Separable Gaussian smoothing with edge-clamp borders.
GrayImage gaussian_blur(const GrayImage& img, double sigma);

/// 3x3 Sobel responses with edge-clamp borders.
struct Gradients {
  RowMajorArray<float> gx;
  RowMajorArray<float> gy;
  RowMajorArray<float> magnitude() const { return (gx.square() + gy.square()).sqrt(); }
};
Gradients sobel(const GrayImage& img);

/// Canny edge detection: Sobel gradients, four-direction non-maximum
/// suppression and 8-connected hysteresis between low and high.
EdgeMap canny(const GrayImage& img, double low, double high);

/// Clears every edge pixel whose center lies outside roi.
EdgeMap apply_roi(const EdgeMap& edges, const RoiPolygon& roi);

}  // namespace trackstride
