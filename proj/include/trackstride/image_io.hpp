#pragma once

#include "trackstride/imaging.hpp"

#include <cstdint>
#include <filesystem>
#include <vector>

namespace trackstride {

/// Interleaved 8-bit RGB raster, used for overlays.
struct RgbImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> data;

  RgbImage() = default;
  RgbImage(int w, int h) : width(w), height(h), data(static_cast<std::size_t>(w) * h * 3, 0) {}
  static RgbImage from_gray(const GrayImage& img);

  void put(int x, int y, std::uint8_t r, std::uint8_t g, std::uint8_t b);
  void disc(const PixelPoint& c, double radius, std::uint8_t r, std::uint8_t g, std::uint8_t b);
  void line(const PixelPoint& p, const PixelPoint& q, std::uint8_t r, std::uint8_t g,
            std::uint8_t b);
};

/// Reads an 8-bit binary PGM (P5) or PNG frame. Color PNGs go through to_grayscale.
GrayImage read_gray_image(const std::filesystem::path& path);

/// Edge pixels as 255, background as 0.
void write_pgm(const std::filesystem::path& path, const EdgeMap& edges);
void write_pgm(const std::filesystem::path& path, const GrayImage& img);
void write_png(const std::filesystem::path& path, const RgbImage& img);

/// Edge map from an image: any nonzero pixel is an edge.
EdgeMap threshold_nonzero(const GrayImage& img);

/// *.pgm and *.png files of a directory in lexicographic order.
std::vector<std::filesystem::path> list_frames(const std::filesystem::path& dir);

}  // namespace trackstride
