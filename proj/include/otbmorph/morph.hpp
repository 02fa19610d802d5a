#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "otbmorph/triangulation.hpp"

namespace otb {

/// 8-bit RGB raster, row-major, 3 interleaved channels.
class Image {
 public:
  Image() = default;
  Image(int width, int height, std::uint8_t fill = 0);

  int width() const { return width_; }
  int height() const { return height_; }
  std::uint8_t& at(int x, int y, int c) { return data_[index(x, y, c)]; }
  std::uint8_t at(int x, int y, int c) const { return data_[index(x, y, c)]; }
  std::span<const std::uint8_t> data() const { return data_; }
  std::span<std::uint8_t> data() { return data_; }

  bool operator==(const Image&) const = default;

 private:
  std::size_t index(int x, int y, int c) const {
    return (static_cast<std::size_t>(y) * width_ + x) * 3 + c;
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> data_;
};

struct Landmarks {
  std::vector<Point2> points;
  int width = 0;
  int height = 0;

  /// Throws Error if a point lies outside [0, width] x [0, height] or is not finite.
  void validate() const;
};

struct RasterFace {
  Image pixels;
  Landmarks landmarks;

  /// Landmark frame must match the pixel dimensions.
  void validate() const;
};

struct ParametricFace {
  std::vector<double> params;
};

/// Bilinear sample at continuous coordinates (pixel centres sit at +0.5);
/// positions outside the image are clamped to the nearest edge pixel.
double sample_bilinear(const Image& img, double x, double y, int channel);

/// Piecewise-affine warp of `src` (with landmarks `src_points`) onto the
/// geometry `dst_points`, over `triangles` of `dst_points`. Returns
/// unrounded channel values, row-major with 3 channels, for a raster of the
/// same size as `src`.
std::vector<double> warp_piecewise_affine(const Image& src, std::span<const Point2> src_points,
                                          std::span<const Point2> dst_points,
                                          std::span<const Triangle> triangles);

/// Landmark-driven morph of two raster faces. The blended geometry
/// (1 - alpha) * a + alpha * b is triangulated with the frame points added,
/// both faces are warped onto it and cross-dissolved with the same weights.
RasterFace morph_raster(const RasterFace& a, const RasterFace& b, double alpha);

/// Convex combination (1 - alpha) * a + alpha * b.
ParametricFace morph_parametric(const ParametricFace& a, const ParametricFace& b, double alpha);

}  // namespace otb
