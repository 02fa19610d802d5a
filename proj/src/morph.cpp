#include "otbmorph/morph.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

namespace otb {
namespace {

void require_alpha(double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw Error(fmt::format("morph weight alpha={} outside [0, 1]", alpha));
  }
}

std::vector<Point2> blend_points(std::span<const Point2> a, std::span<const Point2> b, double alpha) {
  std::vector<Point2> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    out[i] = {(1.0 - alpha) * a[i].x + alpha * b[i].x, (1.0 - alpha) * a[i].y + alpha * b[i].y};
  }
  return out;
}

}  // namespace

Image::Image(int width, int height, std::uint8_t fill)
    : width_(width), height_(height), data_(static_cast<std::size_t>(width) * height * 3, fill) {
  if (width <= 0 || height <= 0) throw Error(fmt::format("invalid image size {}x{}", width, height));
}

void Landmarks::validate() const {
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& p = points[i];
    if (!std::isfinite(p.x) || !std::isfinite(p.y) || p.x < 0 || p.y < 0 || p.x > width ||
        p.y > height) {
      throw Error(fmt::format("landmark {} ({}, {}) outside the {}x{} frame", i, p.x, p.y, width, height));
    }
  }
}

void RasterFace::validate() const {
  if (landmarks.width != pixels.width() || landmarks.height != pixels.height()) {
    throw Error(fmt::format("landmark frame {}x{} does not match image {}x{}", landmarks.width,
                            landmarks.height, pixels.width(), pixels.height()));
  }
  landmarks.validate();
}

double sample_bilinear(const Image& img, double x, double y, int channel) {
  const double px = std::clamp(x - 0.5, 0.0, static_cast<double>(img.width() - 1));
  const double py = std::clamp(y - 0.5, 0.0, static_cast<double>(img.height() - 1));
  const int x0 = static_cast<int>(std::floor(px));
  const int y0 = static_cast<int>(std::floor(py));
  const int x1 = std::min(x0 + 1, img.width() - 1);
  const int y1 = std::min(y0 + 1, img.height() - 1);
  const double fx = px - x0;
  const double fy = py - y0;
  const double top = (1.0 - fx) * img.at(x0, y0, channel) + fx * img.at(x1, y0, channel);
  const double bottom = (1.0 - fx) * img.at(x0, y1, channel) + fx * img.at(x1, y1, channel);
  return (1.0 - fy) * top + fy * bottom;
}

std::vector<double> warp_piecewise_affine(const Image& src, std::span<const Point2> src_points,
                                          std::span<const Point2> dst_points,
                                          std::span<const Triangle> triangles) {
  const int w = src.width();
  const int h = src.height();
  const auto owner = pixel_owners(dst_points, triangles, w, h);

  // Inverse maps: output geometry -> source geometry, one per triangle.
  std::vector<Affine> inverse(triangles.size());
  for (std::size_t i = 0; i < triangles.size(); ++i) {
    const auto& v = triangles[i].v;
    inverse[i] = affine_from_triangles({dst_points[v[0]], dst_points[v[1]], dst_points[v[2]]},
                                       {src_points[v[0]], src_points[v[1]], src_points[v[2]]});
  }

  std::vector<double> out(static_cast<std::size_t>(w) * h * 3, 0.0);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const int t = owner[static_cast<std::size_t>(y) * w + x];
      if (t < 0) {
        throw DegenerateGeometryError(fmt::format("pixel ({}, {}) not covered by the mesh", x, y));
      }
      const Point2 s = apply(inverse[t], {x + 0.5, y + 0.5});
      for (int c = 0; c < 3; ++c) {
        out[(static_cast<std::size_t>(y) * w + x) * 3 + c] = sample_bilinear(src, s.x, s.y, c);
      }
    }
  }
  return out;
}

RasterFace morph_raster(const RasterFace& a, const RasterFace& b, double alpha) {
  require_alpha(alpha);
  if (a.pixels.width() != b.pixels.width() || a.pixels.height() != b.pixels.height()) {
    throw DimensionMismatchError(fmt::format("morph of {}x{} and {}x{} images", a.pixels.width(),
                                             a.pixels.height(), b.pixels.width(), b.pixels.height()));
  }
  if (a.landmarks.points.size() != b.landmarks.points.size()) {
    throw DimensionMismatchError(fmt::format("morph of faces with {} and {} landmarks",
                                             a.landmarks.points.size(), b.landmarks.points.size()));
  }
  a.validate();
  b.validate();

  const int w = a.pixels.width();
  const int h = a.pixels.height();
  const auto blended = blend_points(a.landmarks.points, b.landmarks.points, alpha);
  const auto dst = with_frame_points(blended, w, h);
  const auto src_a = with_frame_points(a.landmarks.points, w, h);
  const auto src_b = with_frame_points(b.landmarks.points, w, h);
  const auto triangles = delaunay(dst);

  const auto warped_a = warp_piecewise_affine(a.pixels, src_a, dst, triangles);
  const auto warped_b = warp_piecewise_affine(b.pixels, src_b, dst, triangles);

  RasterFace out{Image(w, h), Landmarks{blended, w, h}};
  auto pixels = out.pixels.data();
  for (std::size_t i = 0; i < pixels.size(); ++i) {
    const double v = (1.0 - alpha) * warped_a[i] + alpha * warped_b[i];
    pixels[i] = static_cast<std::uint8_t>(std::clamp(std::floor(v + 0.5), 0.0, 255.0));
  }
  return out;
}

ParametricFace morph_parametric(const ParametricFace& a, const ParametricFace& b, double alpha) {
  require_alpha(alpha);
  if (a.params.size() != b.params.size()) {
    throw DimensionMismatchError(
        fmt::format("morph of parametric faces of dimension {} and {}", a.params.size(), b.params.size()));
  }
  ParametricFace out{std::vector<double>(a.params.size())};
  for (std::size_t i = 0; i < a.params.size(); ++i) {
    out.params[i] = (1.0 - alpha) * a.params[i] + alpha * b.params[i];
  }
  return out;
}

}  // namespace otb
