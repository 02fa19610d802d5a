#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "otbmorph/core.hpp"

namespace otb {

class DegenerateGeometryError : public Error {
 public:
  using Error::Error;
};

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  bool operator==(const Point2&) const = default;
};

/// Three vertex indices into a point list, stored in ascending order.
struct Triangle {
  std::array<std::size_t, 3> v{};

  auto operator<=>(const Triangle&) const = default;
};

/// Row-major 2x3 affine map: [x', y'] = M * [x, y, 1].
using Affine = std::array<std::array<double, 3>, 2>;

/// Twice the signed area of (a, b, c); positive for counter-clockwise order
/// in a y-up frame.
double orient2d(const Point2& a, const Point2& b, const Point2& c);

/// Delaunay triangulation of `points` (Bowyer-Watson, points inserted in
/// index order). Co-circular ambiguities are resolved towards the
/// lexicographically smallest vertex-index triples, and the output is sorted,
/// so the result depends only on the point list. Exact duplicate points are
/// ignored (the first occurrence is used). Throws DegenerateGeometryError for
/// fewer than three distinct points or when all points are collinear.
std::vector<Triangle> delaunay(std::span<const Point2> points);

/// `points` followed by the 4 frame corners and 4 edge midpoints of a
/// width x height frame, in the order TL, T-mid, TR, R-mid, BR, B-mid, BL, L-mid.
std::vector<Point2> with_frame_points(std::span<const Point2> points, double width, double height);

/// Delaunay triangulation of the frame-augmented point set. Triangle indices
/// refer to with_frame_points(points, width, height).
std::vector<Triangle> triangulate(std::span<const Point2> points, double width, double height);

/// The unique affine map taking src[i] to dst[i]. Throws
/// DegenerateGeometryError when src has (near) zero area.
Affine affine_from_triangles(const std::array<Point2, 3>& src, const std::array<Point2, 3>& dst);

Point2 apply(const Affine& m, const Point2& p);

/// For every pixel (centre at x + 0.5, y + 0.5) of a width x height raster,
/// the index of the triangle that owns it, or -1 if none does.
///
/// Pixels strictly inside a triangle belong to it. Pixels on an edge or a
/// vertex are resolved as if displaced by an infinitesimal step towards +x
/// (then +y), so pixels covered by a triangle mesh are owned exactly once.
std::vector<int> pixel_owners(std::span<const Point2> points, std::span<const Triangle> triangles,
                              int width, int height);

/// The ownership rule used by pixel_owners for a single triangle.
bool pixel_in_triangle(std::span<const Point2> points, const Triangle& t, int x, int y);

}  // namespace otb
