#include "otbmorph/triangulation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <utility>

#include <fmt/format.h>

namespace otb {
namespace {

using Edge = std::pair<std::size_t, std::size_t>;

Edge make_edge(std::size_t a, std::size_t b) { return a < b ? Edge{a, b} : Edge{b, a}; }

Triangle make_triangle(std::size_t a, std::size_t b, std::size_t c) {
  Triangle t{{a, b, c}};
  std::sort(t.v.begin(), t.v.end());
  return t;
}

// > 0 when d lies strictly inside the circumcircle of (a, b, c), for any
// orientation of (a, b, c).
long double in_circle(const Point2& a, const Point2& b, const Point2& c, const Point2& d) {
  const long double adx = static_cast<long double>(a.x) - d.x;
  const long double ady = static_cast<long double>(a.y) - d.y;
  const long double bdx = static_cast<long double>(b.x) - d.x;
  const long double bdy = static_cast<long double>(b.y) - d.y;
  const long double cdx = static_cast<long double>(c.x) - d.x;
  const long double cdy = static_cast<long double>(c.y) - d.y;
  const long double det = (adx * adx + ady * ady) * (bdx * cdy - cdx * bdy) -
                          (bdx * bdx + bdy * bdy) * (adx * cdy - cdx * ady) +
                          (cdx * cdx + cdy * cdy) * (adx * bdy - bdx * ady);
  const long double orient = (static_cast<long double>(b.x) - a.x) * (static_cast<long double>(c.y) - a.y) -
                             (static_cast<long double>(c.x) - a.x) * (static_cast<long double>(b.y) - a.y);
  return orient > 0 ? det : -det;
}

std::size_t third_vertex(const Triangle& t, const Edge& e) {
  for (std::size_t v : t.v) {
    if (v != e.first && v != e.second) return v;
  }
  return t.v[0];
}

std::map<Edge, std::vector<std::size_t>> edge_map(const std::vector<Triangle>& tris) {
  std::map<Edge, std::vector<std::size_t>> edges;
  for (std::size_t i = 0; i < tris.size(); ++i) {
    const auto& v = tris[i].v;
    edges[make_edge(v[0], v[1])].push_back(i);
    edges[make_edge(v[1], v[2])].push_back(i);
    edges[make_edge(v[0], v[2])].push_back(i);
  }
  return edges;
}

// One sweep of edge flips. With `cocircular` false, flips edges that fail the
// empty-circle test (Lawson legalization); with it true, flips co-circular
// quads whenever the flipped pair is lexicographically smaller.
bool flip_sweep(std::span<const Point2> pts, std::vector<Triangle>& tris, bool cocircular) {
  bool changed = false;
  for (const auto& [edge, owners] : edge_map(tris)) {
    if (owners.size() != 2) continue;
    const Triangle t1 = tris[owners[0]];
    const Triangle t2 = tris[owners[1]];
    // Skip quads touched by an earlier flip of this sweep.
    if (std::find(t1.v.begin(), t1.v.end(), edge.first) == t1.v.end() ||
        std::find(t1.v.begin(), t1.v.end(), edge.second) == t1.v.end() ||
        std::find(t2.v.begin(), t2.v.end(), edge.first) == t2.v.end() ||
        std::find(t2.v.begin(), t2.v.end(), edge.second) == t2.v.end()) {
      continue;
    }
    const std::size_t a = third_vertex(t1, edge);
    const std::size_t b = third_vertex(t2, edge);
    const long double ic = in_circle(pts[edge.first], pts[edge.second], pts[a], pts[b]);
    bool flip = false;
    const Triangle n1 = make_triangle(a, b, edge.first);
    const Triangle n2 = make_triangle(a, b, edge.second);
    if (!cocircular) {
      // The flipped quad must be convex for the new diagonal to be valid.
      const double s1 = orient2d(pts[a], pts[b], pts[edge.first]);
      const double s2 = orient2d(pts[a], pts[b], pts[edge.second]);
      flip = ic > 0 && ((s1 > 0 && s2 < 0) || (s1 < 0 && s2 > 0));
    } else if (ic == 0) {
      const auto old_pair = std::minmax(t1, t2);
      const auto new_pair = std::minmax(n1, n2);
      flip = new_pair < old_pair;
    }
    if (flip) {
      tris[owners[0]] = n1;
      tris[owners[1]] = n2;
      changed = true;
    }
  }
  return changed;
}

// Every boundary edge must be a supporting line of the point set; otherwise
// the mesh does not cover the convex hull.
void check_hull(std::span<const Point2> pts, std::span<const std::size_t> used,
                const std::vector<Triangle>& tris) {
  for (const auto& [edge, owners] : edge_map(tris)) {
    if (owners.size() > 2) {
      throw DegenerateGeometryError("triangulation produced a non-manifold edge");
    }
    if (owners.size() != 1) continue;
    const std::size_t w = third_vertex(tris[owners[0]], edge);
    const double side = orient2d(pts[edge.first], pts[edge.second], pts[w]);
    for (std::size_t p : used) {
      const double s = orient2d(pts[edge.first], pts[edge.second], pts[p]);
      if ((side > 0 && s < 0) || (side < 0 && s > 0)) {
        throw DegenerateGeometryError("triangulation does not cover the convex hull");
      }
    }
  }
}

}  // namespace

double orient2d(const Point2& a, const Point2& b, const Point2& c) {
  return (b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y);
}

std::vector<Triangle> delaunay(std::span<const Point2> points) {
  std::vector<std::size_t> used;
  {
    std::map<std::pair<double, double>, std::size_t> seen;
    for (std::size_t i = 0; i < points.size(); ++i) {
      if (!std::isfinite(points[i].x) || !std::isfinite(points[i].y)) {
        throw DegenerateGeometryError(fmt::format("point {} is not finite", i));
      }
      if (seen.emplace(std::pair{points[i].x, points[i].y}, i).second) used.push_back(i);
    }
  }
  if (used.size() < 3) {
    throw DegenerateGeometryError(fmt::format("need at least 3 distinct points, got {}", used.size()));
  }
  {
    bool collinear = true;
    const Point2& p0 = points[used[0]];
    const Point2& p1 = points[used[1]];
    for (std::size_t k = 2; k < used.size() && collinear; ++k) {
      collinear = orient2d(p0, p1, points[used[k]]) == 0.0;
    }
    if (collinear) throw DegenerateGeometryError("all points are collinear");
  }

  double min_x = points[used[0]].x, max_x = min_x, min_y = points[used[0]].y, max_y = min_y;
  for (std::size_t i : used) {
    min_x = std::min(min_x, points[i].x);
    max_x = std::max(max_x, points[i].x);
    min_y = std::min(min_y, points[i].y);
    max_y = std::max(max_y, points[i].y);
  }
  const double span = std::max({max_x - min_x, max_y - min_y, 1.0});
  const double cx = 0.5 * (min_x + max_x);
  const double cy = 0.5 * (min_y + max_y);
  const double far = 1e4 * span;

  // Working point list: input points followed by the three super vertices.
  std::vector<Point2> pts(points.begin(), points.end());
  const std::size_t s0 = pts.size();
  pts.push_back({cx - 2 * far, cy - far});
  pts.push_back({cx + 2 * far, cy - far});
  pts.push_back({cx, cy + 2 * far});

  std::vector<Triangle> tris{make_triangle(s0, s0 + 1, s0 + 2)};
  for (std::size_t p : used) {
    std::vector<Triangle> keep;
    std::map<Edge, int> cavity;
    for (const Triangle& t : tris) {
      if (in_circle(pts[t.v[0]], pts[t.v[1]], pts[t.v[2]], pts[p]) > 0) {
        ++cavity[make_edge(t.v[0], t.v[1])];
        ++cavity[make_edge(t.v[1], t.v[2])];
        ++cavity[make_edge(t.v[0], t.v[2])];
      } else {
        keep.push_back(t);
      }
    }
    for (const auto& [e, count] : cavity) {
      if (count == 1) keep.push_back(make_triangle(e.first, e.second, p));
    }
    tris = std::move(keep);
  }

  std::erase_if(tris, [&](const Triangle& t) { return t.v[2] >= s0; });
  std::erase_if(tris, [&](const Triangle& t) {
    return orient2d(pts[t.v[0]], pts[t.v[1]], pts[t.v[2]]) == 0.0;
  });

  for (int guard = 0; guard < 1000 && flip_sweep(points, tris, false); ++guard) {
  }
  for (int guard = 0; guard < 1000 && flip_sweep(points, tris, true); ++guard) {
  }
  check_hull(points, used, tris);

  std::sort(tris.begin(), tris.end());
  return tris;
}

std::vector<Point2> with_frame_points(std::span<const Point2> points, double width, double height) {
  std::vector<Point2> out(points.begin(), points.end());
  const double mx = 0.5 * width;
  const double my = 0.5 * height;
  out.insert(out.end(), {{0.0, 0.0},
                         {mx, 0.0},
                         {width, 0.0},
                         {width, my},
                         {width, height},
                         {mx, height},
                         {0.0, height},
                         {0.0, my}});
  return out;
}

std::vector<Triangle> triangulate(std::span<const Point2> points, double width, double height) {
  if (points.size() < 3) {
    throw DegenerateGeometryError(fmt::format("need at least 3 landmarks, got {}", points.size()));
  }
  const auto augmented = with_frame_points(points, width, height);
  return delaunay(augmented);
}

Affine affine_from_triangles(const std::array<Point2, 3>& src, const std::array<Point2, 3>& dst) {
  const double u1x = src[1].x - src[0].x, u1y = src[1].y - src[0].y;
  const double u2x = src[2].x - src[0].x, u2y = src[2].y - src[0].y;
  const double det = u1x * u2y - u2x * u1y;
  const double scale = std::max({std::abs(u1x), std::abs(u1y), std::abs(u2x), std::abs(u2y), 1.0});
  if (std::abs(det) <= 1e-12 * scale * scale) {
    throw DegenerateGeometryError("affine_from_triangles: degenerate source triangle");
  }
  const double v1x = dst[1].x - dst[0].x, v1y = dst[1].y - dst[0].y;
  const double v2x = dst[2].x - dst[0].x, v2y = dst[2].y - dst[0].y;
  // A = V * adj(U) / det, with U = [u1 u2] and V = [v1 v2] as columns.
  Affine m{};
  m[0][0] = (v1x * u2y + v2x * -u1y) / det;
  m[0][1] = (v1x * -u2x + v2x * u1x) / det;
  m[1][0] = (v1y * u2y + v2y * -u1y) / det;
  m[1][1] = (v1y * -u2x + v2y * u1x) / det;
  m[0][2] = dst[0].x - (m[0][0] * src[0].x + m[0][1] * src[0].y);
  m[1][2] = dst[0].y - (m[1][0] * src[0].x + m[1][1] * src[0].y);
  return m;
}

Point2 apply(const Affine& m, const Point2& p) {
  return {m[0][0] * p.x + m[0][1] * p.y + m[0][2], m[1][0] * p.x + m[1][1] * p.y + m[1][2]};
}

namespace {

int sign(double v) { return (v > 0) - (v < 0); }

// Sign of orient(a, b, p) after displacing p by (eps, eps * delta), eps >> delta > 0.
int perturbed_side(const Point2& a, const Point2& b, const Point2& p) {
  const int s = sign(orient2d(a, b, p));
  if (s != 0) return s;
  const double dx = b.x - a.x;
  const double dy = b.y - a.y;
  return dy != 0.0 ? -sign(dy) : sign(dx);
}

}  // namespace

bool pixel_in_triangle(std::span<const Point2> pts, const Triangle& t, int x, int y) {
  const Point2 p{x + 0.5, y + 0.5};
  static constexpr std::array<std::array<int, 3>, 3> kEdges{{{0, 1, 2}, {1, 2, 0}, {0, 2, 1}}};
  for (const auto& e : kEdges) {
    // Edges are evaluated in ascending vertex order so a shared edge yields the
    // same orientation value from both of its triangles.
    const Point2& a = pts[t.v[e[0]]];
    const Point2& b = pts[t.v[e[1]]];
    const int inside = sign(orient2d(a, b, pts[t.v[e[2]]]));
    if (inside == 0 || perturbed_side(a, b, p) != inside) return false;
  }
  return true;
}

std::vector<int> pixel_owners(std::span<const Point2> points, std::span<const Triangle> triangles,
                              int width, int height) {
  std::vector<int> owner(static_cast<std::size_t>(width) * height, -1);
  for (std::size_t ti = 0; ti < triangles.size(); ++ti) {
    const Triangle& t = triangles[ti];
    double lo_x = points[t.v[0]].x, hi_x = lo_x, lo_y = points[t.v[0]].y, hi_y = lo_y;
    for (std::size_t v : t.v) {
      lo_x = std::min(lo_x, points[v].x);
      hi_x = std::max(hi_x, points[v].x);
      lo_y = std::min(lo_y, points[v].y);
      hi_y = std::max(hi_y, points[v].y);
    }
    const int x0 = std::max(0, static_cast<int>(std::floor(lo_x - 0.5)));
    const int x1 = std::min(width - 1, static_cast<int>(std::ceil(hi_x - 0.5)));
    const int y0 = std::max(0, static_cast<int>(std::floor(lo_y - 0.5)));
    const int y1 = std::min(height - 1, static_cast<int>(std::ceil(hi_y - 0.5)));
    for (int y = y0; y <= y1; ++y) {
      for (int x = x0; x <= x1; ++x) {
        int& slot = owner[static_cast<std::size_t>(y) * width + x];
        if (slot < 0 && pixel_in_triangle(points, t, x, y)) slot = static_cast<int>(ti);
      }
    }
  }
  return owner;
}

}  // namespace otb
