// Brute-force reference implementations shared by the unit and acceptance
// tests. They favour obviousness over speed and share no code with the
// library beyond its value types.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "otbmorph/keysel.hpp"
#include "otbmorph/metrics.hpp"
#include "otbmorph/morph.hpp"

namespace oracle {

// ---- metrics, on integer milli-unit scores ---------------------------------

// Scores are k / 1000 for integer k. Threshold index m stands for the
// half-grid point (m + 0.5) / 1000, so "score < threshold" is k <= m. Every
// attainable operating point shows up at some m in [min - 1, max].
struct GridSets {
  std::vector<int> mated;
  std::vector<int> nonmated;

  otb::ScoreSets scores() const {
    otb::ScoreSets s;
    for (int k : mated) s.mated.push_back(k / 1000.0);
    for (int k : nonmated) s.nonmated.push_back(k / 1000.0);
    return s;
  }
};

inline double grid_fmr(const std::vector<int>& nonmated, int m) {
  const auto n = std::count_if(nonmated.begin(), nonmated.end(), [m](int k) { return k <= m; });
  return static_cast<double>(n) / static_cast<double>(nonmated.size());
}

inline double grid_fnmr(const std::vector<int>& mated, int m) {
  const auto n = std::count_if(mated.begin(), mated.end(), [m](int k) { return k > m; });
  return static_cast<double>(n) / static_cast<double>(mated.size());
}

inline std::pair<int, int> grid_range(const GridSets& g) {
  int lo = std::numeric_limits<int>::max(), hi = std::numeric_limits<int>::min();
  for (const auto* v : {&g.mated, &g.nonmated}) {
    for (int k : *v) {
      lo = std::min(lo, k);
      hi = std::max(hi, k);
    }
  }
  return {lo - 1, hi};
}

struct GridEer {
  double fmr;
  double fnmr;
  double eer;
  int m;  // smallest minimizing half-grid index
};

inline GridEer grid_eer(const GridSets& g) {
  const auto [lo, hi] = grid_range(g);
  std::optional<GridEer> best;
  for (int m = lo; m <= hi; ++m) {
    const double f = grid_fmr(g.nonmated, m), r = grid_fnmr(g.mated, m);
    if (!best || std::abs(f - r) < std::abs(best->fmr - best->fnmr)) best = GridEer{f, r, (f + r) / 2.0, m};
  }
  return *best;
}

// The smallest candidate threshold of the step that contains half-grid index m:
// the lowest score if m lies below every score, the midpoint between the
// neighbouring distinct scores otherwise, and the double after the maximum
// beyond the top.
inline double canonical_threshold(const GridSets& g, int m) {
  std::set<int> all(g.mated.begin(), g.mated.end());
  all.insert(g.nonmated.begin(), g.nonmated.end());
  const auto above = all.upper_bound(m);
  if (above == all.end()) return std::nextafter(*all.rbegin() / 1000.0, std::numeric_limits<double>::infinity());
  if (above == all.begin()) return *above / 1000.0;
  const int below = *std::prev(above);
  return (below / 1000.0 + *above / 1000.0) / 2.0;
}

// Largest candidate threshold with fmr <= target. Candidates that admit the
// same non-mated scores form a step; the largest candidate of the step ending
// at a score is that score itself.
inline double grid_threshold_at_fmr(const std::vector<int>& nonmated, double target) {
  const int lo = *std::min_element(nonmated.begin(), nonmated.end()) - 1;
  const int hi = *std::max_element(nonmated.begin(), nonmated.end());
  int best = lo;
  for (int m = lo; m <= hi; ++m) {
    if (grid_fmr(nonmated, m) <= target) best = m;
  }
  if (best == hi) return std::nextafter(hi / 1000.0, std::numeric_limits<double>::infinity());
  int next = std::numeric_limits<int>::max();
  for (int k : nonmated) {
    if (k > best) next = std::min(next, k);
  }
  return next / 1000.0;
}

inline std::set<std::pair<double, double>> grid_det(const GridSets& g) {
  const auto [lo, hi] = grid_range(g);
  std::set<std::pair<double, double>> out;
  for (int m = lo; m <= hi; ++m) out.insert({grid_fmr(g.nonmated, m), grid_fnmr(g.mated, m)});
  return out;
}

// ---- key selection ----------------------------------------------------------

inline double distance(const otb::Embedding& a, const otb::Embedding& b) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) sum += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(sum);
}

// Farthest entry from `anchor` among `pool` (restricted to `group` if given);
// ties go to the smallest id.
inline const otb::KeyPoolEntry* farthest(const otb::KeyPool& pool, const otb::Embedding& anchor,
                                         std::optional<otb::Group> group) {
  const otb::KeyPoolEntry* best = nullptr;
  double best_d = -1.0;
  for (const auto& e : pool.entries()) {
    if (group && e.group != *group) continue;
    const double d = distance(e.embedding, anchor);
    if (d > best_d || (d == best_d && e.id < best->id)) {
      best = &e;
      best_d = d;
    }
  }
  return best;
}

// ---- raster morph -----------------------------------------------------------

using P = otb::Point2;

inline double cross(P a, P b, P c) { return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x); }

// Delaunay by definition: every triangle whose circumcircle holds no other
// point. Valid for point sets without four co-circular points.
inline std::vector<std::array<std::size_t, 3>> empty_circle_triangles(const std::vector<P>& pts) {
  std::vector<std::array<std::size_t, 3>> out;
  const std::size_t n = pts.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      for (std::size_t k = j + 1; k < n; ++k) {
        P a = pts[i], b = pts[j], c = pts[k];
        const double o = cross(a, b, c);
        if (o == 0.0) continue;
        if (o < 0) std::swap(b, c);
        bool empty = true;
        for (std::size_t m = 0; m < n && empty; ++m) {
          if (m == i || m == j || m == k) continue;
          const P d = pts[m];
          const double ax = a.x - d.x, ay = a.y - d.y, bx = b.x - d.x, by = b.y - d.y;
          const double cx = c.x - d.x, cy = c.y - d.y;
          const double det = (ax * ax + ay * ay) * (bx * cy - cx * by) - (bx * bx + by * by) * (ax * cy - cx * ay) +
                             (cx * cx + cy * cy) * (ax * by - bx * ay);
          empty = det <= 0.0;
        }
        if (empty) out.push_back({i, j, k});
      }
    }
  }
  return out;
}

inline std::vector<P> framed(std::vector<P> pts, double w, double h) {
  for (P f : {P{0, 0}, P{w / 2, 0}, P{w, 0}, P{w, h / 2}, P{w, h}, P{w / 2, h}, P{0, h}, P{0, h / 2}}) {
    pts.push_back(f);
  }
  return pts;
}

inline double bilinear(const otb::Image& img, double x, double y, int c) {
  const double px = std::clamp(x - 0.5, 0.0, img.width() - 1.0);
  const double py = std::clamp(y - 0.5, 0.0, img.height() - 1.0);
  const int x0 = static_cast<int>(px), y0 = static_cast<int>(py);
  const int x1 = std::min(x0 + 1, img.width() - 1), y1 = std::min(y0 + 1, img.height() - 1);
  const double fx = px - x0, fy = py - y0;
  return (1 - fy) * ((1 - fx) * img.at(x0, y0, c) + fx * img.at(x1, y0, c)) +
         fy * ((1 - fx) * img.at(x0, y1, c) + fx * img.at(x1, y1, c));
}

// Per-pixel warp through barycentric coordinates. Pixels whose centre lies on
// a mesh edge are reported through `ambiguous` instead of guessed.
inline otb::Image morph(const otb::RasterFace& a, const otb::RasterFace& b, double alpha, int* ambiguous = nullptr) {
  const int w = a.pixels.width(), h = a.pixels.height();
  std::vector<P> mid;
  for (std::size_t i = 0; i < a.landmarks.points.size(); ++i) {
    const P p = a.landmarks.points[i], q = b.landmarks.points[i];
    mid.push_back({(1 - alpha) * p.x + alpha * q.x, (1 - alpha) * p.y + alpha * q.y});
  }
  const auto dst = framed(mid, w, h);
  const auto src_a = framed(a.landmarks.points, w, h);
  const auto src_b = framed(b.landmarks.points, w, h);
  const auto tris = empty_circle_triangles(dst);

  otb::Image out(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const P p{x + 0.5, y + 0.5};
      int hits = 0;
      std::array<double, 3> lambda{};
      std::array<std::size_t, 3> tri{};
      for (const auto& t : tris) {
        const double area = cross(dst[t[0]], dst[t[1]], dst[t[2]]);
        const std::array<double, 3> l{cross(p, dst[t[1]], dst[t[2]]) / area, cross(dst[t[0]], p, dst[t[2]]) / area,
                                      cross(dst[t[0]], dst[t[1]], p) / area};
        if (l[0] >= 0 && l[1] >= 0 && l[2] >= 0) {
          ++hits;
          lambda = l;
          tri = t;
        }
      }
      if (hits != 1 && ambiguous) ++*ambiguous;
      for (int c = 0; c < 3; ++c) {
        double va = 0, vb = 0;
        P sa{0, 0}, sb{0, 0};
        for (int k = 0; k < 3; ++k) {
          sa.x += lambda[k] * src_a[tri[k]].x;
          sa.y += lambda[k] * src_a[tri[k]].y;
          sb.x += lambda[k] * src_b[tri[k]].x;
          sb.y += lambda[k] * src_b[tri[k]].y;
        }
        va = bilinear(a.pixels, sa.x, sa.y, c);
        vb = bilinear(b.pixels, sb.x, sb.y, c);
        const double v = (1 - alpha) * va + alpha * vb;
        out.at(x, y, c) = static_cast<std::uint8_t>(std::clamp(std::floor(v + 0.5), 0.0, 255.0));
      }
    }
  }
  return out;
}

// ---- golden fixtures --------------------------------------------------------

struct GoldenFixture {
  std::vector<P> landmarks_a;
  std::vector<P> landmarks_b;
  std::vector<std::uint8_t> pixels_a;
  std::vector<std::uint8_t> pixels_b;
  std::vector<std::vector<std::uint8_t>> expected;  // one per kGoldenAlphas entry
};

#include "morph_golden.inc"

inline otb::RasterFace face(const std::vector<P>& landmarks, const std::vector<std::uint8_t>& pixels) {
  otb::RasterFace f{otb::Image(8, 8), otb::Landmarks{landmarks, 8, 8}};
  std::copy(pixels.begin(), pixels.end(), f.pixels.data().begin());
  return f;
}

}  // namespace oracle
