#include "spatraf/geom.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "predicates.hpp"

namespace spatraf {

Window::Window(double x_min, double y_min, double x_max, double y_max)
    : x_min_(x_min), y_min_(y_min), x_max_(x_max), y_max_(y_max) {
  if (!(x_max > x_min) || !(y_max > y_min) || !std::isfinite(x_min) ||
      !std::isfinite(y_min) || !std::isfinite(x_max) || !std::isfinite(y_max)) {
    throw Error(ErrorCode::InvalidArgument, "window must have x_max > x_min and y_max > y_min");
  }
}

double Window::exit_distance(Point origin, Point dir) const {
  double t = std::numeric_limits<double>::infinity();
  if (dir.x > 0.0) t = std::min(t, (x_max_ - origin.x) / dir.x);
  if (dir.x < 0.0) t = std::min(t, (x_min_ - origin.x) / dir.x);
  if (dir.y > 0.0) t = std::min(t, (y_max_ - origin.y) / dir.y);
  if (dir.y < 0.0) t = std::min(t, (y_min_ - origin.y) / dir.y);
  return std::max(t, 0.0);
}

PointPattern::PointPattern(std::vector<Point> points, Window window)
    : points_(std::move(points)), window_(window) {
  for (const Point& p : points_) {
    if (!window_.contains(p)) {
      throw Error(ErrorCode::InvalidArgument, "point (" + std::to_string(p.x) + ", " +
                                                  std::to_string(p.y) + ") outside window");
    }
  }
}

void PointPattern::push_back(Point p) {
  if (!window_.contains(p)) {
    throw Error(ErrorCode::InvalidArgument, "point outside window");
  }
  points_.push_back(p);
}

namespace geom {
namespace {

constexpr int kGhost = -1;

bool lex_less(Point a, Point b) { return a.x < b.x || (a.x == b.x && a.y < b.y); }

// Separates exact duplicates along a golden-angle spiral of radius
// 1e-9 * window width, staying inside the window.
std::vector<Point> separate_duplicates(const PointPattern& pattern, std::size_t& moved) {
  std::vector<Point> pts = pattern.points();
  moved = 0;
  if (pts.size() < 2) return pts;
  const Window& w = pattern.window();
  const double eps = 1e-9 * w.width();
  constexpr double kGoldenAngle = 2.399963229728653;

  for (int pass = 0; pass < 8; ++pass) {
    std::vector<std::size_t> order(pts.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return lex_less(pts[a], pts[b]); });
    bool changed = false;
    std::size_t r = 0;
    while (r < order.size()) {
      std::size_t s = r + 1;
      while (s < order.size() && pts[order[s]] == pts[order[r]]) ++s;
      const Point base = pts[order[r]];
      for (std::size_t k = 1; k < s - r; ++k) {
        const double radius = eps * std::sqrt(static_cast<double>(k + pass));
        const double theta = kGoldenAngle * static_cast<double>(k + 7 * pass);
        Point q{base.x + radius * std::cos(theta), base.y + radius * std::sin(theta)};
        if (q.x < w.x_min() || q.x > w.x_max()) q.x = 2.0 * base.x - q.x;
        if (q.y < w.y_min() || q.y > w.y_max()) q.y = 2.0 * base.y - q.y;
        pts[order[r + k]] = q;
        ++moved;
        changed = true;
      }
      r = s;
    }
    if (!changed) break;
  }
  return pts;
}

struct Tri {
  std::array<int, 3> v;
  std::array<int, 3> nb;  // nb[i] is across the edge opposite v[i]
  bool alive;
};

class Builder {
 public:
  explicit Builder(const std::vector<Point>& pts) : pts_(pts) {}

  bool run(const std::vector<int>& order) {
    const int n = static_cast<int>(order.size());
    const Point p0 = pts_[order[0]], p1 = pts_[order[1]];
    int k = -1;
    for (int i = 2; i < n; ++i) {
      if (detail::orient2d(p0, p1, pts_[order[i]]) != 0.0) {
        k = i;
        break;
      }
    }
    if (k < 0) return false;

    int a = order[0], b = order[1], c = order[k];
    if (detail::orient2d(pts_[a], pts_[b], pts_[c]) < 0.0) std::swap(b, c);
    const int t = alloc({a, b, c});
    std::array<int, 3> ghosts;
    for (int i = 0; i < 3; ++i) {
      const auto& v = tris_[t].v;
      ghosts[i] = alloc({v[(i + 2) % 3], v[(i + 1) % 3], kGhost});
      tris_[t].nb[i] = ghosts[i];
      tris_[ghosts[i]].nb[2] = t;
    }
    for (int i = 0; i < 3; ++i) {
      tris_[ghosts[i]].nb[0] = ghosts[(i + 2) % 3];
      tris_[ghosts[i]].nb[1] = ghosts[(i + 1) % 3];
    }
    last_ = t;
    mark_.assign(tris_.size(), 0);
    start_of_.assign(pts_.size() + 1, -1);
    start_stamp_.assign(pts_.size() + 1, 0);

    for (int i = 2; i < n; ++i) {
      if (i == k) continue;
      insert(order[i]);
    }
    return true;
  }

  const std::vector<Tri>& triangles() const { return tris_; }

 private:
  int alloc(std::array<int, 3> v) {
    Tri tri{v, {-1, -1, -1}, true};
    if (!free_.empty()) {
      const int id = free_.back();
      free_.pop_back();
      tris_[id] = tri;
      return id;
    }
    tris_.push_back(tri);
    if (mark_.size() < tris_.size()) mark_.resize(tris_.size() * 2, 0);
    return static_cast<int>(tris_.size()) - 1;
  }

  bool conflicts(int t, Point p) const {
    const Tri& tri = tris_[t];
    const Point& u = pts_[tri.v[0]];
    const Point& w = pts_[tri.v[1]];
    if (tri.v[2] == kGhost) {
      const double o = detail::orient2d(u, w, p);
      if (o != 0.0) return o > 0.0;
      return (lex_less(u, p) && lex_less(p, w)) || (lex_less(w, p) && lex_less(p, u));
    }
    return detail::incircle(u, w, pts_[tri.v[2]], p) > 0.0;
  }

  std::uint32_t next_random() {
    walk_state_ ^= walk_state_ << 13;
    walk_state_ ^= walk_state_ >> 17;
    walk_state_ ^= walk_state_ << 5;
    return walk_state_;
  }

  int locate(Point p) {
    int t = last_;
    const std::size_t limit = 4 * tris_.size() + 16;
    for (std::size_t step = 0; step < limit; ++step) {
      const Tri& tri = tris_[t];
      if (tri.v[2] == kGhost) return t;
      const int first = static_cast<int>(next_random() % 3);
      bool moved = false;
      for (int j = 0; j < 3; ++j) {
        const int i = (first + j) % 3;
        const Point& a = pts_[tri.v[(i + 1) % 3]];
        const Point& b = pts_[tri.v[(i + 2) % 3]];
        if (detail::orient2d(a, b, p) < 0.0) {
          t = tri.nb[i];
          moved = true;
          break;
        }
      }
      if (!moved) return t;
    }
    for (std::size_t id = 0; id < tris_.size(); ++id) {
      if (tris_[id].alive && conflicts(static_cast<int>(id), p)) return static_cast<int>(id);
    }
    throw Error(ErrorCode::DegenerateInput, "delaunay: point location failed");
  }

  void insert(int pi) {
    const Point p = pts_[pi];
    const int seed = locate(p);
    ++stamp_;
    cavity_.clear();
    boundary_.clear();
    stack_.clear();
    mark_[seed] = stamp_;
    stack_.push_back(seed);
    while (!stack_.empty()) {
      const int t = stack_.back();
      stack_.pop_back();
      cavity_.push_back(t);
      for (int i = 0; i < 3; ++i) {
        const int nb = tris_[t].nb[i];
        if (mark_[nb] == stamp_) continue;
        if (conflicts(nb, p)) {
          mark_[nb] = stamp_;
          stack_.push_back(nb);
        } else {
          boundary_.push_back({t, i});
        }
      }
    }

    created_.clear();
    for (const auto& [t, i] : boundary_) {
      const int u = tris_[t].v[(i + 1) % 3];
      const int w = tris_[t].v[(i + 2) % 3];
      const int outside = tris_[t].nb[i];
      const int id = alloc({u, w, pi});
      tris_[id].nb[2] = outside;
      auto& onb = tris_[outside].nb;
      for (int j = 0; j < 3; ++j) {
        if (onb[j] == t) onb[j] = id;
      }
      const std::size_t key = static_cast<std::size_t>(u + 1);
      start_of_[key] = id;
      start_stamp_[key] = stamp_;
      created_.push_back(id);
    }
    for (int id : created_) {
      const int w = tris_[id].v[1];
      const std::size_t key = static_cast<std::size_t>(w + 1);
      if (start_stamp_[key] != stamp_) {
        throw Error(ErrorCode::DegenerateInput, "delaunay: cavity boundary is not closed");
      }
      const int m = start_of_[key];
      tris_[id].nb[0] = m;
      tris_[m].nb[1] = id;
    }
    for (int t : cavity_) {
      tris_[t].alive = false;
      free_.push_back(t);
    }
    for (int id : created_) {
      Tri& tri = tris_[id];
      int r = 0;
      if (tri.v[0] == kGhost) r = 1;
      if (tri.v[1] == kGhost) r = 2;
      if (r != 0) {
        const Tri old = tri;
        for (int j = 0; j < 3; ++j) {
          tri.v[j] = old.v[(j + r) % 3];
          tri.nb[j] = old.nb[(j + r) % 3];
        }
      } else if (tri.v[2] != kGhost) {
        last_ = id;
      }
    }
  }

  const std::vector<Point>& pts_;
  std::vector<Tri> tris_;
  std::vector<int> free_;
  std::vector<std::uint32_t> mark_;
  std::uint32_t stamp_ = 0;
  std::vector<int> start_of_;
  std::vector<std::uint32_t> start_stamp_;
  std::vector<int> cavity_, stack_, created_;
  std::vector<std::pair<int, int>> boundary_;
  int last_ = 0;
  std::uint32_t walk_state_ = 2463534242u;
};

// Half-plane clip with per-edge labels. labels[i] names the source of the edge
// from poly[i] to poly[i+1]: a generator index, or a negative window side.
struct LabeledPolygon {
  std::vector<Point> v;
  std::vector<long> label;
};

LabeledPolygon window_polygon(const Window& w) {
  return {{{w.x_min(), w.y_min()}, {w.x_max(), w.y_min()},
           {w.x_max(), w.y_max()}, {w.x_min(), w.y_max()}},
          {-1, -2, -3, -4}};
}

// Keeps the side of the perpendicular bisector of (site, other) containing site.
void clip_by_bisector(LabeledPolygon& poly, Point site, Point other, long other_label) {
  const Point mid = 0.5 * (site + other);
  const Point normal = other - site;
  const std::size_t m = poly.v.size();
  if (m == 0) return;
  LabeledPolygon out;
  out.v.reserve(m + 2);
  out.label.reserve(m + 2);
  std::vector<double> f(m);
  bool any_out = false;
  for (std::size_t i = 0; i < m; ++i) {
    f[i] = dot(poly.v[i] - mid, normal);
    any_out = any_out || f[i] > 0.0;
  }
  if (!any_out) return;
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t j = (i + 1) % m;
    const bool in_i = f[i] <= 0.0;
    const bool in_j = f[j] <= 0.0;
    if (in_i) {
      out.v.push_back(poly.v[i]);
      out.label.push_back(poly.label[i]);
      if (!in_j) {
        const double t = f[i] / (f[i] - f[j]);
        out.v.push_back(poly.v[i] + t * (poly.v[j] - poly.v[i]));
        out.label.push_back(other_label);
      }
    } else if (in_j) {
      const double t = f[i] / (f[i] - f[j]);
      out.v.push_back(poly.v[i] + t * (poly.v[j] - poly.v[i]));
      out.label.push_back(poly.label[i]);
    }
  }
  poly = std::move(out);
}

template <typename NeighborFn>
VoronoiDiagram build_cells(const std::vector<Point>& sites, const Window& window,
                           NeighborFn&& neighbors_of) {
  VoronoiDiagram vd;
  const std::size_t n = sites.size();
  vd.cells.resize(n);
  vd.cell_area.resize(n);
  vd.boundary_flag.resize(n);
  vd.adjacent.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    LabeledPolygon poly = window_polygon(window);
    for (std::size_t j : neighbors_of(i)) {
      clip_by_bisector(poly, sites[i], sites[j], static_cast<long>(j));
    }
    bool boundary = false;
    std::vector<std::size_t> adj;
    for (long label : poly.label) {
      if (label < 0) {
        boundary = true;
      } else {
        adj.push_back(static_cast<std::size_t>(label));
      }
    }
    std::sort(adj.begin(), adj.end());
    adj.erase(std::unique(adj.begin(), adj.end()), adj.end());
    vd.cell_area[i] = polygon_area(poly.v);
    vd.cells[i] = std::move(poly.v);
    vd.boundary_flag[i] = boundary ? 1 : 0;
    vd.adjacent[i] = std::move(adj);
  }
  return vd;
}

}  // namespace

std::span<const std::size_t> Triangulation::neighbors(std::size_t i) const {
  if (i >= vertices_.size()) {
    throw Error(ErrorCode::IndexOutOfRange, "vertex index " + std::to_string(i) + " out of range");
  }
  return {adjacency_.data() + adjacency_offsets_[i],
          adjacency_offsets_[i + 1] - adjacency_offsets_[i]};
}

Triangulation delaunay(const PointPattern& pattern) {
  if (pattern.size() < 3) {
    throw Error(ErrorCode::DegenerateInput, "delaunay needs at least 3 points");
  }
  Triangulation tri;
  tri.window_ = pattern.window();
  tri.vertices_ = separate_duplicates(pattern, tri.jittered_count_);
  const auto& pts = tri.vertices_;

  std::vector<int> order(pts.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) { return lex_less(pts[a], pts[b]); });

  Builder builder(pts);
  if (!builder.run(order)) {
    throw Error(ErrorCode::DegenerateInput, "delaunay: all points are collinear");
  }

  const auto& raw = builder.triangles();
  for (std::size_t t = 0; t < raw.size(); ++t) {
    const Tri& r = raw[t];
    if (!r.alive || r.v[2] == kGhost) continue;
    tri.triangles_.push_back({static_cast<std::size_t>(r.v[0]), static_cast<std::size_t>(r.v[1]),
                              static_cast<std::size_t>(r.v[2])});
    for (int i = 0; i < 3; ++i) {
      const int nb = r.nb[i];
      if (raw[nb].v[2] == kGhost || nb > static_cast<int>(t)) {
        std::size_t a = static_cast<std::size_t>(r.v[(i + 1) % 3]);
        std::size_t b = static_cast<std::size_t>(r.v[(i + 2) % 3]);
        if (b < a) std::swap(a, b);
        tri.edges_.push_back({a, b});
      }
    }
  }
  std::sort(tri.triangles_.begin(), tri.triangles_.end());
  std::sort(tri.edges_.begin(), tri.edges_.end());

  const std::size_t n = pts.size();
  std::vector<std::size_t> degree(n, 0);
  for (const auto& e : tri.edges_) {
    ++degree[e[0]];
    ++degree[e[1]];
  }
  tri.adjacency_offsets_.assign(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) {
    tri.adjacency_offsets_[i + 1] = tri.adjacency_offsets_[i] + degree[i];
  }
  tri.adjacency_.resize(tri.adjacency_offsets_[n]);
  std::vector<std::size_t> fill(tri.adjacency_offsets_.begin(), tri.adjacency_offsets_.end() - 1);
  for (const auto& e : tri.edges_) {
    tri.adjacency_[fill[e[0]]++] = e[1];
    tri.adjacency_[fill[e[1]]++] = e[0];
  }
  for (std::size_t i = 0; i < n; ++i) {
    std::sort(tri.adjacency_.begin() + static_cast<std::ptrdiff_t>(tri.adjacency_offsets_[i]),
              tri.adjacency_.begin() + static_cast<std::ptrdiff_t>(tri.adjacency_offsets_[i + 1]));
  }
  return tri;
}

std::vector<std::size_t> natural_neighbors(const Triangulation& tri, std::size_t i) {
  const auto nb = tri.neighbors(i);
  return {nb.begin(), nb.end()};
}

VoronoiDiagram voronoi(const Triangulation& tri, const Window& window) {
  for (const Point& p : tri.vertices()) {
    if (!window.contains(p)) {
      throw Error(ErrorCode::InvalidArgument, "voronoi: generator outside window");
    }
  }
  return build_cells(tri.vertices(), window,
                     [&](std::size_t i) { return tri.neighbors(i); });
}

VoronoiDiagram voronoi(const PointPattern& pattern) {
  if (pattern.size() >= 3) {
    try {
      const Triangulation tri = delaunay(pattern);
      return voronoi(tri, pattern.window());
    } catch (const Error& e) {
      if (e.code() != ErrorCode::DegenerateInput) throw;
    }
  }
  // No triangulation: clip against every other generator.
  std::size_t moved = 0;
  const std::vector<Point> sites = separate_duplicates(pattern, moved);
  std::vector<std::size_t> all(sites.size());
  std::iota(all.begin(), all.end(), 0);
  return build_cells(sites, pattern.window(), [&](std::size_t i) {
    std::vector<std::size_t> others;
    for (std::size_t j : all) {
      if (j != i) others.push_back(j);
    }
    return others;
  });
}

double polygon_area(std::span<const Point> polygon) {
  const std::size_t m = polygon.size();
  if (m < 3) return 0.0;
  double twice = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const Point& a = polygon[i];
    const Point& b = polygon[(i + 1) % m];
    twice += a.x * b.y - a.y * b.x;
  }
  return 0.5 * twice;
}

double convex_hull_area(std::span<const Point> points) {
  std::vector<Point> pts(points.begin(), points.end());
  if (pts.size() < 3) return 0.0;
  std::sort(pts.begin(), pts.end(), lex_less);
  std::vector<Point> hull(2 * pts.size());
  std::size_t k = 0;
  for (const Point& p : pts) {
    while (k >= 2 && detail::orient2d(hull[k - 2], hull[k - 1], p) <= 0.0) --k;
    hull[k++] = p;
  }
  for (std::size_t i = pts.size() - 1, lower = k + 1; i-- > 0;) {
    while (k >= lower && detail::orient2d(hull[k - 2], hull[k - 1], pts[i]) <= 0.0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return polygon_area(hull);
}

}  // namespace geom
}  // namespace spatraf
