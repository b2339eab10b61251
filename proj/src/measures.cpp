#include "spatraf/measures.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <optional>
#include <string>

#include "spatraf/error.hpp"
#include "spatraf/geom.hpp"

namespace spatraf::measures {
namespace {

void require_points(const PointPattern& p, std::size_t n, const char* what) {
  if (p.size() < n) {
    throw Error(ErrorCode::TooFewPoints,
                std::string(what) + ": needs at least " + std::to_string(n) + " points");
  }
}

}  // namespace

std::string_view measure_name(Measure m) {
  switch (m) {
    case Measure::G: return "G";
    case Measure::V: return "V";
    case Measure::E: return "E";
  }
  return "?";
}

Measure parse_measure(std::string_view name) {
  if (name.size() == 1) {
    switch (std::toupper(static_cast<unsigned char>(name[0]))) {
      case 'G': return Measure::G;
      case 'V': return Measure::V;
      case 'E': return Measure::E;
      default: break;
    }
  }
  throw Error(ErrorCode::Parse, "unknown measure '" + std::string(name) + "' (expected G, V or E)");
}

SummaryStats summarize(std::span<const double> samples) {
  if (samples.size() < 2) throw Error(ErrorCode::TooFewPoints, "summarize: needs at least 2 samples");
  // Two-pass with compensation keeps the result independent of magnitude.
  double sum = 0.0, comp = 0.0;
  for (double x : samples) {
    const double y = x - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  const double n = static_cast<double>(samples.size());
  SummaryStats s;
  s.count = samples.size();
  s.mean = sum / n;
  double ss = 0.0, c = 0.0;
  for (double x : samples) c += x - s.mean, ss += (x - s.mean) * (x - s.mean);
  s.variance = (ss - c * c / n) / (n - 1.0);
  if (s.variance < 0.0) s.variance = 0.0;
  if (!(s.mean > 0.0)) throw Error(ErrorCode::InvalidArgument, "summarize: mean must be positive");
  s.cov = std::sqrt(s.variance) / s.mean;
  return s;
}

double NormalizationConstants::tabulated_cov(Measure m) {
  switch (m) {
    case Measure::G: return kCovG;
    case Measure::V: return kCovV;
    case Measure::E: return kCovE;
  }
  return 1.0;
}

double NormalizationConstants::cov(Measure m) {
  if (m == Measure::G) return std::sqrt(kVarG) / kMeanG;
  return tabulated_cov(m);
}

double NormalizationConstants::mean(Measure m, double lambda) {
  switch (m) {
    case Measure::G: return kMeanG / std::sqrt(lambda);
    case Measure::V: return kMeanV / lambda;
    case Measure::E: return kMeanE / std::sqrt(lambda);
  }
  return 0.0;
}

double NormalizationConstants::variance(Measure m, double lambda) {
  switch (m) {
    case Measure::G: return kVarG / lambda;
    case Measure::V: return kVarV / (lambda * lambda);
    case Measure::E: return kVarE / lambda;
  }
  return 0.0;
}

std::vector<double> nearest_neighbor_distances(const PointPattern& pattern) {
  require_points(pattern, 2, "nearest_neighbor_distances");
  const Window& w = pattern.window();
  const std::size_t n = pattern.size();
  const double cell = std::sqrt(w.area() / static_cast<double>(n));
  const auto nx = static_cast<std::size_t>(std::max(1.0, std::ceil(w.width() / cell)));
  const auto ny = static_cast<std::size_t>(std::max(1.0, std::ceil(w.height() / cell)));
  auto bucket_of = [&](Point p) {
    const auto cx = std::min(nx - 1, static_cast<std::size_t>((p.x - w.x_min()) / cell));
    const auto cy = std::min(ny - 1, static_cast<std::size_t>((p.y - w.y_min()) / cell));
    return std::pair{cx, cy};
  };

  // Counting sort into buckets.
  std::vector<std::size_t> start(nx * ny + 1, 0), order(n);
  for (const Point& p : pattern.points()) {
    const auto [cx, cy] = bucket_of(p);
    ++start[cy * nx + cx + 1];
  }
  for (std::size_t b = 0; b < nx * ny; ++b) start[b + 1] += start[b];
  std::vector<std::size_t> fill(start.begin(), start.end() - 1);
  for (std::size_t i = 0; i < n; ++i) {
    const auto [cx, cy] = bucket_of(pattern[i]);
    order[fill[cy * nx + cx]++] = i;
  }

  std::vector<double> out(n);
  const std::size_t max_ring = std::max(nx, ny);
  for (std::size_t i = 0; i < n; ++i) {
    const Point p = pattern[i];
    const auto [cx, cy] = bucket_of(p);
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r <= max_ring; ++r) {
      const long x0 = static_cast<long>(cx) - static_cast<long>(r);
      const long x1 = static_cast<long>(cx) + static_cast<long>(r);
      const long y0 = static_cast<long>(cy) - static_cast<long>(r);
      const long y1 = static_cast<long>(cy) + static_cast<long>(r);
      for (long by = y0; by <= y1; ++by) {
        if (by < 0 || by >= static_cast<long>(ny)) continue;
        const bool edge_row = by == y0 || by == y1;
        for (long bx = x0; bx <= x1; bx += edge_row ? 1 : (x1 - x0)) {
          if (bx >= 0 && bx < static_cast<long>(nx)) {
            const std::size_t b = static_cast<std::size_t>(by) * nx + static_cast<std::size_t>(bx);
            for (std::size_t k = start[b]; k < start[b + 1]; ++k) {
              const std::size_t j = order[k];
              if (j == i) continue;
              const Point d = pattern[j] - p;
              best = std::min(best, dot(d, d));
            }
          }
          if (x1 == x0) break;
        }
      }
      // Rings 0..r cover every point within r * cell of p.
      if (std::sqrt(best) <= static_cast<double>(r) * cell) break;
    }
    out[i] = std::sqrt(best);
  }
  return out;
}

std::vector<double> voronoi_areas(const PointPattern& pattern, bool exclude_boundary) {
  require_points(pattern, 3, "voronoi_areas");
  const auto vd = geom::voronoi(geom::delaunay(pattern), pattern.window());
  std::vector<double> out;
  out.reserve(vd.size());
  for (std::size_t i = 0; i < vd.size(); ++i) {
    if (exclude_boundary && vd.boundary_flag[i]) continue;
    out.push_back(vd.cell_area[i]);
  }
  return out;
}

std::vector<double> delaunay_edge_lengths(const PointPattern& pattern, bool exclude_boundary) {
  require_points(pattern, 3, "delaunay_edge_lengths");
  const auto tri = geom::delaunay(pattern);
  std::vector<char> boundary;
  if (exclude_boundary) boundary = geom::voronoi(tri, pattern.window()).boundary_flag;
  const auto& v = tri.vertices();
  std::vector<double> out;
  out.reserve(tri.edges().size());
  for (const auto& e : tri.edges()) {
    if (exclude_boundary && (boundary[e[0]] || boundary[e[1]])) continue;
    out.push_back(distance(v[e[0]], v[e[1]]));
  }
  return out;
}

std::vector<double> delaunay_triangle_areas(const PointPattern& pattern) {
  require_points(pattern, 3, "delaunay_triangle_areas");
  const auto tri = geom::delaunay(pattern);
  const auto& v = tri.vertices();
  std::vector<double> out;
  out.reserve(tri.triangles().size());
  for (const auto& t : tri.triangles()) {
    const Point a = v[t[0]], b = v[t[1]], c = v[t[2]];
    out.push_back(0.5 * std::fabs((b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x)));
  }
  return out;
}

std::vector<double> measure_samples(const PointPattern& pattern, Measure m, bool exclude_boundary) {
  switch (m) {
    case Measure::V: return voronoi_areas(pattern, exclude_boundary);
    case Measure::E: return delaunay_edge_lengths(pattern, exclude_boundary);
    case Measure::G: {
      if (pattern.size() < 3) return nearest_neighbor_distances(pattern);
      std::optional<geom::Triangulation> tri;
      try {
        tri = geom::delaunay(pattern);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::DegenerateInput || exclude_boundary) throw;
        return nearest_neighbor_distances(pattern);
      }
      // The nearest neighbor is a Delaunay neighbor; measured on the
      // triangulated coordinates so coincident inputs stay consistent with V and E.
      const auto& v = tri->vertices();
      std::vector<double> d(v.size());
      for (std::size_t i = 0; i < v.size(); ++i) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t j : tri->neighbors(i)) best = std::min(best, distance(v[i], v[j]));
        d[i] = best;
      }
      if (!exclude_boundary) return d;
      const auto vd = geom::voronoi(*tri, pattern.window());
      std::vector<double> kept;
      kept.reserve(d.size());
      for (std::size_t i = 0; i < d.size(); ++i) {
        if (!vd.boundary_flag[i]) kept.push_back(d[i]);
      }
      return kept;
    }
  }
  return {};
}

MeasureReport measure(const PointPattern& pattern, Measure m, bool exclude_boundary) {
  const auto samples = measure_samples(pattern, m, exclude_boundary);
  MeasureReport r;
  r.measure = m;
  r.stats = summarize(samples);
  r.normalized_cov = r.stats.cov / NormalizationConstants::cov(m);
  return r;
}

double normalized_cov(const PointPattern& pattern, Measure m, bool exclude_boundary) {
  return measure(pattern, m, exclude_boundary).normalized_cov;
}

}  // namespace spatraf::measures
