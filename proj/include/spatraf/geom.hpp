#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "spatraf/types.hpp"

namespace spatraf::geom {

// Delaunay triangulation of a finite pattern. Vertex indices refer to the
// input pattern; `vertices` holds the coordinates actually triangulated
// (exact duplicates are separated by a tiny deterministic jitter).
class Triangulation {
 public:
  using Edge = std::array<std::size_t, 2>;
  using Triangle = std::array<std::size_t, 3>;  // counter-clockwise

  const std::vector<Point>& vertices() const { return vertices_; }
  const std::vector<Triangle>& triangles() const { return triangles_; }
  // Deduplicated, each stored with the smaller index first.
  const std::vector<Edge>& edges() const { return edges_; }
  const Window& window() const { return window_; }
  std::size_t vertex_count() const { return vertices_.size(); }

  // Natural neighbors of `i`, ascending. Throws IndexOutOfRange.
  std::span<const std::size_t> neighbors(std::size_t i) const;

  // Number of input points that were moved to break exact coincidences.
  std::size_t jittered_count() const { return jittered_count_; }

 private:
  friend Triangulation delaunay(const PointPattern& pattern);

  std::vector<Point> vertices_;
  std::vector<Triangle> triangles_;
  std::vector<Edge> edges_;
  std::vector<std::size_t> adjacency_offsets_;
  std::vector<std::size_t> adjacency_;
  Window window_;
  std::size_t jittered_count_ = 0;
};

// Bowyer-Watson insertion in lexicographic (x, y) order with exact
// predicates. Throws DegenerateInput for fewer than 3 points or when all
// points are collinear.
Triangulation delaunay(const PointPattern& pattern);

// Vertex indices sharing a Delaunay edge with `i`.
std::vector<std::size_t> natural_neighbors(const Triangulation& tri, std::size_t i);

// Window-clipped Voronoi cells.
struct VoronoiDiagram {
  std::vector<std::vector<Point>> cells;  // counter-clockwise polygons
  std::vector<double> cell_area;
  // True when the unclipped cell reaches the window edge.
  std::vector<char> boundary_flag;
  // For each cell, the generators across its bisector edges, ascending.
  std::vector<std::vector<std::size_t>> adjacent;

  std::size_t size() const { return cells.size(); }
};

VoronoiDiagram voronoi(const Triangulation& tri, const Window& window);

// Convenience path that also accepts 1 or 2 generators and collinear input,
// where no triangulation exists.
VoronoiDiagram voronoi(const PointPattern& pattern);

double polygon_area(std::span<const Point> polygon);

// Area of the convex hull (monotone chain).
double convex_hull_area(std::span<const Point> points);

}  // namespace spatraf::geom
