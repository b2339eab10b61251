#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "spatraf/error.hpp"

namespace spatraf {

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
  friend Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
  friend Point operator*(double s, Point a) { return {s * a.x, s * a.y}; }
  friend bool operator==(Point a, Point b) { return a.x == b.x && a.y == b.y; }
};

inline double dot(Point a, Point b) { return a.x * b.x + a.y * b.y; }
inline double norm(Point a) { return std::hypot(a.x, a.y); }
inline double distance(Point a, Point b) { return norm(a - b); }

// Convex combination: weight 1 returns `target`, weight 0 returns `from`.
inline Point pull_toward(Point from, Point target, double weight) {
  return {weight * target.x + (1.0 - weight) * from.x,
          weight * target.y + (1.0 - weight) * from.y};
}

// Axis-aligned observation window, meters.
class Window {
 public:
  Window() = default;
  Window(double x_min, double y_min, double x_max, double y_max);

  static Window square(double side) { return Window(0.0, 0.0, side, side); }

  double x_min() const { return x_min_; }
  double y_min() const { return y_min_; }
  double x_max() const { return x_max_; }
  double y_max() const { return y_max_; }
  double width() const { return x_max_ - x_min_; }
  double height() const { return y_max_ - y_min_; }
  double area() const { return width() * height(); }

  bool contains(Point p) const {
    return p.x >= x_min_ && p.x <= x_max_ && p.y >= y_min_ && p.y <= y_max_;
  }

  // Distance from `origin` (inside) along unit direction `dir` to the edge.
  double exit_distance(Point origin, Point dir) const;

  friend bool operator==(const Window&, const Window&) = default;

 private:
  double x_min_ = 0.0;
  double y_min_ = 0.0;
  double x_max_ = 1.0;
  double y_max_ = 1.0;
};

// A finite planar point pattern observed in a rectangular window.
class PointPattern {
 public:
  PointPattern() = default;
  explicit PointPattern(Window window) : window_(window) {}
  // Throws InvalidArgument if any point lies outside the window.
  PointPattern(std::vector<Point> points, Window window);

  const std::vector<Point>& points() const { return points_; }
  const Window& window() const { return window_; }
  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }
  const Point& operator[](std::size_t i) const { return points_[i]; }

  double intensity() const { return static_cast<double>(size()) / window_.area(); }

  // Appends a point; throws if it lies outside the window.
  void push_back(Point p);

 private:
  std::vector<Point> points_;
  Window window_;
};

}  // namespace spatraf
