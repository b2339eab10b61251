#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "spatraf/types.hpp"

namespace spatraf::testing {

// Plain i.i.d. uniform points; independent of the library's generators.
inline PointPattern uniform_points(std::size_t n, const Window& w, std::uint64_t seed) {
  std::mt19937_64 eng(seed);
  std::uniform_real_distribution<double> ux(w.x_min(), w.x_max());
  std::uniform_real_distribution<double> uy(w.y_min(), w.y_max());
  std::vector<Point> pts(n);
  for (auto& p : pts) p = {ux(eng), uy(eng)};
  return PointPattern(std::move(pts), w);
}

inline double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

inline double cov_of(const std::vector<double>& v) {
  const double m = mean_of(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1)) / m;
}

}  // namespace spatraf::testing
