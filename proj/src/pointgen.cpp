#include "spatraf/pointgen.hpp"

#include <algorithm>
#include <cmath>

#include "spatraf/error.hpp"

namespace spatraf::pointgen {
namespace {

// Mirror x into [lo, hi] as many times as needed.
double reflect(double x, double lo, double hi) {
  const double span = hi - lo;
  double t = std::fmod(x - lo, 2.0 * span);
  if (t < 0.0) t += 2.0 * span;
  if (t > span) t = 2.0 * span - t;
  return std::clamp(lo + t, lo, hi);
}

}  // namespace

PointPattern generate_ppp(double intensity, const Window& window, RandomStream& rng) {
  if (!(intensity > 0.0) || !std::isfinite(intensity)) {
    throw Error(ErrorCode::InvalidArgument, "generate_ppp: intensity must be positive");
  }
  const auto count = static_cast<std::size_t>(rng.poisson(intensity * window.area()));
  return generate_uniform(count, window, rng);
}

PointPattern generate_uniform(std::size_t count, const Window& window, RandomStream& rng) {
  std::vector<Point> pts(count);
  for (auto& p : pts) {
    p.x = rng.uniform(window.x_min(), window.x_max());
    p.y = rng.uniform(window.y_min(), window.y_max());
  }
  return PointPattern(std::move(pts), window);
}

PointPattern generate_lattice(std::size_t count, const Window& window) {
  if (count < 4) throw Error(ErrorCode::InvalidArgument, "generate_lattice: count must be >= 4");
  auto side = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(count))));
  while (side * side < count) ++side;
  while ((side - 1) * (side - 1) >= count) --side;
  const double dx = window.width() / static_cast<double>(side);
  const double dy = window.height() / static_cast<double>(side);
  std::vector<Point> pts;
  pts.reserve(count);
  for (std::size_t r = 0; r < side && pts.size() < count; ++r) {
    for (std::size_t c = 0; c < side && pts.size() < count; ++c) {
      pts.push_back({window.x_min() + (static_cast<double>(c) + 0.5) * dx,
                     window.y_min() + (static_cast<double>(r) + 0.5) * dy});
    }
  }
  return PointPattern(std::move(pts), window);
}

PointPattern perturb(const PointPattern& pattern, double sigma, RandomStream& rng) {
  if (!(sigma >= 0.0)) throw Error(ErrorCode::InvalidArgument, "perturb: sigma must be >= 0");
  if (sigma == 0.0) return pattern;
  const Window& w = pattern.window();
  std::vector<Point> pts;
  pts.reserve(pattern.size());
  for (const Point& p : pattern.points()) {
    const double x = p.x + rng.normal(0.0, sigma);
    const double y = p.y + rng.normal(0.0, sigma);
    pts.push_back({reflect(x, w.x_min(), w.x_max()), reflect(y, w.y_min(), w.y_max())});
  }
  return PointPattern(std::move(pts), w);
}

}  // namespace spatraf::pointgen
