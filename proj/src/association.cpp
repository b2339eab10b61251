#include "spatraf/association.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace spatraf::assoc {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Point unit_toward(Point from, Point to) {
  const Point d = to - from;
  const double len = norm(d);
  if (len == 0.0) return {1.0, 0.0};
  return {d.x / len, d.y / len};
}

// Sub-interval of (0, inf) on which competitor k beats the serving station s
// along s + t * dir, or an empty interval. ratio_sq = (d_k / d_s)^2 at equal
// received power.
RaySegment competitor_interval(Point s, Point k, double ratio_sq, Point dir) {
  const RaySegment none{kInf, kInf};
  const Point delta = s - k;
  const double c = dot(delta, delta);
  if (c == 0.0) return ratio_sq > 1.0 ? RaySegment{0.0, kInf} : none;
  const double a = 1.0 - ratio_sq;
  const double b = 2.0 * dot(dir, delta);
  if (std::fabs(a) < 1e-14) {
    if (b >= 0.0) return none;
    return {-c / b, kInf};
  }
  const double disc = b * b - 4.0 * a * c;
  if (disc <= 0.0) return none;
  const double sq = std::sqrt(disc);
  const double q = -0.5 * (b + std::copysign(sq, b));
  double r1 = q / a;
  double r2 = c / q;
  if (r1 > r2) std::swap(r1, r2);
  if (a > 0.0) {
    if (r2 <= 0.0) return none;
    return {std::max(r1, 0.0), r2};
  }
  return {r2, kInf};
}

double compensated_mean(const std::vector<double>& v) {
  double sum = 0.0, comp = 0.0;
  for (double x : v) {
    const double y = x - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  return sum / static_cast<double>(v.size());
}

}  // namespace

std::string_view tier_name(Tier tier) {
  switch (tier) {
    case Tier::Macro: return "macro";
    case Tier::Pico: return "pico";
    case Tier::Femto: return "femto";
  }
  return "unknown";
}

TierDefaults tier_defaults(Tier tier) {
  switch (tier) {
    case Tier::Macro: return {37.0, 17.0};
    case Tier::Pico: return {17.0, 17.0};
    case Tier::Femto: return {10.0, 17.0};
  }
  return {37.0, 17.0};
}

NetworkLayout::NetworkLayout(std::vector<BaseStation> stations, PointPattern attractors)
    : stations_(std::move(stations)), attractors_(std::move(attractors)) {
  if (stations_.empty()) {
    throw Error(ErrorCode::InvalidArgument, "layout needs at least one station");
  }
  for (const auto& bs : stations_) {
    if (!attractors_.window().contains(bs.position)) {
      throw Error(ErrorCode::InvalidArgument, "station outside window");
    }
    if (!std::isfinite(bs.tx_power_dbm) || !std::isfinite(bs.antenna_gain_dbi)) {
      throw Error(ErrorCode::InvalidArgument, "station power must be finite");
    }
  }
}

double GeometryChannel::intercept_db() const { return 22.7 + 26.0 * std::log10(carrier_ghz); }

double GeometryChannel::received_power_dbm(const BaseStation& bs, Point p) const {
  const double d = distance(bs.position, p);
  if (d == 0.0) return kInf;
  return bs.eirp_dbm() - (intercept_db() + 10.0 * exponent * std::log10(d));
}

NetworkLayout sample_layout(const LayoutSpec& spec, RandomStream& layout_rng,
                            RandomStream& attractor_rng) {
  const Window& w = spec.window;
  std::vector<BaseStation> stations;
  auto place = [&](std::size_t count, Tier tier, double power) {
    for (std::size_t i = 0; i < count; ++i) {
      const double x = layout_rng.uniform(w.x_min(), w.x_max());
      const double y = layout_rng.uniform(w.y_min(), w.y_max());
      stations.push_back({{x, y}, tier, power, spec.bs_gain_dbi});
    }
  };
  place(spec.macro_count, Tier::Macro, spec.macro_power_dbm);
  place(spec.pico_count, Tier::Pico, spec.pico_power_dbm);
  place(spec.femto_count, Tier::Femto, spec.femto_power_dbm);

  PointPattern attractors(w);
  for (std::size_t i = 0; i < spec.attractor_count; ++i) {
    const double x = attractor_rng.uniform(w.x_min(), w.x_max());
    const double y = attractor_rng.uniform(w.y_min(), w.y_max());
    attractors.push_back({x, y});
  }
  return NetworkLayout(std::move(stations), std::move(attractors));
}

CellMap::CellMap(const NetworkLayout& layout, const GeometryChannel& channel)
    : layout_(&layout), channel_(channel) {
  weight_.reserve(layout.stations().size());
  for (const auto& bs : layout.stations()) {
    weight_.push_back(std::pow(10.0, -bs.eirp_dbm() / (5.0 * channel.exponent)));
  }
}

std::size_t CellMap::serving(Point p) const {
  const auto& st = layout_->stations();
  std::size_t best = 0;
  double best_key = kInf;
  for (std::size_t i = 0; i < st.size(); ++i) {
    const Point d = p - st[i].position;
    const double key = weight_[i] * dot(d, d);
    if (key < best_key) {
      best_key = key;
      best = i;
    }
  }
  return best;
}

std::vector<RaySegment> CellMap::segments(std::size_t serving, Point dir) const {
  const auto& st = layout_->stations();
  if (serving >= st.size()) throw Error(ErrorCode::IndexOutOfRange, "station index out of range");
  const Point origin = st[serving].position;
  const double reach = layout_->window().exit_distance(origin, dir);

  std::vector<RaySegment> lost;
  for (std::size_t k = 0; k < st.size(); ++k) {
    if (k == serving) continue;
    const RaySegment iv =
        competitor_interval(origin, st[k].position, weight_[serving] / weight_[k], dir);
    if (iv.start < reach && iv.end > iv.start) lost.push_back({iv.start, std::min(iv.end, reach)});
  }
  std::sort(lost.begin(), lost.end(),
            [](const RaySegment& a, const RaySegment& b) { return a.start < b.start; });

  std::vector<RaySegment> kept;
  double cursor = 0.0;
  for (const RaySegment& iv : lost) {
    if (iv.start > cursor) kept.push_back({cursor, iv.start});
    cursor = std::max(cursor, iv.end);
    if (cursor >= reach) break;
  }
  if (cursor < reach) kept.push_back({cursor, reach});
  if (kept.empty() || kept.front().start > 0.0) {
    // The station always owns its immediate neighborhood.
    kept.insert(kept.begin(), {0.0, 0.0});
  }
  return kept;
}

double CellMap::boundary_distance(Point p, std::size_t serving) const {
  const Point origin = layout_->stations().at(serving).position;
  return segments(serving, unit_toward(origin, p)).front().end;
}

double CellMap::potential(Point p) const {
  const std::size_t s = serving(p);
  const Point origin = layout_->stations()[s].position;
  const double d = distance(origin, p);
  if (d == 0.0) return 1.0;
  const auto runs = segments(s, unit_toward(origin, p));

  // The run holding p; rounding at an edge may leave p just outside every run.
  std::size_t j = 0;
  double gap = kInf;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const double g = std::max({runs[i].start - d, d - runs[i].end, 0.0});
    if (g < gap) {
      gap = g;
      j = i;
    }
    if (g == 0.0) break;
  }
  const RaySegment& run = runs[j];
  double value;
  if (j == 0) {
    if (run.end <= 0.0) return -1.0;
    value = 1.0 - 2.0 * d * d / (run.end * run.end);
  } else {
    const double len = run.end - run.start;
    if (len <= 0.0) return -1.0;
    value = -1.0 + 6.0 * (d - run.start) * (run.end - d) / (len * len);
  }
  return std::clamp(value, -1.0, 1.0);
}

Point CellMap::nearest_boundary_point(Point p, std::size_t serving, std::size_t directions) const {
  const Point origin = layout_->stations().at(serving).position;
  const Point toward = unit_toward(origin, p);
  const double base = std::atan2(toward.y, toward.x);
  const Window& w = layout_->window();
  const std::size_t rays = std::max<std::size_t>(directions, 1);
  Point best = origin;
  double best_d = kInf;
  for (std::size_t k = 0; k < rays; ++k) {
    const double theta =
        base + 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(rays);
    const Point dir{std::cos(theta), std::sin(theta)};
    const double reach = segments(serving, dir).front().end;
    Point q = origin + reach * dir;
    q.x = std::clamp(q.x, w.x_min(), w.x_max());
    q.y = std::clamp(q.y, w.y_min(), w.y_max());
    const double d = distance(q, p);
    if (d < best_d) {
      best_d = d;
      best = q;
    }
  }
  return best;
}

std::size_t serving_station(const NetworkLayout& layout, Point p, const GeometryChannel& channel) {
  return CellMap(layout, channel).serving(p);
}

std::vector<RaySegment> cell_segments(const NetworkLayout& layout, std::size_t serving,
                                      Point dir, const GeometryChannel& channel) {
  return CellMap(layout, channel).segments(serving, dir);
}

double boundary_distance(const NetworkLayout& layout, Point p, std::size_t serving,
                         const GeometryChannel& channel) {
  return CellMap(layout, channel).boundary_distance(p, serving);
}

double boundary_distance_marching(const NetworkLayout& layout, Point p, std::size_t serving,
                                  const GeometryChannel& channel) {
  const Point origin = layout.stations().at(serving).position;
  const Point dir = unit_toward(origin, p);
  const Window& w = layout.window();
  const double reach = w.exit_distance(origin, dir);
  const double step = std::min(5.0, w.width() / 500.0);
  const CellMap cells(layout, channel);
  auto owned = [&](double t) {
    return cells.serving(origin + t * dir) == serving;
  };
  double lo = 0.0;
  double hi = step;
  while (hi < reach && owned(hi)) {
    lo = hi;
    hi += step;
  }
  if (hi >= reach) {
    if (owned(reach)) return reach;
    hi = reach;
  }
  if (!owned(lo) && lo > 0.0) {
    throw Error(ErrorCode::NumericalNonConvergence, "boundary_distance: no bracket");
  }
  for (int i = 0; i < 40; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (owned(mid)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  if (hi - lo > 1e-3) {
    throw Error(ErrorCode::NumericalNonConvergence, "boundary_distance: bisection did not converge");
  }
  return 0.5 * (lo + hi);
}

double potential(const NetworkLayout& layout, Point p, const GeometryChannel& channel) {
  return CellMap(layout, channel).potential(p);
}

double correlation_coefficient(const CellMap& cells, const PointPattern& ues) {
  if (ues.empty()) throw Error(ErrorCode::EmptyPattern, "correlation_coefficient: no UEs");
  std::vector<double> values;
  values.reserve(ues.size());
  for (const Point& u : ues.points()) values.push_back(cells.potential(u));
  return compensated_mean(values);
}

double correlation_coefficient(const NetworkLayout& layout, const PointPattern& ues,
                               const GeometryChannel& channel) {
  return correlation_coefficient(CellMap(layout, channel), ues);
}

CellIntegral cell_potential_integral(const NetworkLayout& layout, std::size_t serving,
                                     std::size_t n_samples, RandomStream& rng,
                                     const GeometryChannel& channel) {
  if (n_samples < 10000) {
    throw Error(ErrorCode::InvalidArgument, "cell_potential_integral needs n_samples >= 10^4");
  }
  if (serving >= layout.stations().size()) {
    throw Error(ErrorCode::IndexOutOfRange, "station index out of range");
  }
  const CellMap cells(layout, channel);
  const Window& w = layout.window();
  const std::size_t max_attempts = 5000 * n_samples;
  CellIntegral out;
  double sum = 0.0, sum_sq = 0.0;
  while (out.samples < n_samples && out.attempts < max_attempts) {
    ++out.attempts;
    const Point q{rng.uniform(w.x_min(), w.x_max()), rng.uniform(w.y_min(), w.y_max())};
    if (cells.serving(q) != serving) continue;
    const double v = cells.potential(q);
    sum += v;
    sum_sq += v * v;
    ++out.samples;
  }
  if (out.samples < 2) {
    throw Error(ErrorCode::NumericalNonConvergence, "cell_potential_integral: cell not reached");
  }
  const double n = static_cast<double>(out.samples);
  out.mean = sum / n;
  const double var = std::max(0.0, (sum_sq - n * out.mean * out.mean) / (n - 1.0));
  out.standard_error = std::sqrt(var / n);
  return out;
}

Point nearest_boundary_point(const NetworkLayout& layout, Point p, std::size_t serving,
                             std::size_t directions, const GeometryChannel& channel) {
  return CellMap(layout, channel).nearest_boundary_point(p, serving, directions);
}

}  // namespace spatraf::assoc
