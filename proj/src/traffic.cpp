#include "spatraf/traffic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "spatraf/error.hpp"
#include "spatraf/pointgen.hpp"

namespace spatraf::traffic {
namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::size_t nearest_index(const std::vector<Point>& targets, Point p) {
  std::size_t best = 0;
  double bd = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < targets.size(); ++i) {
    const Point d = targets[i] - p;
    const double dd = dot(d, d);
    if (dd < bd) {
      bd = dd;
      best = i;
    }
  }
  return best;
}

}  // namespace

std::string_view method_name(Method m) { return m == Method::Basic ? "basic" : "enhanced"; }
std::string_view bias_name(Bias b) { return b == Bias::Center ? "center" : "edge"; }
std::string_view initial_name(Initial i) { return i == Initial::Ppp ? "ppp" : "lattice"; }

Method parse_method(std::string_view s) {
  const auto v = lower(s);
  if (v == "basic") return Method::Basic;
  if (v == "enhanced") return Method::Enhanced;
  throw Error(ErrorCode::Parse, "unknown method '" + std::string(s) + "'");
}

Bias parse_bias(std::string_view s) {
  const auto v = lower(s);
  if (v == "center") return Bias::Center;
  if (v == "edge") return Bias::Edge;
  throw Error(ErrorCode::Parse, "unknown bias '" + std::string(s) + "'");
}

Initial parse_initial(std::string_view s) {
  const auto v = lower(s);
  if (v == "ppp") return Initial::Ppp;
  if (v == "lattice") return Initial::Lattice;
  throw Error(ErrorCode::Parse, "unknown initial pattern '" + std::string(s) + "'");
}

void TGIP::validate() const {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw Error(ErrorCode::InvalidArgument, "alpha must lie in [0, 1]");
  if (!(mu_beta >= 0.0 && mu_beta <= 1.0)) throw Error(ErrorCode::InvalidArgument, "mu_beta must lie in [0, 1]");
}

double sigma_beta(double mu_beta) {
  if (!(mu_beta >= 0.0 && mu_beta <= 1.0)) throw Error(ErrorCode::InvalidArgument, "mu_beta must lie in [0, 1]");
  return (0.5 - std::fabs(mu_beta - 0.5)) / 3.0;
}

double draw_beta(const TGIP& tgip, RandomStream& rng, bool* clamped) {
  if (clamped) *clamped = false;
  if (tgip.method == Method::Basic) return tgip.mu_beta;
  const double raw = rng.normal(tgip.mu_beta, sigma_beta(tgip.mu_beta));
  const double b = std::clamp(raw, 0.0, 1.0);
  if (clamped) *clamped = b != raw;
  return b;
}

PointPattern move_attractors(const assoc::CellMap& cells, double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw Error(ErrorCode::InvalidArgument, "alpha must lie in [0, 1]");
  const auto& layout = cells.layout();
  const auto& stations = layout.stations();
  std::vector<Point> moved;
  moved.reserve(layout.attractors().size());
  for (const Point& s : layout.attractors().points()) {
    const Point b = stations[cells.serving(s)].position;
    Point q = alpha == 1.0 ? b : pull_toward(s, b, alpha);
    moved.push_back(q);
  }
  return PointPattern(std::move(moved), layout.window());
}

PointPattern move_attractors(const assoc::NetworkLayout& layout, double alpha,
                             const assoc::GeometryChannel& channel) {
  return move_attractors(assoc::CellMap(layout, channel), alpha);
}

PointPattern move_ues(const PointPattern& ues, const PointPattern& attractors, const TGIP& tgip,
                      RandomStream& rng, const assoc::CellMap& cells, MoveStats* stats) {
  tgip.validate();
  if (tgip.bias == Bias::Center && attractors.empty()) {
    throw Error(ErrorCode::EmptyAttractorSet, "move_ues: no attractors");
  }
  const auto& stations = cells.layout().stations();
  const Window& w = ues.window();
  MoveStats local;
  std::vector<Point> moved;
  moved.reserve(ues.size());
  for (const Point& u : ues.points()) {
    bool clamped = false;
    const double beta = draw_beta(tgip, rng, &clamped);
    ++local.draws;
    if (clamped) ++local.clamped;
    Point target;
    if (tgip.bias == Bias::Center) {
      target = attractors[nearest_index(attractors.points(), u)];
    } else {
      const std::size_t s = cells.serving(u);
      target = stations[s].position == u ? u : cells.nearest_boundary_point(u, s);
    }
    Point q = beta == 1.0 ? target : pull_toward(u, target, beta);
    // Rounding can leave a convex combination a hair outside the window.
    q.x = std::clamp(q.x, w.x_min(), w.x_max());
    q.y = std::clamp(q.y, w.y_min(), w.y_max());
    moved.push_back(q);
  }
  if (stats) {
    stats->draws += local.draws;
    stats->clamped += local.clamped;
  }
  return PointPattern(std::move(moved), w);
}

TrafficDrop generate_traffic(const assoc::NetworkLayout& layout, const TGIP& tgip,
                             double mean_ue_count, const RandomStream& master, std::uint64_t drop,
                             const assoc::GeometryChannel& channel) {
  tgip.validate();
  if (!(mean_ue_count > 0.0)) throw Error(ErrorCode::InvalidArgument, "mean UE count must be positive");
  const Window& w = layout.window();
  RandomStream ue_rng = master.substream(drop, Substream::Ues);
  RandomStream beta_rng = master.substream(drop, Substream::Beta);

  PointPattern initial;
  if (tgip.initial == Initial::Ppp) {
    initial = pointgen::generate_ppp(mean_ue_count / w.area(), w, ue_rng);
  } else {
    const auto count = std::max<std::uint64_t>(4, ue_rng.poisson(mean_ue_count));
    initial = pointgen::generate_lattice(static_cast<std::size_t>(count), w);
  }

  const assoc::CellMap cells(layout, channel);
  TrafficDrop out;
  out.attractors = move_attractors(cells, tgip.alpha);
  out.ues = move_ues(initial, out.attractors, tgip, beta_rng, cells, &out.stats);
  return out;
}

TrafficDrop generate_traffic(const assoc::NetworkLayout& layout, const TGIP& tgip,
                             double mean_ue_count, RandomStream& rng,
                             const assoc::GeometryChannel& channel) {
  return generate_traffic(layout, tgip, mean_ue_count, rng, 0, channel);
}

Realization realize(const assoc::LayoutSpec& spec, const TGIP& tgip, double mean_ue_count,
                    const RandomStream& master, std::uint64_t drop,
                    const assoc::GeometryChannel& channel) {
  RandomStream layout_rng = master.substream(drop, Substream::Layout);
  RandomStream attractor_rng = master.substream(drop, Substream::Attractors);
  auto layout = assoc::sample_layout(spec, layout_rng, attractor_rng);
  auto t = generate_traffic(layout, tgip, mean_ue_count, master, drop, channel);
  return {std::move(layout), std::move(t)};
}

}  // namespace spatraf::traffic
