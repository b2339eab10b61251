#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include "spatraf/random.hpp"
#include "spatraf/types.hpp"

namespace spatraf::assoc {

enum class Tier { Macro, Pico, Femto };

std::string_view tier_name(Tier tier);

struct TierDefaults {
  double tx_power_dbm;
  double antenna_gain_dbi;
};

// Macro 37 dBm, pico 17 dBm, femto 10 dBm; 17 dBi boresight gain.
TierDefaults tier_defaults(Tier tier);

struct BaseStation {
  Point position;
  Tier tier = Tier::Macro;
  double tx_power_dbm = 37.0;
  double antenna_gain_dbi = 17.0;

  double eirp_dbm() const { return tx_power_dbm + antenna_gain_dbi; }
};

// Stations plus social attractors in one window.
class NetworkLayout {
 public:
  NetworkLayout(std::vector<BaseStation> stations, PointPattern attractors);

  const std::vector<BaseStation>& stations() const { return stations_; }
  const PointPattern& attractors() const { return attractors_; }
  const Window& window() const { return attractors_.window(); }

  NetworkLayout with_attractors(PointPattern attractors) const {
    return NetworkLayout(stations_, std::move(attractors));
  }

 private:
  std::vector<BaseStation> stations_;
  PointPattern attractors_;
};

// Deterministic log-distance law used for cell geometry (no shadowing):
// P_rx = eirp - (A + 10 * exponent * log10(d)), A = 22.7 + 26 log10(f_c).
struct GeometryChannel {
  double carrier_ghz = 2.5;
  double exponent = 3.67;

  double intercept_db() const;
  double received_power_dbm(const BaseStation& bs, Point p) const;
};

// Counts and tiers for a randomly dropped layout.
struct LayoutSpec {
  Window window = Window::square(1000.0);
  std::size_t macro_count = 10;
  std::size_t pico_count = 20;
  std::size_t femto_count = 0;
  std::size_t attractor_count = 50;
  double macro_power_dbm = 37.0;
  double pico_power_dbm = 17.0;
  double femto_power_dbm = 10.0;
  double bs_gain_dbi = 17.0;
};

// Stations and attractors placed independently and uniformly (fixed counts).
NetworkLayout sample_layout(const LayoutSpec& spec, RandomStream& layout_rng,
                            RandomStream& attractor_rng);

// A ray run [start, end] from a station that stays inside its cell.
struct RaySegment {
  double start;
  double end;
};

// Precomputed cell geometry of a layout under one channel. Cheap to query
// repeatedly; immutable and safe to share between threads.
class CellMap {
 public:
  explicit CellMap(const NetworkLayout& layout, const GeometryChannel& channel = {});

  const NetworkLayout& layout() const { return *layout_; }
  const GeometryChannel& channel() const { return channel_; }

  std::size_t serving(Point p) const;
  std::vector<RaySegment> segments(std::size_t serving, Point dir) const;
  double boundary_distance(Point p, std::size_t serving) const;
  double potential(Point p) const;
  Point nearest_boundary_point(Point p, std::size_t serving, std::size_t directions = 64) const;

 private:
  const NetworkLayout* layout_;
  GeometryChannel channel_;
  // Station i beats j at p iff weight_i * |p - b_i|^2 < weight_j * |p - b_j|^2.
  std::vector<double> weight_;
};

// Index of the station with the largest deterministic received power at p;
// ties go to the lowest index.
std::size_t serving_station(const NetworkLayout& layout, Point p,
                            const GeometryChannel& channel = {});

// The parts of the ray from station `serving` along unit `dir` that belong to
// its cell, ordered by distance, up to the window edge. Competitor regions
// are solved in closed form: under a common exponent each competitor wins on
// one interval of the ray.
std::vector<RaySegment> cell_segments(const NetworkLayout& layout, std::size_t serving,
                                      Point dir, const GeometryChannel& channel = {});

// Distance from the serving station, along the ray through p, to the first
// point where another station wins or the window edge is reached.
double boundary_distance(const NetworkLayout& layout, Point p, std::size_t serving,
                         const GeometryChannel& channel = {});

// Same quantity found by marching in steps of min(5 m, width/500) and then
// bisecting 40 times. Throws NumericalNonConvergence if no bracket is found.
double boundary_distance_marching(const NetworkLayout& layout, Point p, std::size_t serving,
                                  const GeometryChannel& channel = {});

// Potential in [-1, 1]: 1 - 2 d^2 / D^2 on the run of the ray that starts at
// the station. Points the ray reaches only after leaving and re-entering the
// cell get -1 + 6 (d - a)(b - d) / (b - a)^2 on their run [a, b], which keeps
// every radial chord, and so every cell, at zero mean.
double potential(const NetworkLayout& layout, Point p, const GeometryChannel& channel = {});

// Mean potential over the pattern. Throws EmptyPattern.
double correlation_coefficient(const NetworkLayout& layout, const PointPattern& ues,
                               const GeometryChannel& channel = {});
double correlation_coefficient(const CellMap& cells, const PointPattern& ues);

struct CellIntegral {
  double mean = 0.0;
  double standard_error = 0.0;
  std::size_t samples = 0;
  std::size_t attempts = 0;
};

// Monte Carlo mean of the potential over the cell of `serving`, using
// rejection sampling in the window. Requires n_samples >= 10^4.
CellIntegral cell_potential_integral(const NetworkLayout& layout, std::size_t serving,
                                     std::size_t n_samples, RandomStream& rng,
                                     const GeometryChannel& channel = {});

// Closest of the first-crossing boundary points on `directions` rays from
// the serving station, fanned out around the direction of p.
Point nearest_boundary_point(const NetworkLayout& layout, Point p, std::size_t serving,
                             std::size_t directions = 64, const GeometryChannel& channel = {});

}  // namespace spatraf::assoc
