#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>

#include "spatraf/association.hpp"
#include "spatraf/random.hpp"
#include "spatraf/types.hpp"

namespace spatraf::traffic {

enum class Method { Basic, Enhanced };
enum class Bias { Center, Edge };
enum class Initial { Ppp, Lattice };

std::string_view method_name(Method m);
std::string_view bias_name(Bias b);
std::string_view initial_name(Initial i);
Method parse_method(std::string_view s);
Bias parse_bias(std::string_view s);
Initial parse_initial(std::string_view s);

// Generator inputs. alpha pulls attractors toward their serving stations,
// mu_beta pulls UEs toward their nearest attractor (or the cell edge).
struct TGIP {
  double alpha = 0.0;
  double mu_beta = 0.0;
  Method method = Method::Enhanced;
  Bias bias = Bias::Center;
  Initial initial = Initial::Ppp;

  // Throws InvalidArgument when alpha or mu_beta leave [0, 1].
  void validate() const;
};

// (0.5 - |mu - 0.5|) / 3: about 0.1% of draws leave [0, 1].
double sigma_beta(double mu_beta);

// Per-UE weight: mu_beta (basic) or N(mu_beta, sigma_beta) clamped to [0, 1].
// Sets `clamped` when the raw draw was outside the interval.
double draw_beta(const TGIP& tgip, RandomStream& rng, bool* clamped = nullptr);

// S' = alpha * B(S) + (1 - alpha) * S, with B(S) the serving station.
PointPattern move_attractors(const assoc::CellMap& cells, double alpha);
PointPattern move_attractors(const assoc::NetworkLayout& layout, double alpha,
                             const assoc::GeometryChannel& channel = {});

struct MoveStats {
  std::size_t draws = 0;
  std::size_t clamped = 0;
};

// U' = beta * T(U) + (1 - beta) * U. T is the Euclidean-nearest attractor for
// center bias, or the nearest point on the UE's cell boundary for edge bias.
// Throws EmptyAttractorSet when center bias meets no attractors.
PointPattern move_ues(const PointPattern& ues, const PointPattern& attractors, const TGIP& tgip,
                      RandomStream& rng, const assoc::CellMap& cells, MoveStats* stats = nullptr);

struct TrafficDrop {
  PointPattern ues;
  PointPattern attractors;  // after the alpha move
  MoveStats stats;
};

// Initial pattern (Poisson count with the given mean, placed uniformly or on
// a lattice), then both moves. Randomness comes from the Ues and Beta
// substreams of (master, drop).
TrafficDrop generate_traffic(const assoc::NetworkLayout& layout, const TGIP& tgip,
                             double mean_ue_count, const RandomStream& master, std::uint64_t drop,
                             const assoc::GeometryChannel& channel = {});

TrafficDrop generate_traffic(const assoc::NetworkLayout& layout, const TGIP& tgip,
                             double mean_ue_count, RandomStream& rng,
                             const assoc::GeometryChannel& channel = {});

// A complete realization: layout from the Layout and Attractors substreams,
// traffic as above.
struct Realization {
  assoc::NetworkLayout layout;
  TrafficDrop traffic;
};

Realization realize(const assoc::LayoutSpec& spec, const TGIP& tgip, double mean_ue_count,
                    const RandomStream& master, std::uint64_t drop,
                    const assoc::GeometryChannel& channel = {});

}  // namespace spatraf::traffic
