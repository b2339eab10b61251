#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "spatraf/types.hpp"

namespace spatraf::measures {

// G: nearest-neighbor distance, V: Voronoi cell area, E: Delaunay edge length.
enum class Measure { G, V, E };

std::string_view measure_name(Measure m);
// Accepts "G"/"V"/"E" in either case. Throws Parse.
Measure parse_measure(std::string_view name);

struct SummaryStats {
  double mean = 0.0;
  double variance = 0.0;  // unbiased
  double cov = 0.0;
  std::size_t count = 0;
};

// Throws TooFewPoints below 2 samples, InvalidArgument for a non-positive mean.
SummaryStats summarize(std::span<const double> samples);

// Planar Poisson reference values at intensity `lambda` (points per m^2).
struct NormalizationConstants {
  static constexpr double kCovG = 0.653;
  static constexpr double kCovV = 0.529;
  static constexpr double kCovE = 0.492;
  static constexpr double kMeanG = 0.5;      // * lambda^-0.5
  static constexpr double kMeanV = 1.0;      // * lambda^-1
  static constexpr double kMeanE = 1.131;    // * lambda^-0.5
  static constexpr double kVarG = 0.0683;    // * lambda^-1
  static constexpr double kVarV = 0.28;      // * lambda^-2
  static constexpr double kVarE = 0.31;      // * lambda^-1

  // Tabulated CoV.
  static double tabulated_cov(Measure m);
  // CoV used for normalization. For G the tabulated CoV disagrees with the
  // tabulated mean and variance; sqrt(0.0683) / 0.5 = 0.5227 is used, which
  // also matches the closed form sqrt(4 / pi - 1) of the Rayleigh law.
  static double cov(Measure m);
  static double mean(Measure m, double lambda);
  static double variance(Measure m, double lambda);
};

// Distance from each point to its closest other point. Throws TooFewPoints.
std::vector<double> nearest_neighbor_distances(const PointPattern& pattern);

// Clipped Voronoi areas; boundary cells dropped when `exclude_boundary`.
std::vector<double> voronoi_areas(const PointPattern& pattern, bool exclude_boundary);

// Lengths of the deduplicated Delaunay edges. With `exclude_boundary`, only
// edges whose endpoints both own interior Voronoi cells are kept.
std::vector<double> delaunay_edge_lengths(const PointPattern& pattern, bool exclude_boundary = false);

std::vector<double> delaunay_triangle_areas(const PointPattern& pattern);

// Raw samples of a measure. For G with `exclude_boundary`, points whose
// Voronoi cell touches the window are dropped.
std::vector<double> measure_samples(const PointPattern& pattern, Measure m, bool exclude_boundary);

struct MeasureReport {
  Measure measure = Measure::V;
  SummaryStats stats;
  double normalized_cov = 0.0;
};

MeasureReport measure(const PointPattern& pattern, Measure m, bool exclude_boundary = true);

// CoV of the measure divided by its Poisson reference; 1 for a Poisson pattern.
double normalized_cov(const PointPattern& pattern, Measure m, bool exclude_boundary = true);

}  // namespace spatraf::measures
