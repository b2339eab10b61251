#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "spatraf/association.hpp"
#include "spatraf/measures.hpp"
#include "spatraf/traffic.hpp"

namespace spatraf::calib {

struct CalibrationConfig {
  std::size_t grid_alpha = 11;
  std::size_t grid_beta = 11;
  std::size_t drops = 100;
  std::uint64_t seed = 0;
  measures::Measure measure = measures::Measure::V;
  bool exclude_boundary = true;
  double mean_ues = 1000.0;
  traffic::Method method = traffic::Method::Enhanced;
  traffic::Bias bias = traffic::Bias::Center;
  traffic::Initial initial = traffic::Initial::Ppp;
  assoc::LayoutSpec layout;
  assoc::GeometryChannel channel;
  std::size_t workers = 0;  // 0: hardware concurrency

  // Throws InvalidArgument below a 5 x 5 grid or 30 drops.
  void validate() const;
};

// Hash of everything that shapes the surfaces except the seed and drop count.
std::uint64_t layout_hash(const CalibrationConfig& config);

struct Stats {
  double c = 0.0;
  double rho = 0.0;
};

// Sampled surfaces C = F1(alpha, mu_beta) and rho = F2(alpha, mu_beta).
// Node arrays are row-major: index i * grid_beta.size() + j for
// (grid_alpha[i], grid_beta[j]).
class CalibrationTable {
 public:
  std::vector<double> grid_alpha;
  std::vector<double> grid_beta;
  std::vector<double> c;       // isotonic-smoothed
  std::vector<double> rho;     // isotonic-smoothed
  std::vector<double> raw_c;   // node means
  std::vector<double> raw_rho;
  std::vector<double> se_c;
  std::vector<double> se_rho;

  std::uint64_t seed = 0;
  std::size_t drops = 0;
  measures::Measure measure = measures::Measure::V;
  std::uint64_t layout_hash = 0;
  traffic::Initial initial = traffic::Initial::Ppp;
  traffic::Method method = traffic::Method::Enhanced;
  traffic::Bias bias = traffic::Bias::Center;
  double mean_ues = 1000.0;

  std::size_t rows() const { return grid_alpha.size(); }
  std::size_t cols() const { return grid_beta.size(); }
  std::size_t index(std::size_t i, std::size_t j) const { return i * cols() + j; }

  // Bilinear interpolation of the smoothed surfaces; inputs clamped to the grid.
  Stats at(double alpha, double mu_beta) const;

  // Throws InvalidArgument when the shape is inconsistent.
  void check_shape() const;

  std::string to_json() const;
  static CalibrationTable from_json(const std::string& text);
};

CalibrationTable build_calibration(const CalibrationConfig& config);

// Pool-adjacent-violators fit: weighted least-squares non-decreasing sequence.
std::vector<double> isotonic_1d(const std::vector<double>& y, const std::vector<double>& w);

// Least-squares fit non-decreasing along rows and columns (Dykstra's
// alternating projections over the two 1D cones), finished with a running
// maximum so the result is exactly monotone.
std::vector<double> isotonic_2d(const std::vector<double>& y, std::size_t rows, std::size_t cols);

struct FeasibleBin {
  double rho_lo = 0.0;
  double rho_hi = 0.0;
  double c_min = 0.0;
  double c_max = 0.0;
};

// Attainable C interval per rho bin, from a dense scan of the interpolated surfaces.
struct FeasibleRegion {
  std::vector<FeasibleBin> bins;
  double rho_min = 0.0;
  double rho_max = 0.0;

  // Interval containing `rho`. Throws InvalidArgument outside [rho_min, rho_max].
  const FeasibleBin& bin_at(double rho) const;
};

FeasibleRegion feasible(const CalibrationTable& table, double bin_width = 0.05,
                        std::size_t samples_per_axis = 201);

struct InvertOptions {
  // A target is feasible when some (alpha, mu_beta) reproduces it within
  // these tolerances (the ellipse (dC/c_tol)^2 + (drho/rho_tol)^2 <= 1).
  double c_tol = 0.02;
  double rho_tol = 0.01;
  std::size_t coarse = 101;
};

struct Inversion {
  traffic::TGIP tgip;
  Stats predicted;
};

// (alpha, mu_beta) minimizing the tolerance-weighted squared statistic error;
// ties go to the smaller alpha, then the smaller mu_beta. Throws
// InfeasibleError with the closest attainable statistics.
Inversion invert(const CalibrationTable& table, double c_target, double rho_target,
                 const InvertOptions& options = {});

// Uses the lattice-start table for sub-Poisson targets (C < 1), else the Poisson one.
Inversion invert(const CalibrationTable& ppp_table, const CalibrationTable& lattice_table,
                 double c_target, double rho_target, const InvertOptions& options = {});

}  // namespace spatraf::calib
