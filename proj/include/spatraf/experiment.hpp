#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "spatraf/calibration.hpp"
#include "spatraf/netsim.hpp"
#include "spatraf/types.hpp"

namespace spatraf::exp {

// Everything a run needs besides the subcommand's own inputs.
struct ExperimentConfig {
  netsim::DropSpec drop;  // layout counts, channel, mean UEs, SINR threshold, measure
  std::size_t drops = 100;
  std::optional<std::uint64_t> seed;
  std::size_t workers = 0;
  std::size_t grid = 11;          // calibration grid per axis
  std::size_t calib_drops = 100;  // drops per calibration node
  traffic::Method method = traffic::Method::Enhanced;
  std::string out_dir = ".";

  calib::CalibrationConfig calibration(traffic::Initial initial) const;
  // Throws InvalidArgument when a count or rate is out of range.
  void validate() const;
};

// Parses the JSON config; missing keys keep their defaults. Throws Parse.
ExperimentConfig parse_config(const std::string& json_text);
std::string config_to_json(const ExperimentConfig& config);

// FNV-1a of the canonical JSON (seed, workers and output directory excluded).
std::uint64_t config_hash(const ExperimentConfig& config);

// "# config_hash=<16 hex digits>, seed=<seed>"
std::string header_line(const ExperimentConfig& config);

// Shortest round-trip formatting of a double (std::to_chars); "nan"/"inf" as is.
std::string format_double(double v);

// Pattern CSV: header "x,y", one point per row, '#' rows are comments. The
// window lives in "<path>.window.json" as {x_min, y_min, x_max, y_max}.
PointPattern read_pattern_csv(const std::string& path);
void write_pattern_csv(const std::string& path, const PointPattern& pattern, const std::string& header = {});
std::string window_sidecar_path(const std::string& csv_path);

// Fixed layout JSON: {window, macros: [[x, y], ...], picos, femtos, attractors}.
assoc::NetworkLayout read_layout_json(const std::string& path, const assoc::LayoutSpec& powers = {});
std::string layout_to_json(const assoc::NetworkLayout& layout);

std::string read_text(const std::string& path);
void write_text(const std::string& path, const std::string& text);

// Mean normalized C per measure along a mu_beta sweep at fixed alpha.
struct CurvePoint {
  double mu_beta = 0.0;
  double c_g = 0.0, c_v = 0.0, c_e = 0.0;        // normalized
  double cov_g = 0.0, cov_v = 0.0, cov_e = 0.0;  // raw CoV
  double se_g = 0.0, se_v = 0.0, se_e = 0.0;     // standard errors of the normalized means
};

std::vector<CurvePoint> measure_curve(const ExperimentConfig& config, double alpha,
                                      const std::vector<double>& betas, std::size_t drops, std::uint64_t seed);

}  // namespace spatraf::exp
