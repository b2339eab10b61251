#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "spatraf/association.hpp"
#include "spatraf/calibration.hpp"
#include "spatraf/traffic.hpp"

namespace spatraf::netsim {

// Urban-micro downlink channel. Path loss uses the 3D link distance
// (station and UE heights); the LoS probability uses the ground distance.
struct ChannelModel {
  double carrier_ghz = 2.5;
  double bandwidth_mhz = 20.0;
  double noise_psd_dbm_hz = -174.0;
  double los_shadow_std_db = 3.0;
  double nlos_shadow_std_db = 6.0;
  double bs_height_m = 10.0;
  double ue_height_m = 1.5;
  double ue_gain_dbi = 0.0;
  double downtilt_deg = 12.0;  // stored only; antennas are omni-directional
  double min_distance_m = 1.0;
  bool shadowing = true;

  double noise_dbm() const;
  double bandwidth_hz() const { return bandwidth_mhz * 1e6; }
};

// LoS: 22 log10 d + 28 + 20 log10 f; NLoS: 36.7 log10 d + 22.7 + 26 log10 f.
// d in meters (clamped to min_distance_m), f in GHz.
double path_loss_db(const ChannelModel& channel, double d, bool los);

// min(18 / d, 1) (1 - exp(-d / 36)) + exp(-d / 36).
double los_probability(double d);

struct LinkState {
  bool los = false;
  double shadow_db = 0.0;
};

// One LoS state and one shadowing value per station. Uniforms come from
// `los_rng` and standard normals from `shadow_rng`, one of each per link,
// so paired runs stay aligned.
std::vector<LinkState> draw_links(const assoc::NetworkLayout& layout, const ChannelModel& channel,
                                  Point ue, RandomStream& los_rng, RandomStream& shadow_rng);

double received_power_dbm(const assoc::BaseStation& bs, const ChannelModel& channel, Point ue,
                          const LinkState& link);

struct SinrResult {
  std::size_t serving = 0;
  double sinr_db = 0.0;
  double signal_dbm = 0.0;
};

// Strongest received power serves; every other station interferes.
SinrResult sinr(const assoc::NetworkLayout& layout, const ChannelModel& channel, Point ue,
                std::span<const LinkState> links);

struct DropResult {
  std::vector<std::size_t> serving;
  std::vector<double> sinr_db;
  std::vector<double> rate_bps;
  double mean_rate_bps = 0.0;
  double coverage_prob = 0.0;
  double measured_c = std::numeric_limits<double>::quiet_NaN();
  double measured_rho = std::numeric_limits<double>::quiet_NaN();
  std::uint64_t seed = 0;
  std::uint64_t drop = 0;
};

// Equal resource split per station: rate = B / N_b * log2(1 + SINR).
// Coverage counts UEs with SINR >= threshold.
DropResult evaluate(const assoc::NetworkLayout& layout, const PointPattern& ues, const ChannelModel& channel,
                    double sinr_threshold_db, RandomStream& los_rng, RandomStream& shadow_rng);

struct DropSpec {
  assoc::LayoutSpec layout;
  ChannelModel channel;
  double mean_ues = 1000.0;
  double sinr_threshold_db = 10.0;
  measures::Measure measure = measures::Measure::V;
  bool measure_stats = true;
};

// Draws layout, attractors and UEs through the traffic pipeline, then
// evaluates SINR and rates. Pure function of (spec, tgip, master, drop).
DropResult run_drop(const DropSpec& spec, const traffic::TGIP& tgip, const RandomStream& master,
                    std::uint64_t drop);

struct Target {
  double c = 1.0;
  double rho = 0.0;
};

struct KpiPoint {
  Target target;
  bool feasible = true;
  std::string note;
  traffic::TGIP tgip;
  double measured_c = 0.0;
  double measured_rho = 0.0;
  double mean_rate_bps = 0.0;
  double se_rate = 0.0;
  double coverage_prob = 0.0;
  double se_cov = 0.0;
  std::size_t drops = 0;
  std::uint64_t seed = 0;
  // Per-drop values, aligned across targets (same drop index, same draws).
  std::vector<double> drop_rate;
  std::vector<double> drop_cov;
  std::vector<double> drop_c;
  std::vector<double> drop_rho;
};

// Per target: invert against the tables, then `drops` drops. Infeasible
// targets come back with feasible = false and the nearest point in `note`.
std::vector<KpiPoint> sweep(const DropSpec& spec, const std::vector<Target>& targets,
                            const calib::CalibrationTable& ppp_table,
                            const calib::CalibrationTable& lattice_table, std::size_t drops,
                            std::uint64_t seed, std::size_t workers = 0,
                            const calib::InvertOptions& invert_options = {});

// Same for explicit generator inputs.
KpiPoint simulate(const DropSpec& spec, const traffic::TGIP& tgip, std::size_t drops, std::uint64_t seed,
                  std::size_t workers = 0);

// Mean and standard error with compensated summation.
std::pair<double, double> mean_and_se(std::span<const double> v);

// One-sided paired t-test p-value for mean(b - a) > 0.
double paired_p_greater(std::span<const double> a, std::span<const double> b);

}  // namespace spatraf::netsim
