#include "spatraf/experiment.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "parallel.hpp"
#include "spatraf/error.hpp"
#include "spatraf/measures.hpp"

namespace spatraf::exp {
namespace {

using nlohmann::json;

const std::set<std::string> kKeys = {
    "mean_ues", "macro_bs", "pico_bs", "femto_bs", "sas", "window",
    "bs_antenna_height_m", "ue_antenna_height_m", "drops", "bandwidth_mhz", "noise_psd_dbm_hz",
    "carrier_ghz", "macro_tx_power_dbm", "pico_tx_power_dbm", "femto_tx_power_dbm",
    "bs_antenna_gain_dbi", "ue_antenna_gain_dbi", "los_shadow_std_db", "nlos_shadow_std_db",
    "bs_downtilt_deg", "shadowing", "sinr_threshold_db", "measure", "method", "seed", "workers",
    "calibration", "out"};

json window_json(const Window& w) {
  return {{"x_min", w.x_min()}, {"y_min", w.y_min()}, {"x_max", w.x_max()}, {"y_max", w.y_max()}};
}

Window window_from(const json& j) {
  try {
    return Window(j.at("x_min").get<double>(), j.at("y_min").get<double>(), j.at("x_max").get<double>(),
                  j.at("y_max").get<double>());
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Parse, std::string("window: ") + e.what());
  }
}

json canonical(const ExperimentConfig& c) {
  const auto& l = c.drop.layout;
  const auto& ch = c.drop.channel;
  return {
      {"mean_ues", c.drop.mean_ues},
      {"macro_bs", l.macro_count},
      {"pico_bs", l.pico_count},
      {"femto_bs", l.femto_count},
      {"sas", l.attractor_count},
      {"window", window_json(l.window)},
      {"bs_antenna_height_m", ch.bs_height_m},
      {"ue_antenna_height_m", ch.ue_height_m},
      {"drops", c.drops},
      {"bandwidth_mhz", ch.bandwidth_mhz},
      {"noise_psd_dbm_hz", ch.noise_psd_dbm_hz},
      {"carrier_ghz", ch.carrier_ghz},
      {"macro_tx_power_dbm", l.macro_power_dbm},
      {"pico_tx_power_dbm", l.pico_power_dbm},
      {"femto_tx_power_dbm", l.femto_power_dbm},
      {"bs_antenna_gain_dbi", l.bs_gain_dbi},
      {"ue_antenna_gain_dbi", ch.ue_gain_dbi},
      {"los_shadow_std_db", ch.los_shadow_std_db},
      {"nlos_shadow_std_db", ch.nlos_shadow_std_db},
      {"bs_downtilt_deg", ch.downtilt_deg},
      {"shadowing", ch.shadowing},
      {"sinr_threshold_db", c.drop.sinr_threshold_db},
      {"measure", measures::measure_name(c.drop.measure)},
      {"method", traffic::method_name(c.method)},
      {"calibration", {{"grid", c.grid}, {"drops", c.calib_drops}}},
  };
}

}  // namespace

calib::CalibrationConfig ExperimentConfig::calibration(traffic::Initial initial) const {
  calib::CalibrationConfig cc;
  cc.grid_alpha = grid;
  cc.grid_beta = grid;
  cc.drops = calib_drops;
  cc.seed = seed.value_or(0);
  cc.measure = drop.measure;
  cc.mean_ues = drop.mean_ues;
  cc.method = method;
  cc.initial = initial;
  cc.layout = drop.layout;
  cc.channel = assoc::GeometryChannel{drop.channel.carrier_ghz, 3.67};
  cc.workers = workers;
  return cc;
}

void ExperimentConfig::validate() const {
  const auto& l = drop.layout;
  if (l.macro_count + l.pico_count + l.femto_count == 0) throw Error(ErrorCode::InvalidArgument, "config: at least one station is required");
  if (!(drop.mean_ues > 0.0)) throw Error(ErrorCode::InvalidArgument, "config: mean_ues must be positive");
  if (drops == 0) throw Error(ErrorCode::InvalidArgument, "config: drops must be positive");
  if (!(drop.channel.bandwidth_mhz > 0.0) || !(drop.channel.carrier_ghz > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "config: bandwidth and carrier must be positive");
  }
  if (drop.channel.los_shadow_std_db < 0.0 || drop.channel.nlos_shadow_std_db < 0.0) {
    throw Error(ErrorCode::InvalidArgument, "config: shadowing std must be >= 0");
  }
}

ExperimentConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Parse, std::string("config: ") + e.what());
  }
  if (!j.is_object()) throw Error(ErrorCode::Parse, "config: top level must be an object");
  for (const auto& [k, v] : j.items()) {
    if (!kKeys.count(k)) throw Error(ErrorCode::Parse, "config: unknown key '" + k + "'");
  }
  ExperimentConfig c;
  auto& l = c.drop.layout;
  auto& ch = c.drop.channel;
  try {
    auto num = [&](const char* key, double& dst) {
      if (j.contains(key)) dst = j[key].get<double>();
    };
    auto count = [&](const char* key, std::size_t& dst) {
      if (!j.contains(key)) return;
      const auto& v = j[key];
      if (!v.is_number_integer() || v.get<long long>() < 0) throw Error(ErrorCode::Parse, std::string("config: ") + key + " must be a non-negative integer");
      dst = v.get<std::size_t>();
    };
    num("mean_ues", c.drop.mean_ues);
    count("macro_bs", l.macro_count);
    count("pico_bs", l.pico_count);
    count("femto_bs", l.femto_count);
    count("sas", l.attractor_count);
    if (j.contains("window")) l.window = window_from(j["window"]);
    num("bs_antenna_height_m", ch.bs_height_m);
    num("ue_antenna_height_m", ch.ue_height_m);
    count("drops", c.drops);
    num("bandwidth_mhz", ch.bandwidth_mhz);
    num("noise_psd_dbm_hz", ch.noise_psd_dbm_hz);
    num("carrier_ghz", ch.carrier_ghz);
    num("macro_tx_power_dbm", l.macro_power_dbm);
    num("pico_tx_power_dbm", l.pico_power_dbm);
    num("femto_tx_power_dbm", l.femto_power_dbm);
    num("bs_antenna_gain_dbi", l.bs_gain_dbi);
    num("ue_antenna_gain_dbi", ch.ue_gain_dbi);
    num("los_shadow_std_db", ch.los_shadow_std_db);
    num("nlos_shadow_std_db", ch.nlos_shadow_std_db);
    num("bs_downtilt_deg", ch.downtilt_deg);
    if (j.contains("shadowing")) ch.shadowing = j["shadowing"].get<bool>();
    num("sinr_threshold_db", c.drop.sinr_threshold_db);
    if (j.contains("measure")) c.drop.measure = measures::parse_measure(j["measure"].get<std::string>());
    if (j.contains("method")) c.method = traffic::parse_method(j["method"].get<std::string>());
    if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
    count("workers", c.workers);
    if (j.contains("out")) c.out_dir = j["out"].get<std::string>();
    if (j.contains("calibration")) {
      const auto& cal = j["calibration"];
      for (const auto& [k, v] : cal.items()) {
        if (k != "grid" && k != "drops") throw Error(ErrorCode::Parse, "config: unknown calibration key '" + k + "'");
      }
      if (cal.contains("grid")) c.grid = cal["grid"].get<std::size_t>();
      if (cal.contains("drops")) c.calib_drops = cal["drops"].get<std::size_t>();
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Parse, std::string("config: ") + e.what());
  }
  return c;
}

std::string config_to_json(const ExperimentConfig& config) {
  json j = canonical(config);
  if (config.seed) j["seed"] = *config.seed;
  return j.dump(2) + "\n";
}

std::uint64_t config_hash(const ExperimentConfig& config) { return fnv1a64(canonical(config).dump()); }

std::string header_line(const ExperimentConfig& config) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "# config_hash=%016llx, seed=%llu",
                static_cast<unsigned long long>(config_hash(config)),
                static_cast<unsigned long long>(config.seed.value_or(0)));
  return buf;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string read_text(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::Io, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error(ErrorCode::Io, "cannot write '" + path + "'");
  f << text;
  if (!f) throw Error(ErrorCode::Io, "write failed for '" + path + "'");
}

std::string window_sidecar_path(const std::string& csv_path) { return csv_path + ".window.json"; }

PointPattern read_pattern_csv(const std::string& path) {
  const Window w = [&] {
    try {
      return window_from(json::parse(read_text(window_sidecar_path(path))));
    } catch (const json::exception& e) {
      throw Error(ErrorCode::Parse, "window sidecar: " + std::string(e.what()));
    }
  }();
  std::istringstream in(read_text(path));
  std::string line;
  bool header = false;
  std::vector<Point> pts;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      if (line != "x,y") throw Error(ErrorCode::Parse, path + ": expected header 'x,y'");
      header = true;
      continue;
    }
    const auto comma = line.find(',');
    Point p{};
    const char* b = line.data();
    const char* e = b + line.size();
    auto r1 = comma == std::string::npos ? std::from_chars_result{b, std::errc::invalid_argument}
                                         : std::from_chars(b, b + comma, p.x);
    auto r2 = comma == std::string::npos ? r1 : std::from_chars(b + comma + 1, e, p.y);
    if (r1.ec != std::errc() || r2.ec != std::errc() || r1.ptr != b + comma || r2.ptr != e) {
      throw Error(ErrorCode::Parse, path + ":" + std::to_string(lineno) + ": malformed row");
    }
    if (!w.contains(p)) throw Error(ErrorCode::Parse, path + ":" + std::to_string(lineno) + ": point outside window");
    pts.push_back(p);
  }
  if (!header) throw Error(ErrorCode::Parse, path + ": missing header 'x,y'");
  return PointPattern(std::move(pts), w);
}

void write_pattern_csv(const std::string& path, const PointPattern& pattern, const std::string& header) {
  std::string out;
  if (!header.empty()) out += header + "\n";
  out += "x,y\n";
  for (const Point& p : pattern.points()) out += format_double(p.x) + "," + format_double(p.y) + "\n";
  write_text(path, out);
  write_text(window_sidecar_path(path), window_json(pattern.window()).dump() + "\n");
}

assoc::NetworkLayout read_layout_json(const std::string& path, const assoc::LayoutSpec& powers) {
  json j;
  try {
    j = json::parse(read_text(path));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Parse, "layout: " + std::string(e.what()));
  }
  try {
    const Window w = window_from(j.at("window"));
    std::vector<assoc::BaseStation> st;
    auto add = [&](const char* key, assoc::Tier tier, double power) {
      if (!j.contains(key)) return;
      for (const auto& xy : j[key]) st.push_back({{xy.at(0).get<double>(), xy.at(1).get<double>()}, tier, power, powers.bs_gain_dbi});
    };
    add("macros", assoc::Tier::Macro, powers.macro_power_dbm);
    add("picos", assoc::Tier::Pico, powers.pico_power_dbm);
    add("femtos", assoc::Tier::Femto, powers.femto_power_dbm);
    PointPattern sas(w);
    if (j.contains("attractors"))
      for (const auto& xy : j["attractors"]) sas.push_back({xy.at(0).get<double>(), xy.at(1).get<double>()});
    return assoc::NetworkLayout(std::move(st), std::move(sas));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Parse, "layout: " + std::string(e.what()));
  }
}

std::string layout_to_json(const assoc::NetworkLayout& layout) {
  json j;
  j["window"] = window_json(layout.window());
  json m = json::array(), p = json::array(), f = json::array(), a = json::array();
  for (const auto& bs : layout.stations()) {
    json xy = {bs.position.x, bs.position.y};
    (bs.tier == assoc::Tier::Macro ? m : bs.tier == assoc::Tier::Pico ? p : f).push_back(xy);
  }
  for (const Point& s : layout.attractors().points()) a.push_back({s.x, s.y});
  j["macros"] = m;
  j["picos"] = p;
  j["femtos"] = f;
  j["attractors"] = a;
  return j.dump(1) + "\n";
}

std::vector<CurvePoint> measure_curve(const ExperimentConfig& config, double alpha,
                                      const std::vector<double>& betas, std::size_t drops, std::uint64_t seed) {
  if (drops < 2) throw Error(ErrorCode::InvalidArgument, "measure_curve needs at least 2 drops");
  using measures::Measure;
  const RandomStream master(seed, 0);
  const auto geo = assoc::GeometryChannel{config.drop.channel.carrier_ghz, 3.67};
  // [beta][drop][measure]
  std::vector<double> c(betas.size() * drops * 3), raw(betas.size() * drops * 3);
  detail::parallel_for(betas.size() * drops, config.workers, [&](std::size_t k) {
    const std::size_t b = k / drops, d = k % drops;
    traffic::TGIP t;
    t.alpha = alpha;
    t.mu_beta = betas[b];
    t.method = config.method;
    const auto r = traffic::realize(config.drop.layout, t, config.drop.mean_ues, master, d, geo);
    const Measure ms[3] = {Measure::G, Measure::V, Measure::E};
    for (int m = 0; m < 3; ++m) {
      const auto rep = measures::measure(r.traffic.ues, ms[m]);
      c[k * 3 + m] = rep.normalized_cov;
      raw[k * 3 + m] = rep.stats.cov;
    }
  });
  std::vector<CurvePoint> out(betas.size());
  for (std::size_t b = 0; b < betas.size(); ++b) {
    double* nc[3] = {&out[b].c_g, &out[b].c_v, &out[b].c_e};
    double* rc[3] = {&out[b].cov_g, &out[b].cov_v, &out[b].cov_e};
    double* se[3] = {&out[b].se_g, &out[b].se_v, &out[b].se_e};
    out[b].mu_beta = betas[b];
    for (int m = 0; m < 3; ++m) {
      std::vector<double> v(drops), w(drops);
      for (std::size_t d = 0; d < drops; ++d) {
        v[d] = c[(b * drops + d) * 3 + m];
        w[d] = raw[(b * drops + d) * 3 + m];
      }
      std::tie(*nc[m], *se[m]) = netsim::mean_and_se(v);
      *rc[m] = netsim::mean_and_se(w).first;
    }
  }
  return out;
}

}  // namespace spatraf::exp
