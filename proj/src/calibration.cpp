#include "spatraf/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "json.hpp"
#include "parallel.hpp"
#include "spatraf/error.hpp"

namespace spatraf::calib {
namespace {

using nlohmann::json;

std::vector<double> unit_grid(std::size_t n) {
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i) g[i] = static_cast<double>(i) / static_cast<double>(n - 1);
  return g;
}

// Largest k with grid[k] <= x (clamped so that k + 1 exists), and the weight of k + 1.
std::pair<std::size_t, double> locate(const std::vector<double>& grid, double x) {
  x = std::clamp(x, grid.front(), grid.back());
  auto it = std::upper_bound(grid.begin(), grid.end(), x);
  std::size_t k = it == grid.begin() ? 0 : static_cast<std::size_t>(it - grid.begin()) - 1;
  if (k + 1 >= grid.size()) k = grid.size() - 2;
  const double t = (x - grid[k]) / (grid[k + 1] - grid[k]);
  return {k, std::clamp(t, 0.0, 1.0)};
}

std::string hex64(std::uint64_t v) {
  char buf[19];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::vector<std::vector<double>> to_rows(const std::vector<double>& flat, std::size_t rows, std::size_t cols) {
  std::vector<std::vector<double>> out(rows, std::vector<double>(cols));
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) out[i][j] = flat[i * cols + j];
  return out;
}

std::vector<double> from_rows(const json& j, std::size_t rows, std::size_t cols, const char* name) {
  if (!j.is_array() || j.size() != rows) throw Error(ErrorCode::Parse, std::string("table field ") + name + " has the wrong shape");
  std::vector<double> out;
  out.reserve(rows * cols);
  for (const auto& row : j) {
    if (!row.is_array() || row.size() != cols) throw Error(ErrorCode::Parse, std::string("table field ") + name + " has the wrong shape");
    for (const auto& v : row) out.push_back(v.get<double>());
  }
  return out;
}

void project_lines(std::vector<double>& x, std::size_t rows, std::size_t cols, bool along_cols) {
  const std::size_t lines = along_cols ? rows : cols;
  const std::size_t len = along_cols ? cols : rows;
  std::vector<double> buf(len), w(len, 1.0);
  for (std::size_t l = 0; l < lines; ++l) {
    for (std::size_t k = 0; k < len; ++k) buf[k] = along_cols ? x[l * cols + k] : x[k * cols + l];
    const auto fit = isotonic_1d(buf, w);
    for (std::size_t k = 0; k < len; ++k) (along_cols ? x[l * cols + k] : x[k * cols + l]) = fit[k];
  }
}

}  // namespace

void CalibrationConfig::validate() const {
  if (grid_alpha < 5 || grid_beta < 5) throw Error(ErrorCode::InvalidArgument, "calibration grid must be at least 5 x 5");
  if (drops < 30) throw Error(ErrorCode::InvalidArgument, "calibration needs at least 30 drops per node");
  if (!(mean_ues > 0.0)) throw Error(ErrorCode::InvalidArgument, "mean UE count must be positive");
}

std::uint64_t layout_hash(const CalibrationConfig& c) {
  const auto& l = c.layout;
  const json j = {
      {"window", {l.window.x_min(), l.window.y_min(), l.window.x_max(), l.window.y_max()}},
      {"counts", {l.macro_count, l.pico_count, l.femto_count, l.attractor_count}},
      {"powers", {l.macro_power_dbm, l.pico_power_dbm, l.femto_power_dbm, l.bs_gain_dbi}},
      {"channel", {c.channel.carrier_ghz, c.channel.exponent}},
      {"mean_ues", c.mean_ues},
      {"measure", measures::measure_name(c.measure)},
      {"exclude_boundary", c.exclude_boundary},
      {"method", traffic::method_name(c.method)},
      {"bias", traffic::bias_name(c.bias)},
      {"initial", traffic::initial_name(c.initial)},
  };
  return fnv1a64(j.dump());
}

Stats CalibrationTable::at(double alpha, double mu_beta) const {
  const auto [i, ti] = locate(grid_alpha, alpha);
  const auto [j, tj] = locate(grid_beta, mu_beta);
  auto lerp2 = [&](const std::vector<double>& v) {
    const double a = v[index(i, j)], b = v[index(i, j + 1)];
    const double c0 = v[index(i + 1, j)], d = v[index(i + 1, j + 1)];
    return (1 - ti) * ((1 - tj) * a + tj * b) + ti * ((1 - tj) * c0 + tj * d);
  };
  return {lerp2(c), lerp2(rho)};
}

void CalibrationTable::check_shape() const {
  const std::size_t n = rows() * cols();
  if (rows() < 2 || cols() < 2) throw Error(ErrorCode::InvalidArgument, "calibration table needs at least 2 x 2 nodes");
  for (const auto* v : {&c, &rho, &raw_c, &raw_rho, &se_c, &se_rho}) {
    if (v->size() != n) throw Error(ErrorCode::InvalidArgument, "calibration table arrays do not match the grid");
  }
  for (const auto* g : {&grid_alpha, &grid_beta}) {
    if (!std::is_sorted(g->begin(), g->end()) || std::adjacent_find(g->begin(), g->end()) != g->end())
      throw Error(ErrorCode::InvalidArgument, "calibration grid must be strictly increasing");
  }
}

std::string CalibrationTable::to_json() const {
  check_shape();
  json j;
  j["grid_alpha"] = grid_alpha;
  j["grid_beta"] = grid_beta;
  j["C"] = to_rows(c, rows(), cols());
  j["rho"] = to_rows(rho, rows(), cols());
  j["se_C"] = to_rows(se_c, rows(), cols());
  j["se_rho"] = to_rows(se_rho, rows(), cols());
  j["raw_C"] = to_rows(raw_c, rows(), cols());
  j["raw_rho"] = to_rows(raw_rho, rows(), cols());
  j["meta"] = {
      {"seed", seed},
      {"drops", drops},
      {"measure", measures::measure_name(measure)},
      {"layout_hash", hex64(layout_hash)},
      {"initial", traffic::initial_name(initial)},
      {"method", traffic::method_name(method)},
      {"bias", traffic::bias_name(bias)},
      {"mean_ues", mean_ues},
  };
  return j.dump(1) + "\n";
}

CalibrationTable CalibrationTable::from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Parse, std::string("calibration table: ") + e.what());
  }
  try {
    CalibrationTable t;
    t.grid_alpha = j.at("grid_alpha").get<std::vector<double>>();
    t.grid_beta = j.at("grid_beta").get<std::vector<double>>();
    const std::size_t r = t.grid_alpha.size(), cc = t.grid_beta.size();
    t.c = from_rows(j.at("C"), r, cc, "C");
    t.rho = from_rows(j.at("rho"), r, cc, "rho");
    t.se_c = from_rows(j.at("se_C"), r, cc, "se_C");
    t.se_rho = from_rows(j.at("se_rho"), r, cc, "se_rho");
    t.raw_c = j.contains("raw_C") ? from_rows(j["raw_C"], r, cc, "raw_C") : t.c;
    t.raw_rho = j.contains("raw_rho") ? from_rows(j["raw_rho"], r, cc, "raw_rho") : t.rho;
    const auto& m = j.at("meta");
    t.seed = m.at("seed").get<std::uint64_t>();
    t.drops = m.at("drops").get<std::size_t>();
    t.measure = measures::parse_measure(m.at("measure").get<std::string>());
    t.layout_hash = std::stoull(m.at("layout_hash").get<std::string>(), nullptr, 16);
    t.initial = traffic::parse_initial(m.at("initial").get<std::string>());
    if (m.contains("method")) t.method = traffic::parse_method(m["method"].get<std::string>());
    if (m.contains("bias")) t.bias = traffic::parse_bias(m["bias"].get<std::string>());
    if (m.contains("mean_ues")) t.mean_ues = m["mean_ues"].get<double>();
    t.check_shape();
    return t;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Parse, std::string("calibration table: ") + e.what());
  } catch (const std::invalid_argument&) {
    throw Error(ErrorCode::Parse, "calibration table: bad layout_hash");
  }
}

std::vector<double> isotonic_1d(const std::vector<double>& y, const std::vector<double>& w) {
  if (y.size() != w.size()) throw Error(ErrorCode::InvalidArgument, "isotonic_1d: size mismatch");
  struct Block {
    double value, weight;
    std::size_t len;
  };
  std::vector<Block> blocks;
  for (std::size_t i = 0; i < y.size(); ++i) {
    blocks.push_back({y[i], w[i], 1});
    while (blocks.size() > 1 && blocks[blocks.size() - 2].value > blocks.back().value) {
      const Block b = blocks.back();
      blocks.pop_back();
      Block& a = blocks.back();
      const double tw = a.weight + b.weight;
      a.value = (a.value * a.weight + b.value * b.weight) / tw;
      a.weight = tw;
      a.len += b.len;
    }
  }
  std::vector<double> out;
  out.reserve(y.size());
  for (const Block& b : blocks) out.insert(out.end(), b.len, b.value);
  return out;
}

std::vector<double> isotonic_2d(const std::vector<double>& y, std::size_t rows, std::size_t cols) {
  if (y.size() != rows * cols) throw Error(ErrorCode::InvalidArgument, "isotonic_2d: size mismatch");
  std::vector<double> x = y, p(y.size(), 0.0), q(y.size(), 0.0), z(y.size());
  for (int iter = 0; iter < 2000; ++iter) {
    for (std::size_t k = 0; k < x.size(); ++k) z[k] = x[k] + p[k];
    project_lines(z, rows, cols, true);
    for (std::size_t k = 0; k < x.size(); ++k) p[k] = x[k] + p[k] - z[k];
    std::vector<double> next(x.size());
    for (std::size_t k = 0; k < x.size(); ++k) next[k] = z[k] + q[k];
    project_lines(next, rows, cols, false);
    double change = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
      q[k] = z[k] + q[k] - next[k];
      change = std::max(change, std::fabs(next[k] - x[k]));
    }
    x.swap(next);
    if (change < 1e-13) break;
  }
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 1; j < cols; ++j) x[i * cols + j] = std::max(x[i * cols + j], x[i * cols + j - 1]);
  for (std::size_t i = 1; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) x[i * cols + j] = std::max(x[i * cols + j], x[(i - 1) * cols + j]);
  return x;
}

CalibrationTable build_calibration(const CalibrationConfig& config) {
  config.validate();
  CalibrationTable t;
  t.grid_alpha = unit_grid(config.grid_alpha);
  t.grid_beta = unit_grid(config.grid_beta);
  t.seed = config.seed;
  t.drops = config.drops;
  t.measure = config.measure;
  t.layout_hash = layout_hash(config);
  t.initial = config.initial;
  t.method = config.method;
  t.bias = config.bias;
  t.mean_ues = config.mean_ues;

  const std::size_t nodes = t.rows() * t.cols();
  t.raw_c.assign(nodes, 0.0);
  t.raw_rho.assign(nodes, 0.0);
  t.se_c.assign(nodes, 0.0);
  t.se_rho.assign(nodes, 0.0);

  // Every node replays the same drops (layouts, initial UEs, beta normals).
  const RandomStream master(config.seed, 0);
  detail::parallel_for(nodes, config.workers, [&](std::size_t k) {
    traffic::TGIP tgip;
    tgip.alpha = t.grid_alpha[k / t.cols()];
    tgip.mu_beta = t.grid_beta[k % t.cols()];
    tgip.method = config.method;
    tgip.bias = config.bias;
    tgip.initial = config.initial;
    std::vector<double> cs(config.drops), rs(config.drops);
    for (std::size_t d = 0; d < config.drops; ++d) {
      const auto r = traffic::realize(config.layout, tgip, config.mean_ues, master, d, config.channel);
      cs[d] = measures::normalized_cov(r.traffic.ues, config.measure, config.exclude_boundary);
      rs[d] = assoc::correlation_coefficient(assoc::CellMap(r.layout, config.channel), r.traffic.ues);
    }
    auto mean_se = [](const std::vector<double>& v) {
      double m = 0.0;
      for (double x : v) m += x;
      m /= static_cast<double>(v.size());
      double ss = 0.0;
      for (double x : v) ss += (x - m) * (x - m);
      const double n = static_cast<double>(v.size());
      return std::pair{m, std::sqrt(ss / (n - 1.0) / n)};
    };
    std::tie(t.raw_c[k], t.se_c[k]) = mean_se(cs);
    std::tie(t.raw_rho[k], t.se_rho[k]) = mean_se(rs);
  });

  t.c = isotonic_2d(t.raw_c, t.rows(), t.cols());
  t.rho = isotonic_2d(t.raw_rho, t.rows(), t.cols());
  return t;
}

const FeasibleBin& FeasibleRegion::bin_at(double rho) const {
  if (bins.empty() || !(rho >= rho_min && rho <= rho_max)) {
    throw Error(ErrorCode::InvalidArgument, "rho outside the calibrated range");
  }
  for (const auto& b : bins)
    if (rho <= b.rho_hi) return b;
  return bins.back();
}

FeasibleRegion feasible(const CalibrationTable& table, double bin_width, std::size_t samples_per_axis) {
  table.check_shape();
  if (!(bin_width > 0.0) || samples_per_axis < 2) throw Error(ErrorCode::InvalidArgument, "feasible: bad resolution");
  std::vector<Stats> pts;
  pts.reserve(samples_per_axis * samples_per_axis);
  const double a0 = table.grid_alpha.front(), a1 = table.grid_alpha.back();
  const double b0 = table.grid_beta.front(), b1 = table.grid_beta.back();
  const double steps = static_cast<double>(samples_per_axis - 1);
  FeasibleRegion region;
  region.rho_min = std::numeric_limits<double>::infinity();
  region.rho_max = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < samples_per_axis; ++i) {
    for (std::size_t j = 0; j < samples_per_axis; ++j) {
      const Stats s = table.at(a0 + (a1 - a0) * i / steps, b0 + (b1 - b0) * j / steps);
      pts.push_back(s);
      region.rho_min = std::min(region.rho_min, s.rho);
      region.rho_max = std::max(region.rho_max, s.rho);
    }
  }
  const double start = std::floor(region.rho_min / bin_width) * bin_width;
  const auto nbins = static_cast<std::size_t>(std::ceil((region.rho_max - start) / bin_width - 1e-12));
  region.bins.resize(std::max<std::size_t>(nbins, 1));
  for (std::size_t b = 0; b < region.bins.size(); ++b) {
    auto& bin = region.bins[b];
    bin.rho_lo = start + bin_width * static_cast<double>(b);
    bin.rho_hi = bin.rho_lo + bin_width;
    bin.c_min = std::numeric_limits<double>::infinity();
    bin.c_max = -std::numeric_limits<double>::infinity();
  }
  for (const Stats& s : pts) {
    auto b = static_cast<std::size_t>((s.rho - start) / bin_width);
    b = std::min(b, region.bins.size() - 1);
    region.bins[b].c_min = std::min(region.bins[b].c_min, s.c);
    region.bins[b].c_max = std::max(region.bins[b].c_max, s.c);
  }
  // Drop empty bins at the ends (a surface jump can also leave gaps inside).
  std::erase_if(region.bins, [](const FeasibleBin& b) { return !(b.c_min <= b.c_max); });
  return region;
}

Inversion invert(const CalibrationTable& table, double c_target, double rho_target, const InvertOptions& options) {
  table.check_shape();
  if (!std::isfinite(c_target) || !std::isfinite(rho_target)) {
    throw Error(ErrorCode::InvalidArgument, "invert: targets must be finite");
  }
  if (!(options.c_tol > 0.0) || !(options.rho_tol > 0.0) || options.coarse < 2) {
    throw Error(ErrorCode::InvalidArgument, "invert: bad options");
  }
  auto cost = [&](double a, double b) {
    const Stats s = table.at(a, b);
    const double dc = (s.c - c_target) / options.c_tol;
    const double dr = (s.rho - rho_target) / options.rho_tol;
    return dc * dc + dr * dr;
  };
  const double a0 = table.grid_alpha.front(), a1 = table.grid_alpha.back();
  const double b0 = table.grid_beta.front(), b1 = table.grid_beta.back();

  double best_a = a0, best_b = b0, best = std::numeric_limits<double>::infinity();
  const double n = static_cast<double>(options.coarse - 1);
  for (std::size_t i = 0; i < options.coarse; ++i) {
    const double a = a0 + (a1 - a0) * static_cast<double>(i) / n;
    for (std::size_t j = 0; j < options.coarse; ++j) {
      const double b = b0 + (b1 - b0) * static_cast<double>(j) / n;
      const double f = cost(a, b);
      if (f < best) {
        best = f;
        best_a = a;
        best_b = b;
      }
    }
  }
  // Local refinement around the incumbent, same tie rule.
  double ha = (a1 - a0) / n, hb = (b1 - b0) / n;
  for (int level = 0; level < 4; ++level) {
    const double ca = best_a, cb = best_b;
    for (int i = -10; i <= 10; ++i) {
      const double a = std::clamp(ca + ha * i / 10.0, a0, a1);
      for (int j = -10; j <= 10; ++j) {
        const double b = std::clamp(cb + hb * j / 10.0, b0, b1);
        const double f = cost(a, b);
        if (f < best || (f == best && (a < best_a || (a == best_a && b < best_b)))) {
          best = f;
          best_a = a;
          best_b = b;
        }
      }
    }
    ha /= 10.0;
    hb /= 10.0;
  }

  Inversion out;
  out.tgip.alpha = best_a;
  out.tgip.mu_beta = best_b;
  out.tgip.method = table.method;
  out.tgip.bias = table.bias;
  out.tgip.initial = table.initial;
  out.predicted = table.at(best_a, best_b);
  if (best > 1.0) {
    char msg[200];
    std::snprintf(msg, sizeof msg,
                  "target (C=%.4g, rho=%.4g) is infeasible; nearest feasible point is (C=%.4g, rho=%.4g)",
                  c_target, rho_target, out.predicted.c, out.predicted.rho);
    throw InfeasibleError(msg, out.predicted.c, out.predicted.rho);
  }
  return out;
}

Inversion invert(const CalibrationTable& ppp_table, const CalibrationTable& lattice_table,
                 double c_target, double rho_target, const InvertOptions& options) {
  return invert(c_target < 1.0 ? lattice_table : ppp_table, c_target, rho_target, options);
}

}  // namespace spatraf::calib
