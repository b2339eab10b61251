// spatraf command-line front end. Talks to the library only through spatraf.h.
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "spatraf/spatraf.h"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

constexpr int kExitError = 1;
constexpr int kExitUsage = 2;
constexpr int kExitInfeasible = 3;

struct CliError {
  int code;
  std::string message;
};

int exit_code(st_status s) {
  switch (s) {
    case ST_OK: return 0;
    case ST_INVALID_ARGUMENT: return kExitUsage;
    case ST_INFEASIBLE: return kExitInfeasible;
    default: return kExitError;
  }
}

void check(st_status s) {
  if (s != ST_OK) throw CliError{exit_code(s), std::string(st_status_name(s)) + ": " + st_last_error()};
}

template <class T, void (*Free)(T*)>
struct Handle {
  T* p = nullptr;
  Handle() = default;
  Handle(const Handle&) = delete;
  Handle& operator=(const Handle&) = delete;
  ~Handle() { Free(p); }
  T** out() { return &p; }
  T* get() const { return p; }
};

using Config = Handle<st_config, st_config_free>;
using Pattern = Handle<st_pattern, st_pattern_free>;
using Layout = Handle<st_layout, st_layout_free>;
using Table = Handle<st_table, st_table_free>;

std::string take(char* s) {
  std::string out(s);
  st_free_string(s);
  return out;
}

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw CliError{kExitError, "cannot open '" + path + "'"};
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f || !(f << text)) throw CliError{kExitError, "cannot write '" + path.string() + "'"};
  std::cerr << "wrote " << path.string() << "\n";
}

struct Globals {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> drops;
  std::optional<std::size_t> workers;
  std::string out = ".";
};

struct TgipArgs {
  std::string file;
  std::optional<double> alpha, beta;
  std::string method = "enhanced", bias = "center", initial = "ppp";

  void add(CLI::App* app) {
    app->add_option("--tgip", file, "TGIP JSON {alpha, mu_beta, method, bias, initial, mean_ues, seed}");
    app->add_option("--alpha", alpha, "attractor pull toward stations in [0, 1]");
    app->add_option("--beta,--mu-beta", beta, "UE pull (mean for the enhanced method) in [0, 1]");
    app->add_option("--method", method, "basic | enhanced");
    app->add_option("--bias", bias, "center | edge");
    app->add_option("--initial", initial, "ppp | lattice");
  }
};

// Loads the config and applies the global overrides. Seed is checked by the caller.
void load_config(const Globals& g, Config& cfg) {
  const std::string text = g.config_path.empty() ? "{}" : read_file(g.config_path);
  const st_status s = st_config_parse(text.c_str(), cfg.out());
  if (s != ST_OK) throw CliError{kExitUsage, std::string("config: ") + st_last_error()};
  if (g.seed) check(st_config_set_seed(cfg.get(), *g.seed));
  if (g.drops) check(st_config_set_drops(cfg.get(), *g.drops));
  if (g.workers) check(st_config_set_workers(cfg.get(), *g.workers));
  check(st_config_validate(cfg.get()));
}

void require_seed(const Config& cfg) {
  if (!st_config_get_seed(cfg.get(), nullptr)) throw CliError{kExitUsage, "--seed is required (or \"seed\" in the config)"};
}

fs::path out_dir(const Globals& g) {
  fs::path d(g.out);
  std::error_code ec;
  fs::create_directories(d, ec);
  if (ec) throw CliError{kExitError, "cannot create '" + g.out + "': " + ec.message()};
  return d;
}

std::string header(const Config& cfg) {
  char* h = nullptr;
  check(st_config_header(cfg.get(), &h));
  return take(h);
}

// Builds the generator inputs from --tgip and/or the flags (flags win).
st_tgip resolve_tgip(TgipArgs& a, Config& cfg) {
  st_tgip t;
  st_tgip_default(&t);
  if (!a.file.empty()) {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(read_file(a.file));
      if (j.contains("alpha")) t.alpha = j["alpha"].get<double>();
      if (j.contains("mu_beta")) t.mu_beta = j["mu_beta"].get<double>();
      if (j.contains("method")) check(st_method_parse(j["method"].get<std::string>().c_str(), &t.method));
      if (j.contains("bias")) check(st_bias_parse(j["bias"].get<std::string>().c_str(), &t.bias));
      if (j.contains("initial")) check(st_initial_parse(j["initial"].get<std::string>().c_str(), &t.initial));
      if (j.contains("seed")) check(st_config_set_seed(cfg.get(), j["seed"].get<std::uint64_t>()));
      if (j.contains("mean_ues")) {
        // mean_ues lives in the config; re-parse with the override.
        char* js = nullptr;
        check(st_config_to_json(cfg.get(), &js));
        auto cj = nlohmann::json::parse(take(js));
        cj["mean_ues"] = j["mean_ues"].get<double>();
        Config fresh;
        check(st_config_parse(cj.dump().c_str(), fresh.out()));
        std::swap(cfg.p, fresh.p);
      }
    } catch (const nlohmann::json::exception& e) {
      throw CliError{kExitError, "tgip: " + std::string(e.what())};
    }
  }
  if (a.alpha) t.alpha = *a.alpha;
  if (a.beta) t.mu_beta = *a.beta;
  if (a.file.empty() || a.method != "enhanced") check(st_method_parse(a.method.c_str(), &t.method));
  if (a.file.empty() || a.bias != "center") check(st_bias_parse(a.bias.c_str(), &t.bias));
  if (a.file.empty() || a.initial != "ppp") check(st_initial_parse(a.initial.c_str(), &t.initial));
  return t;
}

std::string kpi_csv(const std::string& head, const std::vector<st_kpi>& ks) {
  std::string s = head + "\n";
  s += "target_C,target_rho,measured_C,measured_rho,mean_rate_bps,se_rate,coverage_prob,se_cov,drops,seed\n";
  for (const auto& k : ks) {
    s += fmt(k.target_c) + "," + fmt(k.target_rho) + "," + fmt(k.measured_c) + "," + fmt(k.measured_rho) + "," +
         fmt(k.mean_rate_bps) + "," + fmt(k.se_rate) + "," + fmt(k.coverage_prob) + "," + fmt(k.se_cov) + "," +
         std::to_string(k.drops) + "," + std::to_string(k.seed) + "\n";
  }
  return s;
}

void load_table(const std::string& path, Table& t, const char* what) {
  if (path.empty()) throw CliError{kExitUsage, std::string("--") + what + " is required"};
  check(st_table_read(path.c_str(), t.out()));
}

std::vector<std::pair<double, double>> read_targets(const std::string& path) {
  std::vector<std::pair<double, double>> out;
  std::istringstream in(read_file(path));
  std::string line;
  bool header = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      header = true;
      if (line.rfind("target_C,target_rho", 0) == 0) continue;
    }
    double c = 0, r = 0;
    char comma = 0;
    std::istringstream ls(line);
    if (!(ls >> c >> comma >> r) || comma != ',') throw CliError{kExitError, path + ": malformed target row '" + line + "'"};
    out.emplace_back(c, r);
  }
  return out;
}

int cmd_calibrate(const Globals& g, std::optional<std::size_t> grid, const std::string& initial) {
  Config cfg;
  load_config(g, cfg);
  require_seed(cfg);
  if (grid || g.drops) {
    char* js = nullptr;
    check(st_config_to_json(cfg.get(), &js));
    const auto cj = nlohmann::json::parse(take(js));
    const std::size_t gr = grid.value_or(cj["calibration"]["grid"].get<std::size_t>());
    const std::size_t dr = g.drops.value_or(cj["calibration"]["drops"].get<std::size_t>());
    check(st_config_set_calibration(cfg.get(), gr, dr));
  }
  const fs::path dir = out_dir(g);
  std::vector<std::pair<st_initial, std::string>> runs;
  if (initial == "ppp" || initial == "both") runs.emplace_back(ST_INITIAL_PPP, "ppp");
  if (initial == "lattice" || initial == "both") runs.emplace_back(ST_INITIAL_LATTICE, "lattice");
  for (const auto& [ini, name] : runs) {
    Table t;
    check(st_calibrate(cfg.get(), ini, t.out()));
    const fs::path p = dir / ("table_" + name + ".json");
    check(st_table_write(t.get(), p.string().c_str(), header(cfg).c_str()));
    std::cerr << "wrote " << p.string() << "\n";
  }
  return 0;
}

int cmd_generate(const Globals& g, TgipArgs& ta, const std::string& layout_path, std::optional<double> target_c,
                 std::optional<double> target_rho, const std::string& table_path, const std::string& lattice_path,
                 std::uint64_t drop) {
  Config cfg;
  load_config(g, cfg);
  st_tgip t = resolve_tgip(ta, cfg);
  require_seed(cfg);
  if (target_c.has_value() != target_rho.has_value()) throw CliError{kExitUsage, "--target-c and --target-rho go together"};
  ordered_json stats;
  stats["header"] = header(cfg);
  if (target_c) {
    Table ppp, lat;
    load_table(table_path, ppp, "table");
    if (!lattice_path.empty()) check(st_table_read(lattice_path.c_str(), lat.out()));
    double pc = 0, pr = 0;
    const st_status s = st_invert(ppp.get(), lat.get(), *target_c, *target_rho, &t, &pc, &pr);
    if (s == ST_INFEASIBLE) {
      throw CliError{kExitInfeasible, "target (C=" + fmt(*target_c) + ", rho=" + fmt(*target_rho) +
                                          ") is infeasible; nearest feasible point C=" + fmt(pc) + ", rho=" + fmt(pr) +
                                          " at alpha=" + fmt(t.alpha) + ", mu_beta=" + fmt(t.mu_beta)};
    }
    check(s);
    stats["target_C"] = *target_c;
    stats["target_rho"] = *target_rho;
    stats["predicted_C"] = pc;
    stats["predicted_rho"] = pr;
  }
  const fs::path dir = out_dir(g);
  Layout layout;
  if (layout_path.empty()) {
    check(st_layout_sample(cfg.get(), drop, layout.out()));
    char* lj = nullptr;
    check(st_layout_to_json(layout.get(), &lj));
    auto j = nlohmann::ordered_json::parse(take(lj));
    j["header"] = header(cfg);
    write_file(dir / "layout.json", j.dump(1) + "\n");
  } else {
    check(st_layout_read_json(layout_path.c_str(), cfg.get(), layout.out()));
  }
  Pattern ues;
  check(st_generate(layout.get(), cfg.get(), &t, drop, ues.out()));
  const fs::path csv = dir / "ues.csv";
  check(st_pattern_write_csv(ues.get(), csv.string().c_str(), header(cfg).c_str()));
  std::cerr << "wrote " << csv.string() << "\n";

  char* cj = nullptr;
  check(st_config_to_json(cfg.get(), &cj));
  const std::string mname = nlohmann::json::parse(take(cj))["measure"].get<std::string>();
  st_measure_kind mk;
  check(st_measure_parse(mname.c_str(), &mk));
  st_measure_report rep;
  check(st_measure(ues.get(), mk, 1, &rep));
  double rho = 0;
  check(st_correlation(layout.get(), cfg.get(), ues.get(), &rho));
  stats["alpha"] = t.alpha;
  stats["mu_beta"] = t.mu_beta;
  stats["measure"] = mname;
  stats["n"] = st_pattern_size(ues.get());
  stats["C"] = rep.normalized_cov;
  stats["rho"] = rho;
  write_file(dir / "stats.json", stats.dump(1) + "\n");
  return 0;
}

int cmd_measure(const Globals& g, const std::string& pattern_path, const std::string& measure, bool include_boundary,
                const std::string& output) {
  Config cfg;
  load_config(g, cfg);
  Pattern p;
  check(st_pattern_read_csv(pattern_path.c_str(), p.out()));
  st_measure_kind mk;
  check(st_measure_parse(measure.c_str(), &mk));
  st_measure_report r;
  check(st_measure(p.get(), mk, include_boundary ? 0 : 1, &r));
  ordered_json j;
  j["header"] = header(cfg);
  j["measure"] = measure;
  j["mean"] = r.mean;
  j["variance"] = r.variance;
  j["cov"] = r.cov;
  j["normalized_cov"] = r.normalized_cov;
  j["n"] = r.n;
  const std::string text = j.dump(1) + "\n";
  if (output.empty()) {
    std::cout << text;
  } else {
    write_file(fs::path(output), text);
  }
  return 0;
}

int cmd_simulate(const Globals& g, TgipArgs& ta) {
  Config cfg;
  load_config(g, cfg);
  const st_tgip t = resolve_tgip(ta, cfg);
  require_seed(cfg);
  st_kpi k;
  check(st_simulate(cfg.get(), &t, &k));
  write_file(out_dir(g) / "simulate.csv", kpi_csv(header(cfg), {k}));
  return 0;
}

int cmd_sweep(const Globals& g, const std::string& mode, const std::string& table_path, const std::string& lattice_path,
              const std::string& targets_path, double alpha, std::vector<double> betas, double bin_width) {
  Config cfg;
  load_config(g, cfg);
  require_seed(cfg);
  const fs::path dir = out_dir(g);
  const std::string head = header(cfg);

  if (mode == "fig7") {
    if (betas.empty())
      for (int i = 0; i <= 10; ++i) betas.push_back(i / 10.0);
    std::vector<st_curve_point> pts(betas.size());
    check(st_measure_curve(cfg.get(), alpha, betas.data(), betas.size(), pts.data()));
    std::string s = head + "\nalpha,mu_beta,C_G,C_V,C_E,cov_G,cov_V,cov_E,se_G,se_V,se_E\n";
    for (const auto& p : pts) {
      s += fmt(alpha) + "," + fmt(p.mu_beta) + "," + fmt(p.c_g) + "," + fmt(p.c_v) + "," + fmt(p.c_e) + "," +
           fmt(p.cov_g) + "," + fmt(p.cov_v) + "," + fmt(p.cov_e) + "," + fmt(p.se_g) + "," + fmt(p.se_v) + "," +
           fmt(p.se_e) + "\n";
    }
    write_file(dir / "fig7.csv", s);
    return 0;
  }

  Table ppp, lat;
  load_table(table_path, ppp, "table");

  if (mode == "maps") {
    std::string s = head + "\ninitial,alpha,mu_beta,C,rho,raw_C,raw_rho,se_C,se_rho\n";
    auto dump = [&](const Table& t, const char* name) {
      std::size_t rows = 0, cols = 0;
      check(st_table_dims(t.get(), &rows, &cols));
      for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) {
          st_table_node n;
          check(st_table_node_at(t.get(), i, j, &n));
          s += std::string(name) + "," + fmt(n.alpha) + "," + fmt(n.mu_beta) + "," + fmt(n.c) + "," + fmt(n.rho) +
               "," + fmt(n.raw_c) + "," + fmt(n.raw_rho) + "," + fmt(n.se_c) + "," + fmt(n.se_rho) + "\n";
        }
    };
    dump(ppp, "ppp");
    if (!lattice_path.empty()) {
      check(st_table_read(lattice_path.c_str(), lat.out()));
      dump(lat, "lattice");
    }
    write_file(dir / "maps.csv", s);
    return 0;
  }

  if (mode == "fig11") {
    std::string s = head + "\ninitial,rho_lo,rho_hi,C_min,C_max\n";
    auto dump = [&](const Table& t, const char* name) {
      std::size_t n = 0;
      check(st_feasible_bins(t.get(), bin_width, nullptr, 0, &n));
      std::vector<st_feasible_bin> bins(n);
      check(st_feasible_bins(t.get(), bin_width, bins.data(), n, &n));
      for (const auto& b : bins)
        s += std::string(name) + "," + fmt(b.rho_lo) + "," + fmt(b.rho_hi) + "," + fmt(b.c_min) + "," + fmt(b.c_max) + "\n";
    };
    dump(ppp, "ppp");
    if (!lattice_path.empty()) {
      check(st_table_read(lattice_path.c_str(), lat.out()));
      dump(lat, "lattice");
    }
    write_file(dir / "fig11.csv", s);
    return 0;
  }

  // roundtrip and kpi: inversion plus Monte Carlo per target.
  load_table(lattice_path, lat, "lattice-table");
  std::vector<std::pair<double, double>> targets;
  if (!targets_path.empty()) {
    targets = read_targets(targets_path);
  } else if (mode == "roundtrip") {
    targets = {{0.5, 0.0}, {0.8, 0.05}, {1.0, 0.0}, {1.5, 0.1}, {2.0, 0.2}, {2.5, 0.05}, {3.0, 0.3}, {4.0, 0.45}, {5.0, 0.6}};
  } else {
    for (int ci = 1; ci <= 12; ++ci)
      for (int ri = 0; ri <= 9; ++ri) targets.emplace_back(0.5 * ci, 0.1 * ri);
  }
  std::vector<double> flat;
  for (const auto& [c, r] : targets) {
    flat.push_back(c);
    flat.push_back(r);
  }
  std::vector<st_kpi> ks(targets.size());
  check(st_sweep(cfg.get(), flat.data(), targets.size(), ppp.get(), lat.get(), ks.data()));
  std::size_t skipped = 0;
  for (const auto& k : ks) skipped += k.feasible ? 0 : 1;
  if (skipped) std::cerr << skipped << " infeasible target(s) written as nan\n";
  write_file(dir / (mode + ".csv"), kpi_csv(head, ks));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"spatraf: spatial traffic generation, measurement and HetNet simulation"};
  app.set_version_flag("--version", std::string(st_version()));
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--config", g.config_path, "experiment config JSON")->check(CLI::ExistingFile);
  app.add_option("--seed", g.seed, "master seed");
  app.add_option("--drops", g.drops, "Monte Carlo drops (per node for calibrate)")->check(CLI::PositiveNumber);
  app.add_option("--workers", g.workers, "worker threads, 0 = hardware concurrency");
  app.add_option("--out", g.out, "output directory");

  auto* cal = app.add_subcommand("calibrate", "build the (alpha, mu_beta) -> (C, rho) tables");
  std::optional<std::size_t> grid;
  std::string initial = "both";
  cal->add_option("--grid", grid, "grid points per axis");
  cal->add_option("--initial", initial, "ppp | lattice | both")->check(CLI::IsMember({"ppp", "lattice", "both"}));

  auto* gen = app.add_subcommand("generate", "generate one UE pattern");
  TgipArgs gen_t;
  gen_t.add(gen);
  std::string layout_path, table_path, lattice_path;
  std::optional<double> target_c, target_rho;
  std::uint64_t drop = 0;
  gen->add_option("--layout", layout_path, "fixed layout JSON (sampled from the seed otherwise)");
  gen->add_option("--target-c", target_c, "target normalized CoV");
  gen->add_option("--target-rho", target_rho, "target correlation coefficient");
  gen->add_option("--table", table_path, "Poisson-start calibration table");
  gen->add_option("--lattice-table", lattice_path, "lattice-start calibration table");
  gen->add_option("--drop", drop, "drop index");

  auto* mea = app.add_subcommand("measure", "measure a pattern CSV");
  std::string pattern_path, measure = "V", output;
  bool include_boundary = false;
  mea->add_option("pattern", pattern_path, "pattern CSV")->required()->check(CLI::ExistingFile);
  mea->add_option("--measure", measure, "G | V | E")->check(CLI::IsMember({"G", "V", "E"}));
  mea->add_flag("--include-boundary", include_boundary, "keep window-touching cells");
  mea->add_option("--output", output, "write JSON here instead of stdout");

  auto* sim = app.add_subcommand("simulate", "network KPIs for explicit generator inputs");
  TgipArgs sim_t;
  sim_t.add(sim);

  auto* swp = app.add_subcommand("sweep", "plot data and KPI sweeps");
  std::string mode = "kpi", swp_table, swp_lattice, targets_path;
  double alpha = 0.0, bin_width = 0.05;
  std::vector<double> betas;
  swp->add_option("--mode", mode, "fig7 | maps | fig11 | roundtrip | kpi")
      ->check(CLI::IsMember({"fig7", "maps", "fig11", "roundtrip", "kpi"}));
  swp->add_option("--table", swp_table, "Poisson-start calibration table");
  swp->add_option("--lattice-table", swp_lattice, "lattice-start calibration table");
  swp->add_option("--targets", targets_path, "CSV of target_C,target_rho")->check(CLI::ExistingFile);
  swp->add_option("--alpha", alpha, "fig7: fixed alpha");
  swp->add_option("--betas", betas, "fig7: mu_beta values")->delimiter(',');
  swp->add_option("--bin-width", bin_width, "fig11: rho bin width");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  try {
    if (cal->parsed()) return cmd_calibrate(g, grid, initial);
    if (gen->parsed())
      return cmd_generate(g, gen_t, layout_path, target_c, target_rho, table_path, lattice_path, drop);
    if (mea->parsed()) return cmd_measure(g, pattern_path, measure, include_boundary, output);
    if (sim->parsed()) return cmd_simulate(g, sim_t);
    if (swp->parsed()) return cmd_sweep(g, mode, swp_table, swp_lattice, targets_path, alpha, betas, bin_width);
  } catch (const CliError& e) {
    std::cerr << "spatraf: " << e.message << "\n";
    return e.code;
  }
  return kExitUsage;
}
