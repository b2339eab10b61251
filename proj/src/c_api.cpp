#include "spatraf/spatraf.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <limits>
#include <string>

#include "json.hpp"
#include "spatraf/calibration.hpp"
#include "spatraf/error.hpp"
#include "spatraf/experiment.hpp"
#include "spatraf/measures.hpp"
#include "spatraf/netsim.hpp"
#include "spatraf/traffic.hpp"

struct st_config {
  spatraf::exp::ExperimentConfig cfg;
};
struct st_pattern {
  spatraf::PointPattern p;
};
struct st_layout {
  spatraf::assoc::NetworkLayout l;
};
struct st_table {
  spatraf::calib::CalibrationTable t;
};

namespace {

using namespace spatraf;

thread_local std::string g_last_error;

st_status fail(st_status s, const std::string& what) {
  g_last_error = what;
  return s;
}

st_status from_code(ErrorCode c) {
  switch (c) {
    case ErrorCode::InvalidArgument: return ST_INVALID_ARGUMENT;
    case ErrorCode::DegenerateInput: return ST_DEGENERATE_INPUT;
    case ErrorCode::TooFewPoints: return ST_TOO_FEW_POINTS;
    case ErrorCode::EmptyPattern: return ST_EMPTY_PATTERN;
    case ErrorCode::EmptyAttractorSet: return ST_EMPTY_ATTRACTOR_SET;
    case ErrorCode::IndexOutOfRange: return ST_INDEX_OUT_OF_RANGE;
    case ErrorCode::NumericalNonConvergence: return ST_NONCONVERGENCE;
    case ErrorCode::Infeasible: return ST_INFEASIBLE;
    case ErrorCode::Io: return ST_IO;
    case ErrorCode::Parse: return ST_PARSE;
  }
  return ST_INTERNAL;
}

template <class F>
st_status guard(F&& f) {
  try {
    f();
    g_last_error.clear();
    return ST_OK;
  } catch (const Error& e) {
    return fail(from_code(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(ST_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(ST_INTERNAL, e.what());
  }
}

#define ST_REQUIRE(cond)                                                 \
  do {                                                                   \
    if (!(cond)) return fail(ST_INVALID_ARGUMENT, "null or bad argument: " #cond); \
  } while (0)

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

measures::Measure to_measure(st_measure_kind m) {
  switch (m) {
    case ST_MEASURE_G: return measures::Measure::G;
    case ST_MEASURE_V: return measures::Measure::V;
    case ST_MEASURE_E: return measures::Measure::E;
  }
  throw Error(ErrorCode::InvalidArgument, "unknown measure");
}

st_measure_kind from_measure(measures::Measure m) {
  return m == measures::Measure::G ? ST_MEASURE_G : m == measures::Measure::V ? ST_MEASURE_V : ST_MEASURE_E;
}

traffic::TGIP to_tgip(const st_tgip& t) {
  traffic::TGIP g;
  g.alpha = t.alpha;
  g.mu_beta = t.mu_beta;
  g.method = t.method == ST_METHOD_BASIC ? traffic::Method::Basic : traffic::Method::Enhanced;
  g.bias = t.bias == ST_BIAS_EDGE ? traffic::Bias::Edge : traffic::Bias::Center;
  g.initial = t.initial == ST_INITIAL_LATTICE ? traffic::Initial::Lattice : traffic::Initial::Ppp;
  return g;
}

st_tgip from_tgip(const traffic::TGIP& g) {
  st_tgip t;
  t.alpha = g.alpha;
  t.mu_beta = g.mu_beta;
  t.method = g.method == traffic::Method::Basic ? ST_METHOD_BASIC : ST_METHOD_ENHANCED;
  t.bias = g.bias == traffic::Bias::Edge ? ST_BIAS_EDGE : ST_BIAS_CENTER;
  t.initial = g.initial == traffic::Initial::Lattice ? ST_INITIAL_LATTICE : ST_INITIAL_PPP;
  return t;
}

std::uint64_t seed_of(const exp::ExperimentConfig& c) {
  if (!c.seed) throw Error(ErrorCode::InvalidArgument, "a seed is required");
  return *c.seed;
}

assoc::GeometryChannel geometry(const exp::ExperimentConfig& c) {
  return assoc::GeometryChannel{c.drop.channel.carrier_ghz, 3.67};
}

st_kpi from_kpi(const netsim::KpiPoint& k) {
  st_kpi o;
  o.target_c = k.target.c;
  o.target_rho = k.target.rho;
  o.feasible = k.feasible ? 1 : 0;
  o.tgip = from_tgip(k.tgip);
  o.measured_c = k.measured_c;
  o.measured_rho = k.measured_rho;
  o.mean_rate_bps = k.mean_rate_bps;
  o.se_rate = k.se_rate;
  o.coverage_prob = k.coverage_prob;
  o.se_cov = k.se_cov;
  o.drops = k.drops;
  o.seed = k.seed;
  return o;
}

}  // namespace

extern "C" {

const char* st_version(void) { return "0.1.0"; }
const char* st_last_error(void) { return g_last_error.c_str(); }

const char* st_status_name(st_status s) {
  switch (s) {
    case ST_OK: return "ok";
    case ST_INVALID_ARGUMENT: return "invalid argument";
    case ST_DEGENERATE_INPUT: return "degenerate input";
    case ST_TOO_FEW_POINTS: return "too few points";
    case ST_EMPTY_PATTERN: return "empty pattern";
    case ST_EMPTY_ATTRACTOR_SET: return "empty attractor set";
    case ST_INDEX_OUT_OF_RANGE: return "index out of range";
    case ST_NONCONVERGENCE: return "numerical non-convergence";
    case ST_INFEASIBLE: return "infeasible";
    case ST_IO: return "i/o error";
    case ST_PARSE: return "parse error";
    case ST_INTERNAL: return "internal error";
  }
  return "unknown";
}

void st_free_string(char* s) { std::free(s); }

st_status st_config_parse(const char* json, st_config** out) {
  ST_REQUIRE(json && out);
  return guard([&] { *out = new st_config{exp::parse_config(json)}; });
}

void st_config_free(st_config* c) { delete c; }

st_status st_config_set_seed(st_config* c, uint64_t seed) {
  ST_REQUIRE(c);
  c->cfg.seed = seed;
  return ST_OK;
}

int st_config_get_seed(const st_config* c, uint64_t* seed) {
  if (!c || !c->cfg.seed) return 0;
  if (seed) *seed = *c->cfg.seed;
  return 1;
}

st_status st_config_set_drops(st_config* c, size_t drops) {
  ST_REQUIRE(c && drops > 0);
  c->cfg.drops = drops;
  return ST_OK;
}

size_t st_config_get_drops(const st_config* c) { return c ? c->cfg.drops : 0; }

st_status st_config_set_workers(st_config* c, size_t workers) {
  ST_REQUIRE(c);
  c->cfg.workers = workers;
  return ST_OK;
}

st_status st_config_set_calibration(st_config* c, size_t grid, size_t drops) {
  ST_REQUIRE(c);
  c->cfg.grid = grid;
  c->cfg.calib_drops = drops;
  return ST_OK;
}

st_status st_config_set_measure(st_config* c, st_measure_kind m) {
  ST_REQUIRE(c);
  return guard([&] { c->cfg.drop.measure = to_measure(m); });
}

st_status st_config_validate(const st_config* c) {
  ST_REQUIRE(c);
  return guard([&] { c->cfg.validate(); });
}

st_status st_config_to_json(const st_config* c, char** out) {
  ST_REQUIRE(c && out);
  return guard([&] { *out = dup_string(exp::config_to_json(c->cfg)); });
}

st_status st_config_header(const st_config* c, char** out) {
  ST_REQUIRE(c && out);
  return guard([&] { *out = dup_string(exp::header_line(c->cfg)); });
}

st_status st_pattern_create(const double* xy, size_t n, const double window[4], st_pattern** out) {
  ST_REQUIRE((xy || n == 0) && window && out);
  return guard([&] {
    const Window w(window[0], window[1], window[2], window[3]);
    std::vector<Point> pts(n);
    for (size_t i = 0; i < n; ++i) {
      pts[i] = {xy[2 * i], xy[2 * i + 1]};
      if (!w.contains(pts[i])) throw Error(ErrorCode::InvalidArgument, "point outside window");
    }
    *out = new st_pattern{PointPattern(std::move(pts), w)};
  });
}

void st_pattern_free(st_pattern* p) { delete p; }

size_t st_pattern_size(const st_pattern* p) { return p ? p->p.size() : 0; }

st_status st_pattern_points(const st_pattern* p, double* xy, size_t cap) {
  ST_REQUIRE(p && (xy || cap == 0));
  const size_t n = std::min(cap, p->p.size());
  for (size_t i = 0; i < n; ++i) {
    xy[2 * i] = p->p[i].x;
    xy[2 * i + 1] = p->p[i].y;
  }
  return ST_OK;
}

st_status st_pattern_read_csv(const char* path, st_pattern** out) {
  ST_REQUIRE(path && out);
  return guard([&] { *out = new st_pattern{exp::read_pattern_csv(path)}; });
}

st_status st_pattern_write_csv(const st_pattern* p, const char* path, const char* header) {
  ST_REQUIRE(p && path);
  return guard([&] { exp::write_pattern_csv(path, p->p, header ? header : ""); });
}

st_status st_measure(const st_pattern* p, st_measure_kind m, int exclude_boundary, st_measure_report* out) {
  ST_REQUIRE(p && out);
  return guard([&] {
    const auto r = measures::measure(p->p, to_measure(m), exclude_boundary != 0);
    out->measure = m;
    out->mean = r.stats.mean;
    out->variance = r.stats.variance;
    out->cov = r.stats.cov;
    out->normalized_cov = r.normalized_cov;
    out->n = r.stats.count;
  });
}

st_status st_measure_parse(const char* name, st_measure_kind* out) {
  ST_REQUIRE(name && out);
  return guard([&] { *out = from_measure(measures::parse_measure(name)); });
}

st_status st_layout_read_json(const char* path, const st_config* c, st_layout** out) {
  ST_REQUIRE(path && c && out);
  return guard([&] { *out = new st_layout{exp::read_layout_json(path, c->cfg.drop.layout)}; });
}

st_status st_layout_sample(const st_config* c, uint64_t drop, st_layout** out) {
  ST_REQUIRE(c && out);
  return guard([&] {
    const RandomStream master(seed_of(c->cfg), 0);
    auto lr = master.substream(drop, Substream::Layout);
    auto ar = master.substream(drop, Substream::Attractors);
    *out = new st_layout{assoc::sample_layout(c->cfg.drop.layout, lr, ar)};
  });
}

void st_layout_free(st_layout* l) { delete l; }

st_status st_layout_to_json(const st_layout* l, char** out) {
  ST_REQUIRE(l && out);
  return guard([&] { *out = dup_string(exp::layout_to_json(l->l)); });
}

st_status st_correlation(const st_layout* l, const st_config* c, const st_pattern* ues, double* rho) {
  ST_REQUIRE(l && c && ues && rho);
  return guard([&] { *rho = assoc::correlation_coefficient(l->l, ues->p, geometry(c->cfg)); });
}

void st_tgip_default(st_tgip* t) {
  if (t) *t = from_tgip(traffic::TGIP{});
}

st_status st_method_parse(const char* s, st_method* out) {
  ST_REQUIRE(s && out);
  return guard([&] { *out = traffic::parse_method(s) == traffic::Method::Basic ? ST_METHOD_BASIC : ST_METHOD_ENHANCED; });
}

st_status st_bias_parse(const char* s, st_bias* out) {
  ST_REQUIRE(s && out);
  return guard([&] { *out = traffic::parse_bias(s) == traffic::Bias::Edge ? ST_BIAS_EDGE : ST_BIAS_CENTER; });
}

st_status st_initial_parse(const char* s, st_initial* out) {
  ST_REQUIRE(s && out);
  return guard([&] { *out = traffic::parse_initial(s) == traffic::Initial::Lattice ? ST_INITIAL_LATTICE : ST_INITIAL_PPP; });
}

st_status st_generate(const st_layout* l, const st_config* c, const st_tgip* t, uint64_t drop, st_pattern** ues) {
  ST_REQUIRE(l && c && t && ues);
  return guard([&] {
    const auto g = to_tgip(*t);
    g.validate();
    const RandomStream master(seed_of(c->cfg), 0);
    auto d = traffic::generate_traffic(l->l, g, c->cfg.drop.mean_ues, master, drop, geometry(c->cfg));
    *ues = new st_pattern{std::move(d.ues)};
  });
}

st_status st_calibrate(const st_config* c, st_initial initial, st_table** out) {
  ST_REQUIRE(c && out);
  return guard([&] {
    seed_of(c->cfg);
    const auto cc = c->cfg.calibration(initial == ST_INITIAL_LATTICE ? traffic::Initial::Lattice : traffic::Initial::Ppp);
    cc.validate();
    *out = new st_table{calib::build_calibration(cc)};
  });
}

void st_table_free(st_table* t) { delete t; }

st_status st_table_read(const char* path, st_table** out) {
  ST_REQUIRE(path && out);
  return guard([&] { *out = new st_table{calib::CalibrationTable::from_json(exp::read_text(path))}; });
}

st_status st_table_write(const st_table* t, const char* path, const char* header) {
  ST_REQUIRE(t && path);
  return guard([&] {
    auto j = nlohmann::json::parse(t->t.to_json());
    if (header) j["header"] = header;
    exp::write_text(path, j.dump(1) + "\n");
  });
}

st_status st_table_dims(const st_table* t, size_t* rows, size_t* cols) {
  ST_REQUIRE(t && rows && cols);
  *rows = t->t.rows();
  *cols = t->t.cols();
  return ST_OK;
}

st_status st_table_node_at(const st_table* t, size_t i, size_t j, st_table_node* out) {
  ST_REQUIRE(t && out);
  if (i >= t->t.rows() || j >= t->t.cols()) return fail(ST_INDEX_OUT_OF_RANGE, "table node out of range");
  const size_t k = t->t.index(i, j);
  *out = {t->t.grid_alpha[i], t->t.grid_beta[j], t->t.c[k], t->t.rho[k],
          t->t.raw_c[k], t->t.raw_rho[k], t->t.se_c[k], t->t.se_rho[k]};
  return ST_OK;
}

st_status st_invert(const st_table* ppp, const st_table* lattice, double c, double rho, st_tgip* tgip,
                    double* predicted_c, double* predicted_rho) {
  ST_REQUIRE(ppp && tgip && predicted_c && predicted_rho);
  auto run = [&](const calib::InvertOptions& o) {
    return lattice ? calib::invert(ppp->t, lattice->t, c, rho, o) : calib::invert(ppp->t, c, rho, o);
  };
  const st_status s = guard([&] {
    const auto inv = run({});
    *tgip = from_tgip(inv.tgip);
    *predicted_c = inv.predicted.c;
    *predicted_rho = inv.predicted.rho;
  });
  if (s != ST_INFEASIBLE) return s;
  const std::string msg = g_last_error;
  // Same cost shape with the tolerance ellipse widened: always feasible, same minimizer.
  calib::InvertOptions wide;
  wide.c_tol *= 1e9;
  wide.rho_tol *= 1e9;
  const st_status s2 = guard([&] {
    const auto inv = run(wide);
    *tgip = from_tgip(inv.tgip);
    *predicted_c = inv.predicted.c;
    *predicted_rho = inv.predicted.rho;
  });
  if (s2 != ST_OK) return s2;
  return fail(ST_INFEASIBLE, msg);
}

st_status st_feasible_bins(const st_table* t, double bin_width, st_feasible_bin* out, size_t cap, size_t* count) {
  ST_REQUIRE(t && count && (out || cap == 0));
  return guard([&] {
    const auto region = calib::feasible(t->t, bin_width);
    *count = region.bins.size();
    for (size_t i = 0; i < std::min(cap, region.bins.size()); ++i) {
      const auto& b = region.bins[i];
      out[i] = {b.rho_lo, b.rho_hi, b.c_min, b.c_max};
    }
  });
}

st_status st_simulate(const st_config* c, const st_tgip* t, st_kpi* out) {
  ST_REQUIRE(c && t && out);
  return guard([&] {
    const auto g = to_tgip(*t);
    g.validate();
    auto k = netsim::simulate(c->cfg.drop, g, c->cfg.drops, seed_of(c->cfg), c->cfg.workers);
    *out = from_kpi(k);
    out->target_c = std::numeric_limits<double>::quiet_NaN();
    out->target_rho = std::numeric_limits<double>::quiet_NaN();
  });
}

st_status st_sweep(const st_config* c, const double* targets, size_t n, const st_table* ppp, const st_table* lattice,
                   st_kpi* out) {
  ST_REQUIRE(c && (targets || n == 0) && ppp && lattice && (out || n == 0));
  return guard([&] {
    std::vector<netsim::Target> ts(n);
    for (size_t i = 0; i < n; ++i) ts[i] = {targets[2 * i], targets[2 * i + 1]};
    const auto ks = netsim::sweep(c->cfg.drop, ts, ppp->t, lattice->t, c->cfg.drops, seed_of(c->cfg), c->cfg.workers);
    for (size_t i = 0; i < n; ++i) out[i] = from_kpi(ks[i]);
  });
}

st_status st_measure_curve(const st_config* c, double alpha, const double* betas, size_t n, st_curve_point* out) {
  ST_REQUIRE(c && (betas || n == 0) && (out || n == 0));
  return guard([&] {
    const auto pts = exp::measure_curve(c->cfg, alpha, std::vector<double>(betas, betas + n), c->cfg.drops, seed_of(c->cfg));
    for (size_t i = 0; i < n; ++i) {
      const auto& p = pts[i];
      out[i] = {p.mu_beta, p.c_g, p.c_v, p.c_e, p.cov_g, p.cov_v, p.cov_e, p.se_g, p.se_v, p.se_e};
    }
  });
}

}  // extern "C"
