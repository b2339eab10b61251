#include <cmath>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "doctest.h"
#include "spatraf/spatraf.h"

namespace {

const char* kSmall = R"({"macro_bs": 3, "pico_bs": 5, "sas": 12, "mean_ues": 250,
                         "window": {"x_min": 0, "y_min": 0, "x_max": 500, "y_max": 500}})";

st_config* small_config(uint64_t seed) {
  st_config* c = nullptr;
  REQUIRE(st_config_parse(kSmall, &c) == ST_OK);
  REQUIRE(st_config_set_seed(c, seed) == ST_OK);
  return c;
}

}  // namespace

TEST_CASE("errors are reported") {
  st_config* c = nullptr;
  CHECK(st_config_parse("{\"bogus\": 1}", &c) == ST_PARSE);
  CHECK(std::string(st_last_error()).find("bogus") != std::string::npos);
  CHECK(st_config_parse(nullptr, &c) == ST_INVALID_ARGUMENT);
  CHECK(std::string(st_status_name(ST_INFEASIBLE)) == "infeasible");
  CHECK(std::string(st_version()).size() > 0);
}

TEST_CASE("seed is mandatory for random work") {
  st_config* c = nullptr;
  REQUIRE(st_config_parse(kSmall, &c) == ST_OK);
  CHECK(st_config_get_seed(c, nullptr) == 0);
  st_layout* l = nullptr;
  CHECK(st_layout_sample(c, 0, &l) == ST_INVALID_ARGUMENT);
  st_config_free(c);
}

TEST_CASE("pattern and measure") {
  const double w[4] = {0, 0, 10, 10};
  std::vector<double> xy;
  for (int i = 0; i < 10; ++i)
    for (int j = 0; j < 10; ++j) {
      xy.push_back(0.5 + i);
      xy.push_back(0.5 + j);
    }
  st_pattern* p = nullptr;
  REQUIRE(st_pattern_create(xy.data(), 100, w, &p) == ST_OK);
  CHECK(st_pattern_size(p) == 100);
  st_measure_report r;
  REQUIRE(st_measure(p, ST_MEASURE_V, 1, &r) == ST_OK);
  CHECK(r.mean == doctest::Approx(1.0));
  CHECK(r.normalized_cov < 1e-9);
  CHECK(r.n == 64);
  st_measure_kind k;
  CHECK(st_measure_parse("E", &k) == ST_OK);
  CHECK(k == ST_MEASURE_E);

  const double out_of_window[2] = {11, 1};
  st_pattern* q = nullptr;
  CHECK(st_pattern_create(out_of_window, 1, w, &q) == ST_INVALID_ARGUMENT);
  st_pattern_free(p);
}

TEST_CASE("generate, correlate, calibrate, invert, simulate") {
  st_config* c = small_config(5);
  st_layout* l = nullptr;
  REQUIRE(st_layout_sample(c, 0, &l) == ST_OK);

  st_tgip t;
  st_tgip_default(&t);
  t.alpha = 1.0;
  t.mu_beta = 1.0;
  t.method = ST_METHOD_BASIC;
  st_pattern* u = nullptr;
  REQUIRE(st_generate(l, c, &t, 0, &u) == ST_OK);
  double rho = 0.0;
  REQUIRE(st_correlation(l, c, u, &rho) == ST_OK);
  CHECK(rho == doctest::Approx(1.0).epsilon(1e-9));
  st_pattern_free(u);

  t.alpha = 2.0;
  CHECK(st_generate(l, c, &t, 0, &u) == ST_INVALID_ARGUMENT);

  REQUIRE(st_config_set_calibration(c, 1, 30) == ST_OK);
  st_table* bad = nullptr;
  CHECK(st_calibrate(c, ST_INITIAL_PPP, &bad) == ST_INVALID_ARGUMENT);

  REQUIRE(st_config_set_calibration(c, 5, 30) == ST_OK);
  st_table* ppp = nullptr;
  st_table* lat = nullptr;
  REQUIRE(st_calibrate(c, ST_INITIAL_PPP, &ppp) == ST_OK);
  REQUIRE(st_calibrate(c, ST_INITIAL_LATTICE, &lat) == ST_OK);
  size_t rows = 0, cols = 0;
  REQUIRE(st_table_dims(ppp, &rows, &cols) == ST_OK);
  CHECK(rows == 5);
  CHECK(cols == 5);
  st_table_node n;
  REQUIRE(st_table_node_at(ppp, 4, 4, &n) == ST_OK);
  CHECK(n.alpha == 1.0);
  CHECK(st_table_node_at(ppp, 5, 0, &n) == ST_INDEX_OUT_OF_RANGE);

  const auto path = (std::filesystem::temp_directory_path() / "spatraf_c_api_table.json").string();
  REQUIRE(st_table_write(ppp, path.c_str(), "# test") == ST_OK);
  st_table* back = nullptr;
  REQUIRE(st_table_read(path.c_str(), &back) == ST_OK);
  st_table_node m;
  REQUIRE(st_table_node_at(back, 2, 3, &m) == ST_OK);
  REQUIRE(st_table_node_at(ppp, 2, 3, &n) == ST_OK);
  CHECK(m.c == n.c);
  CHECK(m.raw_rho == n.raw_rho);
  std::remove(path.c_str());

  st_tgip inv;
  double pc = 0, pr = 0;
  REQUIRE(st_invert(ppp, lat, 1.0, 0.0, &inv, &pc, &pr) == ST_OK);
  CHECK(std::abs(pc - 1.0) <= 0.02);
  CHECK(st_invert(ppp, lat, 0.5, 0.9, &inv, &pc, &pr) == ST_INFEASIBLE);
  CHECK(std::string(st_last_error()).find("nearest") != std::string::npos);
  CHECK(std::isfinite(pc));
  CHECK(inv.alpha >= 0.0);

  size_t count = 0;
  REQUIRE(st_feasible_bins(ppp, 0.1, nullptr, 0, &count) == ST_OK);
  CHECK(count > 0);
  std::vector<st_feasible_bin> bins(count);
  REQUIRE(st_feasible_bins(ppp, 0.1, bins.data(), count, &count) == ST_OK);
  for (const auto& b : bins) CHECK(b.c_min <= b.c_max);

  REQUIRE(st_config_set_drops(c, 4) == ST_OK);
  const double targets[4] = {1.0, 0.0, 0.5, 0.9};
  st_kpi k[2];
  REQUIRE(st_sweep(c, targets, 2, ppp, lat, k) == ST_OK);
  CHECK(k[0].feasible == 1);
  CHECK(k[0].mean_rate_bps > 0.0);
  CHECK(k[0].drops == 4);
  CHECK(k[1].feasible == 0);
  CHECK(std::isnan(k[1].mean_rate_bps));

  st_kpi s;
  REQUIRE(st_simulate(c, &k[0].tgip, &s) == ST_OK);
  CHECK(s.mean_rate_bps == k[0].mean_rate_bps);

  const double betas[2] = {0.0, 0.8};
  st_curve_point cp[2];
  REQUIRE(st_measure_curve(c, 0.0, betas, 2, cp) == ST_OK);
  CHECK(cp[1].c_v > cp[0].c_v);

  st_table_free(back);
  st_table_free(ppp);
  st_table_free(lat);
  st_layout_free(l);
  st_config_free(c);
}
