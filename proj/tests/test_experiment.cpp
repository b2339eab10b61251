#include <cmath>
#include <filesystem>
#include <limits>

#include "doctest.h"
#include "spatraf/error.hpp"
#include "spatraf/experiment.hpp"
#include "test_support.hpp"

using namespace spatraf;
using namespace spatraf::exp;

namespace {

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("spatraf_test_" + name)).string();
}

}  // namespace

TEST_CASE("config defaults and overrides") {
  const auto c = parse_config("{}");
  CHECK(c.drop.layout.macro_count == 10);
  CHECK(c.drop.layout.pico_count == 20);
  CHECK(c.drop.layout.attractor_count == 50);
  CHECK(c.drop.mean_ues == 1000.0);
  CHECK(c.drops == 100);
  CHECK_FALSE(c.seed.has_value());

  const auto d = parse_config(R"({"macro_bs": 3, "seed": 7, "window": {"x_min": 0, "y_min": 0, "x_max": 500, "y_max": 400},
                                  "calibration": {"grid": 5, "drops": 30}, "measure": "E"})");
  CHECK(d.drop.layout.macro_count == 3);
  CHECK(*d.seed == 7);
  CHECK(d.drop.layout.window.x_max() == 500.0);
  CHECK(d.grid == 5);
  CHECK(d.calib_drops == 30);
  CHECK(d.drop.measure == measures::Measure::E);
}

TEST_CASE("config rejects bad input") {
  CHECK_THROWS_AS(parse_config("{"), Error);
  CHECK_THROWS_AS(parse_config(R"({"macros": 3})"), Error);
  CHECK_THROWS_AS(parse_config(R"({"macro_bs": -1})"), Error);
  CHECK_THROWS_AS(parse_config(R"({"calibration": {"grids": 5}})"), Error);
  CHECK_THROWS_AS(parse_config(R"({"measure": "Q"})"), Error);
  auto c = parse_config(R"({"macro_bs": 0, "pico_bs": 0})");
  CHECK_THROWS_AS(c.validate(), Error);
}

TEST_CASE("config round trip and hash") {
  auto c = parse_config(R"({"pico_bs": 12, "seed": 3})");
  const auto again = parse_config(config_to_json(c));
  CHECK(config_hash(again) == config_hash(c));
  CHECK(*again.seed == 3);

  auto other = c;
  other.seed = 99;
  other.workers = 4;
  CHECK(config_hash(other) == config_hash(c));
  other.drop.mean_ues = 900.0;
  CHECK(config_hash(other) != config_hash(c));

  const std::string h = header_line(c);
  CHECK(h.rfind("# config_hash=", 0) == 0);
  CHECK(h.size() == std::string("# config_hash=").size() + 16 + std::string(", seed=3").size());
}

TEST_CASE("format_double") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(-2.5) == "-2.5");
  CHECK(format_double(std::numeric_limits<double>::quiet_NaN()) == "nan");
  const double x = 0.1 + 0.2;
  CHECK(std::stod(format_double(x)) == x);
}

TEST_CASE("pattern csv round trip") {
  const Window w(-5.0, 0.0, 95.0, 50.0);
  const auto p = testing::uniform_points(200, w, 4);
  const auto path = temp_path("pattern.csv");
  write_pattern_csv(path, p, "# config_hash=0000000000000000, seed=1");
  const auto q = read_pattern_csv(path);
  REQUIRE(q.size() == p.size());
  for (std::size_t i = 0; i < p.size(); ++i) CHECK(q[i] == p[i]);
  CHECK(q.window().x_min() == -5.0);
  CHECK(q.window().y_max() == 50.0);

  write_text(path, "x,y\n1,2\n3;4\n");
  CHECK_THROWS_AS(read_pattern_csv(path), Error);
  write_text(path, "x,y\n1000,2\n");
  CHECK_THROWS_AS(read_pattern_csv(path), Error);
  std::filesystem::remove(path);
  std::filesystem::remove(window_sidecar_path(path));
  CHECK_THROWS_AS(read_pattern_csv(path), Error);
}

TEST_CASE("layout json round trip") {
  const auto path = temp_path("layout.json");
  write_text(path, R"({"window": {"x_min": 0, "y_min": 0, "x_max": 100, "y_max": 100},
                       "macros": [[10, 10]], "picos": [[50, 50], [80, 20]], "attractors": [[30, 70]]})");
  const auto l = read_layout_json(path);
  REQUIRE(l.stations().size() == 3);
  CHECK(l.stations()[0].tier == assoc::Tier::Macro);
  CHECK(l.stations()[0].tx_power_dbm == 37.0);
  CHECK(l.stations()[2].tier == assoc::Tier::Pico);
  CHECK(l.stations()[2].tx_power_dbm == 17.0);
  CHECK(l.attractors().size() == 1);

  write_text(path, layout_to_json(l));
  const auto m = read_layout_json(path);
  REQUIRE(m.stations().size() == 3);
  CHECK(m.stations()[1].position == l.stations()[1].position);
  std::filesystem::remove(path);
}

TEST_CASE("measure_curve") {
  auto c = parse_config(R"({"macro_bs": 3, "pico_bs": 5, "sas": 12, "mean_ues": 300,
                            "window": {"x_min": 0, "y_min": 0, "x_max": 500, "y_max": 500}})");
  const auto curve = measure_curve(c, 0.0, {0.0, 0.5}, 10, 11);
  REQUIRE(curve.size() == 2);
  // Poisson at mu_beta = 0.
  CHECK(std::abs(curve[0].c_v - 1.0) < 0.15);
  CHECK(curve[1].c_v > curve[0].c_v);
  CHECK(curve[0].cov_v == doctest::Approx(curve[0].c_v * measures::NormalizationConstants::cov(measures::Measure::V)).epsilon(1e-9));
  c.workers = 3;
  const auto again = measure_curve(c, 0.0, {0.0, 0.5}, 10, 11);
  CHECK(again[1].c_e == curve[1].c_e);
}
