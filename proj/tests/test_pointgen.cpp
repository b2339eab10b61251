#include <cmath>

#include "doctest.h"
#include "spatraf/measures.hpp"
#include "spatraf/pointgen.hpp"
#include "test_support.hpp"

using namespace spatraf;
using namespace spatraf::pointgen;

TEST_CASE("generate_ppp: count dispersion") {
  const Window w = Window::square(1000);
  const double lambda = 1000.0 / w.area();
  RandomStream master(17, 0);
  const int drops = 400;
  std::vector<double> counts;
  for (int d = 0; d < drops; ++d) {
    auto rng = master.substream(d, Substream::Ues);
    const auto p = generate_ppp(lambda, w, rng);
    counts.push_back(static_cast<double>(p.size()));
    for (const Point& q : p.points()) REQUIRE(w.contains(q));
  }
  // Index of dispersion: sum (n - 1000)^2 / 1000 ~ chi^2 with `drops` dof.
  double chi2 = 0.0;
  for (double c : counts) chi2 += (c - 1000.0) * (c - 1000.0) / 1000.0;
  // 0.5% and 99.5% quantiles of chi^2(400).
  CHECK(chi2 > 330.0);
  CHECK(chi2 < 475.0);
  CHECK(std::fabs(testing::mean_of(counts) - 1000.0) < 3.0 * std::sqrt(1000.0 / drops) + 0.5);

  RandomStream bad(1, 0);
  CHECK_THROWS_AS(generate_ppp(0.0, w, bad), Error);
}

TEST_CASE("generate_ppp: reproducible") {
  const Window w = Window::square(500);
  RandomStream a(5, 3), b(5, 3), c(5, 4);
  const auto pa = generate_ppp(1e-3, w, a);
  const auto pb = generate_ppp(1e-3, w, b);
  const auto pc = generate_ppp(1e-3, w, c);
  CHECK(pa.points() == pb.points());
  CHECK(pa.points() != pc.points());
}

TEST_CASE("generate_lattice") {
  const auto four = generate_lattice(4, Window::square(1));
  REQUIRE(four.size() == 4);
  CHECK(four[0] == Point{0.25, 0.25});
  CHECK(four[1] == Point{0.75, 0.25});
  CHECK(four[2] == Point{0.25, 0.75});
  CHECK(four[3] == Point{0.75, 0.75});

  const auto trimmed = generate_lattice(10, Window(0, 0, 8, 4));
  REQUIRE(trimmed.size() == 10);
  // 4 per side: two full rows, then 2 points in the third.
  CHECK(trimmed[9] == Point{3.0, 2.5});

  CHECK_THROWS_AS(generate_lattice(3, Window::square(1)), Error);

  const auto grid = generate_lattice(1024, Window::square(1000));
  const auto areas = measures::voronoi_areas(grid, true);
  const auto s = measures::summarize(areas);
  CHECK(s.cov < 1e-9);
  CHECK(measures::normalized_cov(grid, measures::Measure::V) < 0.05);
}

TEST_CASE("perturb") {
  const Window w = Window::square(1000);
  const auto grid = generate_lattice(1024, w);
  RandomStream rng(8, 0);
  CHECK(perturb(grid, 0.0, rng).points() == grid.points());
  CHECK_THROWS_AS(perturb(grid, -1.0, rng), Error);

  // Large sigma drives the lattice toward Poisson statistics; small sigma stays sub-Poisson.
  double small = 0.0, large = 0.0;
  const int drops = 10;
  for (int d = 0; d < drops; ++d) {
    auto r1 = rng.substream(d, Substream::Ues);
    auto r2 = rng.substream(d, Substream::Beta);
    const auto a = perturb(grid, 5.0, r1);
    const auto b = perturb(grid, 3.0 * 31.25, r2);
    for (const Point& q : b.points()) REQUIRE(w.contains(q));
    small += measures::normalized_cov(a, measures::Measure::V) / drops;
    large += measures::normalized_cov(b, measures::Measure::V) / drops;
  }
  CHECK(small > 0.0);
  CHECK(small < 1.0);
  CHECK(large == doctest::Approx(1.0).epsilon(0.08));
}
