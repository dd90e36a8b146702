#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include <doctest.h>

#include "historica/error.hpp"
#include "historica/rng.hpp"
#include "historica/stats.hpp"

using namespace historica;

namespace {

const Cdf kUniform = [](double u) { return u; };

}  // namespace

TEST_CASE("occupation counters") {
  CHECK(occupation_update(OccupationCounter(0.5, Side::Lower), 0.5).hits() == 1);
  CHECK(occupation_update(OccupationCounter(0.5, Side::Lower, Boundary::Open), 0.5).hits() == 0);
  CHECK(occupation_update(OccupationCounter(0.5, Side::Upper), 0.5).hits() == 1);

  OccupationCounter c(0.5, Side::Lower);
  for (double x : {0.1, 0.9, 0.2}) c = occupation_update(c, x);
  CHECK(c.fraction() == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(c.steps() == 3);
  CHECK(OccupationCounter(0.5, Side::Lower).fraction() == 0.0);
  CHECK_THROWS_AS(OccupationCounter(NAN, Side::Lower), DomainError);

  SUBCASE("closed dominates open, and the sides complement") {
    RngStream rng({3, 0});
    for (double gamma : {0.25, 0.5, 0.75}) {
      OccupationCounter closed(gamma, Side::Lower), open(gamma, Side::Lower, Boundary::Open);
      OccupationCounter upper_open(gamma, Side::Upper, Boundary::Open);
      for (int i = 0; i < 5000; ++i) {
        // Quantize so that x == gamma occurs.
        const double x = std::floor(rng.next_unit() * 8.0) / 8.0;
        closed.add(x);
        open.add(x);
        upper_open.add(x);
      }
      CHECK(closed.fraction() >= open.fraction());
      CHECK(closed.hits() + upper_open.hits() == closed.steps());
    }
  }
}

TEST_CASE("empirical CDF") {
  const Ecdf e({0.3, 0.1, 0.2, 0.2});
  CHECK(e.samples() == std::vector<double>{0.1, 0.2, 0.2, 0.3});
  CHECK(e.evaluate(0.0) == 0.0);
  CHECK(e.evaluate(0.1) == 0.25);
  CHECK(e.evaluate(0.2) == 0.75);
  CHECK(e.evaluate(0.25) == 0.75);
  CHECK(e.evaluate(0.3) == 1.0);
  const auto rows = cdf_table(e, kUniform);
  REQUIRE(rows.size() == 3);
  CHECK(rows[1].value == 0.2);
  CHECK(rows[1].empirical == 0.75);
}

TEST_CASE("arcsine CDF") {
  CHECK(arcsine_cdf(0.0) == 0.0);
  CHECK(arcsine_cdf(1.0) == 1.0);
  CHECK(arcsine_cdf(0.5) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(arcsine_cdf(0.25) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK_THROWS_AS(arcsine_cdf(-0.01), DomainError);
  CHECK_THROWS_AS(arcsine_cdf(1.01), DomainError);
}

TEST_CASE("Thaler CDF") {
  for (int i = 1; i <= 99; ++i) {
    const double x = i / 100.0;
    CHECK(std::abs(thaler_cdf(0.5, 0.5, x) - arcsine_cdf(x)) <= 1e-12);
  }
  CHECK(thaler_cdf(0.5, 0.5, 0.5) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(thaler_cdf(1.0 / 3.0, 0.7, 0.2) < thaler_cdf(1.0 / 3.0, 0.7, 0.8));

  // Independent oracle: the Lamperti density integrated in 30-digit arithmetic.
  CHECK(thaler_cdf(1.0 / 3.0, 0.7, 0.2) == doctest::Approx(0.194004862030202796).epsilon(1e-13));
  CHECK(thaler_cdf(1.0 / 3.0, 0.7, 0.8) == doctest::Approx(0.395526738942332156).epsilon(1e-13));
  CHECK(thaler_cdf(0.8, 0.3, 0.2) == doctest::Approx(0.348433601801990645).epsilon(1e-13));
  CHECK(thaler_cdf(0.8, 0.3, 0.8) == doctest::Approx(0.962774999794828002).epsilon(1e-13));

  for (double a : {0.2, 0.5, 0.9}) {
    for (double b : {0.1, 0.5, 0.95}) {
      CHECK(thaler_cdf(a, b, 1e-300) < 1e-9);
      // Reflection x -> 1 - x swaps the roles of the two endpoints.
      for (double x : {0.01, 0.3, 0.5, 0.77}) {
        CHECK(thaler_cdf(a, b, x) + thaler_cdf(a, 1.0 - b, 1.0 - x) ==
              doctest::Approx(1.0).epsilon(1e-12));
      }
      double prev = 0.0;
      for (int i = 1; i <= 999; ++i) {
        const double g = thaler_cdf(a, b, i / 1000.0);
        CHECK(g >= prev);
        prev = g;
      }
    }
  }
  CHECK_THROWS_AS(thaler_cdf(0.0, 0.5, 0.5), DomainError);
  CHECK_THROWS_AS(thaler_cdf(1.0, 0.5, 0.5), DomainError);
  CHECK_THROWS_AS(thaler_cdf(0.5, 1.0, 0.5), DomainError);
  CHECK_THROWS_AS(thaler_cdf(0.5, 0.5, 0.0), DomainError);
}

TEST_CASE("exact KS statistic") {
  CHECK(ks_statistic(Ecdf({0.5}), kUniform) == 0.5);
  CHECK(ks_statistic(Ecdf({0.0, 1.0}), kUniform) == 0.5);
  CHECK_THROWS_AS(ks_statistic(Ecdf(), kUniform), EmptySampleError);

  SUBCASE("quantile samples") {
    const Cdf arcsine = arcsine_cdf;
    const int n = 1000;
    std::vector<double> q;
    for (int i = 1; i <= n; ++i) {
      const double s = std::sin(std::numbers::pi / 2.0 * (i - 0.5) / n);
      q.push_back(s * s);
    }
    CHECK(ks_statistic(Ecdf(q), arcsine) <= 1.0 / (2.0 * n) + 1e-12);
    CHECK(ks_statistic(Ecdf(q), arcsine) <= 1.0 / n);
  }
  SUBCASE("oracle: brute force over both one-sided gaps") {
    RngStream rng({11, 0});
    std::vector<double> s;
    for (int i = 0; i < 257; ++i) s.push_back(std::round(rng.next_unit() * 64.0) / 64.0);
    std::sort(s.begin(), s.end());
    double d = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
      const double le = static_cast<double>(std::upper_bound(s.begin(), s.end(), s[i]) - s.begin());
      const double lt = static_cast<double>(std::lower_bound(s.begin(), s.end(), s[i]) - s.begin());
      d = std::max({d, std::abs(le / s.size() - s[i]), std::abs(lt / s.size() - s[i])});
    }
    CHECK(ks_statistic(Ecdf(s), kUniform) == d);
  }
}

TEST_CASE("two-sample ECDF distance") {
  CHECK(ecdf_distance(Ecdf({0.1, 0.2}), Ecdf({0.1, 0.2})) == 0.0);
  CHECK(ecdf_distance(Ecdf({0.1}), Ecdf({0.9})) == 1.0);
  CHECK(ecdf_distance(Ecdf({0.1, 0.5}), Ecdf({0.5})) == 0.5);
  CHECK_THROWS_AS(ecdf_distance(Ecdf(), Ecdf({0.1})), EmptySampleError);
}

TEST_CASE("uniform mod L distance") {
  for (double L : {1.0, 2.5}) {
    const int n = 400;
    std::vector<double> s;
    for (int k = 0; k < n; ++k) s.push_back(k * L / n + L / (2 * n) + 3 * L);
    CHECK(uniform_mod_cdf_distance(s, L) <= 1.0 / (2 * n) + 1e-12);
    CHECK(uniform_mod_cdf_distance(std::vector<double>{0.0, L / 2}, L) == 0.5);
  }
  // All samples equal: one jump of height 1.
  const std::vector<double> same(1000, 7.0);
  CHECK(uniform_mod_cdf_distance(same, 1.0) >= 1.0 - 1.0 / 1000);
  // Single sample y: max(u, 1 - u) with u = (y mod L) / L.
  CHECK(uniform_mod_cdf_distance(std::vector<double>{-0.25}, 1.0) == 0.75);
  CHECK(uniform_mod_cdf_distance(std::vector<double>{1.3}, 2.0) == doctest::Approx(0.65));
  CHECK_THROWS_AS(uniform_mod_cdf_distance(std::vector<double>{}, 1.0), EmptySampleError);
  CHECK_THROWS_AS(uniform_mod_cdf_distance(std::vector<double>{0.1}, 0.0), DomainError);
}

TEST_CASE("checkpoint schedule and Birkhoff extremes") {
  CHECK(CheckpointSchedule{}.times(1 << 24).size() == 15);
  CHECK(CheckpointSchedule{}.times(1 << 24).front() == 1024);
  CHECK(CheckpointSchedule{}.times(1 << 24).back() == (1u << 24));
  CHECK(CheckpointSchedule{}.times(1000).empty());
  CHECK(CheckpointSchedule{2, 0}.times(4) == std::vector<std::uint64_t>{2, 4});

  const auto series = [](double value) {
    CheckpointSeries s{{}, 0};
    for (std::uint64_t n : {2, 4, 8}) s.records.push_back({n, value, 0, 0, 0});
    return s;
  };
  CHECK(birkhoff_extremes(series(0.0)) == std::pair{0.0, 0.0});
  CHECK(birkhoff_extremes(series(1.0)) == std::pair{1.0, 1.0});

  // Orbit 0,1,0,1,... with checkpoints n = 2, 4.
  const std::vector<double> orbit{0, 1, 0, 1};
  CheckpointSeries alt{{}, 0};
  double sum = 0.0;
  for (std::size_t j = 0; j < orbit.size(); ++j) {
    sum += orbit[j];
    const std::uint64_t n = j + 1;
    if (n == 2 || n == 4) alt.records.push_back({n, sum / n, 0, 0, 0});
  }
  CHECK(birkhoff_extremes(alt) == std::pair{0.5, 0.5});

  CheckpointSeries burned = series(0.3);
  burned.burn_in = 3;
  CHECK_THROWS_AS(birkhoff_extremes(burned), EmptySampleError);
  burned.records[2].birkhoff_average = 0.9;
  burned.burn_in = 2;
  CHECK(birkhoff_extremes(burned) == std::pair{0.9, 0.9});
}

TEST_CASE("interior fraction and endpoint masses") {
  const std::vector<double> zeros(10, 0.0);
  CHECK(interior_fraction(zeros, 0.1) == 0.0);
  CHECK(interior_fraction(std::vector<double>{0.05, 0.5, 0.95, 0.5}, 0.1) == 0.5);
  CHECK(interior_fraction(std::vector<double>{0.05, 0.5, 0.95, 0.5}, 0.1, 2) == 0.5);
  CHECK(interior_fraction(std::vector<double>{0.5}, std::nextafter(0.5, 0.0)) == 1.0);
  CHECK_THROWS_AS(interior_fraction(zeros, 0.0), DomainError);
  CHECK_THROWS_AS(interior_fraction(zeros, 0.5), DomainError);

  const auto m = endpoint_masses(std::vector<double>{0, 0, 1, 1}, 0.1);
  CHECK(m.lambda == 0.5);
  CHECK(m.rho == 0.5);
  CHECK(endpoint_masses(zeros, 0.1).lambda == 1.0);
  CHECK(endpoint_masses(zeros, 0.1).rho == 0.0);
  const std::vector<double> half(5, 0.5);
  CHECK(endpoint_masses(half, 0.1).lambda == 0.0);
  CHECK(endpoint_masses(half, 0.1).rho == 0.0);

  SUBCASE("window boundaries belong to the interior") {
    const auto p = orbit_partition(std::vector<double>{0.25, 0.75}, 0.25);
    CHECK(p.interior == 2);
  }
}

TEST_CASE("partition identity on fuzzed orbits") {
  RngStream rng({17, 0});
  for (int trial = 0; trial < 2000; ++trial) {
    const double eps = 0.001 + 0.498 * rng.next_unit();
    std::vector<double> orbit(1 + rng.next_u64() % 64);
    for (double& x : orbit) {
      const auto kind = rng.next_u64() % 4;
      x = kind == 0 ? 0.0 : kind == 1 ? 1.0 : kind == 2 ? eps : rng.next_unit();
    }
    const auto p = orbit_partition(orbit, eps);
    CHECK(p.n() == orbit.size());
    const auto m = endpoint_masses(orbit, eps);
    CHECK(p.below + p.interior + p.above == orbit.size());
    CHECK(std::abs(m.lambda + interior_fraction(orbit, eps) + m.rho - 1.0) <= 4e-16);
  }
}
