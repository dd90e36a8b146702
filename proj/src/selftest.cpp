#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "historica/cli.hpp"
#include "historica/rng.hpp"

namespace historica::cli {

namespace {

class Suite {
 public:
  void check(std::string name, double deviation, double tolerance) {
    std::ostringstream detail;
    detail.precision(3);
    detail << "deviation " << deviation << " (tolerance " << tolerance << ")";
    checks_.push_back({std::move(name), deviation <= tolerance, detail.str()});
  }

  std::vector<SelftestCheck> take() { return std::move(checks_); }

 private:
  std::vector<SelftestCheck> checks_;
};

std::vector<double> grid(int points) {
  std::vector<double> g;
  for (int i = 1; i <= points; ++i) g.push_back(static_cast<double>(i) / (points + 1));
  return g;
}

}  // namespace

std::vector<SelftestCheck> run_selftest(const SelftestOptions& options) {
  Suite suite;
  const double two_over_pi = 2.0 / std::numbers::pi + options.arcsine_perturbation;
  const auto arcsine = [&](double x) { return two_over_pi * std::asin(std::sqrt(x)); };

  {
    double d = 0.0;
    for (double x : grid(999)) d = std::max(d, std::abs(arcsine_cdf(x) - arcsine(x)));
    d = std::max({d, std::abs(arcsine(0.5) - 0.5), std::abs(arcsine(1.0) - 1.0)});
    suite.check("arcsine CDF closed form", d, 1e-15);
  }
  {
    double d = 0.0;
    for (double x : grid(999)) d = std::max(d, std::abs(thaler_cdf(0.5, 0.5, x) - arcsine(x)));
    suite.check("thaler CDF reduces to arcsine at alpha = beta = 1/2", d, 1e-12);
  }
  {
    double d = 0.0;
    for (double a : {0.5, 2.0, 3.7}) {
      for (double x : grid(99)) {
        d = std::max(d, std::abs(logit(apply_fractional_linear(a, x)) - (logit(x) + std::log(a))));
      }
    }
    suite.check("logit conjugates fractional-linear maps to translations", d, 1e-12);
  }
  {
    double d = 0.0;
    for (double x : grid(99)) {
      d = std::max(d, std::abs(logistic_flow(1.0, x) - NorthSouthMap::logistic().forward(x)));
      for (double s : {-2.5, 0.3, 4.0}) {
        for (double t : {-1.0, 0.7, 3.0}) {
          d = std::max(d, std::abs(logistic_flow(s, logistic_flow(t, x)) - logistic_flow(s + t, x)));
        }
      }
    }
    suite.check("logistic flow semigroup", d, 1e-12);
  }
  {
    double d = 0.0;
    for (const NorthSouthMap& m : {NorthSouthMap::square(), NorthSouthMap::logistic()}) {
      for (double u : grid(99)) d = std::max(d, std::abs(m.inverse(m.forward(u)) - u));
    }
    suite.check("north-south maps invert", d, 1e-12);
  }
  {
    const FractionalLinear fl{{2.0, 0.5}};
    const StepTable table({"up", "down"}, {0.5, 0.5});
    RngStream rng({1, 0});
    std::vector<Letter> word;
    for (int i = 0; i < 100; ++i) word.push_back(table.sample(rng));
    suite.check("conjugated orbit over 100 steps",
                conjugated_orbit_check(fl, Conjugacy::Logit, 0.3, word), 1e-7);
  }
  {
    const auto uniform = [](double u) { return u; };
    double d = std::abs(ks_statistic(Ecdf({0.5}), uniform) - 0.5);
    d = std::max(d, std::abs(ks_statistic(Ecdf({0.25, 0.75}), uniform) - 0.25));
    d = std::max(d, std::abs(ks_statistic(Ecdf({0.1, 0.1, 0.9}), uniform) - (2.0 / 3.0 - 0.1)));
    suite.check("KS statistic hand cases", d, 1e-15);
  }
  {
    double d = std::abs(apply_manneville_pomeau(2.0, 0.25) - 0.3125);
    d = std::max(d, std::abs(apply_manneville_pomeau(2.0, 0.75) - 0.6875));
    d = std::max(d, std::abs(apply_thaler_branch(0.25, 2.0, 0.125) - 0.21875));
    d = std::max(d, std::abs(apply_fractional_linear(2.0, 1.0 / 3.0) - 0.5));
    suite.check("interval map hand values", d, 1e-15);
  }
  {
    const auto law = thaler_law_parameters(MannevillePomeau{2.0});
    suite.check("Manneville-Pomeau p = 2 law parameters",
                std::max(std::abs(law.alpha - 0.5), std::abs(law.beta - 0.5)), 1e-12);
  }
  return suite.take();
}

}  // namespace historica::cli
