#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <doctest.h>

#include "historica/cli.hpp"
#include "historica/error.hpp"

using namespace historica;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "historica");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("historica_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

fs::path write(const fs::path& dir, const std::string& name, const std::string& text) {
  const fs::path p = dir / name;
  std::ofstream(p, std::ios::binary) << text;
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

const char* kWalk = R"({
  "name": "walk",
  "system": {"family": "t_psi", "map": "square",
             "letters": ["+", "-"], "probs": [0.5, 0.5], "psi": [1, -1]},
  "horizon": 500,
  "trials": 40,
  "seed": 3
})";

}  // namespace

TEST_CASE("config parsing") {
  const auto file = cli::parse_config(kWalk);
  REQUIRE(file.experiments.size() == 1);
  const auto& c = file.experiments[0].config;
  CHECK(c.name == "walk");
  CHECK(c.horizon == 500);
  CHECK(c.trials == 40);
  CHECK(c.seed == 3);
  CHECK(std::holds_alternative<TPsi>(c.system.family));
  CHECK(file.single);

  SUBCASE("defaults by family") {
    const auto mp = cli::parse_config(R"({"system": {"family": "manneville_pomeau", "p": 2}})");
    CHECK(std::holds_alternative<Lebesgue>(mp.experiments[0].config.x0));
    const auto line = cli::parse_config(
        R"({"system": {"family": "skew_translation", "letters": ["a"], "probs": [1], "phi": [1]}})");
    CHECK(line.experiments[0].config.reference.kind == ReferenceLaw::Kind::UniformMod);
  }
  SUBCASE("full grammar") {
    const auto f = cli::parse_config(R"({
      "out": "results", "svg": false, "threads": 3,
      "experiments": [
        {"name": "one", "kind": "birkhoff",
         "system": {"family": "fractional_linear", "letters": ["u", "d"], "probs": [0.5, 0.5],
                    "log_a": [0.6931471805599453, -0.6931471805599453], "coordinates": "direct"},
         "x0": "lebesgue", "gamma": 0.3, "side": "upper", "boundary": "open", "epsilon": 0.2,
         "checkpoints": {"n0": 64, "burn_in": 1},
         "reference": {"kind": "thaler", "alpha": 0.4, "beta": 0.6},
         "alpha_probes": [0.5], "period_compatible": false,
         "thresholds": {"low": 0.2, "high": 0.8, "spread": 0.5, "min_extreme_fraction": 0.5,
                        "min_spread_fraction": 0.5, "lambda_low": 0.1, "lambda_high": 0.9,
                        "min_coverage_fraction": 0.5, "monotone_window": 3,
                        "max_mean_interior": 0.1, "min_monotone_fraction": 0.5, "ks_max": 0.2}},
        {"name": "two",
         "system": {"family": "coupling_walk", "map": "square", "ladder": "dyadic",
                    "letters": ["-2", "1", "3"], "probs": [0.5, 0.25, 0.25],
                    "psi": [2, -1, 1], "z": [-2, 1, 3]}},
        {"name": "three",
         "system": {"family": "t_psi", "letters": ["+", "-"], "probs": [0.5, 0.5], "psi": [1, -1],
                    "map": {"fixed_points": [0, 0.5], "arcs": ["square", "logistic"],
                            "space": "circle"}}},
        {"name": "four", "system": {"family": "thaler", "c": 0.25, "p": 2}}
      ]})");
    CHECK(f.experiments.size() == 4);
    CHECK_FALSE(f.single);
    CHECK_FALSE(f.svg);
    CHECK(*f.threads == 3);
    const auto& one = f.experiments[0];
    CHECK(one.kind_given);
    CHECK(one.config.kind == ExperimentKind::Birkhoff);
    CHECK(one.config.system.coordinates == Coordinates::Direct);
    CHECK(one.config.side == Side::Upper);
    CHECK(one.config.checkpoints.n0 == 64);
    CHECK(one.config.thresholds.monotone_window == 3);
    CHECK(*one.config.thresholds.ks_max == 0.2);
    CHECK(std::get<FractionalLinear>(one.config.system.family).a[0] == doctest::Approx(2.0));
    CHECK(f.experiments[2].config.system.space == FiberSpace::Circle);
  }
}

TEST_CASE("config errors name the key") {
  const auto message = [](const std::string& text) -> std::string {
    try {
      cli::parse_config(text);
    } catch (const ConfigError& e) {
      return e.what();
    }
    return "<no error>";
  };
  CHECK(message(R"({"system": {"family": "t_psi", "map": "square", "letters": ["+", "-"],
                    "probs": [0.5, 0.4], "psi": [1, -1]}})")
            .find("system.probs") != std::string::npos);
  CHECK(message(R"({"horizon": 10, "sytem": {}})").find("sytem: unknown key") !=
        std::string::npos);
  CHECK(message(R"({"system": {"family": "thaler", "c": 0.5, "p": 2, "q": 1}})")
            .find("system.q") != std::string::npos);
  CHECK(message(R"({"system": {"family": "manneville_pomeau", "p": 2}, "horizon": -5})")
            .find("horizon") != std::string::npos);
  CHECK(message(R"({"system": {"family": "manneville_pomeau", "p": 2}, "epsilon": 0.7})")
            .find("epsilon") != std::string::npos);
  CHECK(message(R"({"system": {"family": "manneville_pomeau", "p": 0.5}})").find("system") !=
        std::string::npos);
  CHECK(message(R"({"system": {"family": "t_psi", "map": "square", "letters": ["+", "-"],
                    "probs": [0.5, 0.5], "psi": [1, -0.5]}})")
            .find("system.psi[1]") != std::string::npos);
  CHECK(message(R"({"system": {"family": "t_psi", "map": "tent", "letters": ["+", "-"],
                    "probs": [0.5, 0.5], "psi": [1, -1]}})")
            .find("system.map") != std::string::npos);
  CHECK(message(R"({"system": {"family": "t_psi", "map": "square", "letters": ["+", "-"],
                    "probs": [0.5, 0.5], "psi": [1, -1]}, "thresholds": {"ks": 0.1}})")
            .find("thresholds.ks") != std::string::npos);
  CHECK(message(R"({"experiments": [{"name": "a", "system": {"family": "thaler", "c": 0.5, "p": 2}},
                                    {"name": "a", "system": {"family": "thaler", "c": 0.5, "p": 2}}]})")
            .find("experiments[1].name") != std::string::npos);
  CHECK(message("{ not json").find("malformed") != std::string::npos);
  CHECK(message(R"({"system": {"family": "spiral"}})").find("system.family") != std::string::npos);
}

TEST_CASE("occupation command") {
  const fs::path dir = scratch("occupation");
  const fs::path cfg = write(dir, "walk.json", kWalk);
  const fs::path out = dir / "out";
  fs::create_directory(out);

  const auto r = run({"occupation", "--config", cfg.string(), "--out", out.string()});
  CHECK(r.code == cli::kOk);
  CHECK(fs::exists(out / "fractions.csv"));
  CHECK(fs::exists(out / "cdf.csv"));
  CHECK(fs::exists(out / "cdf.svg"));
  CHECK(slurp(out / "cdf.svg").rfind("<svg", 0) == 0);

  const std::string fractions = slurp(out / "fractions.csv");
  CHECK(fractions.rfind("trial,fraction\n0,", 0) == 0);
  CHECK(fractions.find("# config-hash: ") != std::string::npos);
  CHECK(fractions.find("# seed: 3\n") != std::string::npos);
  CHECK(fractions.find("# version: " + std::string(kVersion)) != std::string::npos);
  CHECK(fractions.find('\r') == std::string::npos);

  SUBCASE("cdf.csv round-trips the printed KS") {
    const auto rows = cli::read_cdf_csv(slurp(out / "cdf.csv"));
    const std::string marker = "KS distance: ";
    const auto pos = r.out.find(marker);
    REQUIRE(pos != std::string::npos);
    const double printed = std::stod(r.out.substr(pos + marker.size()));
    CHECK(std::abs(ks_statistic(rows) - printed) <= 1e-12);
  }
  SUBCASE("overrides reach the provenance block") {
    const auto o = run({"occupation", "--config", cfg.string(), "--out", out.string(), "--trials",
                        "10", "--horizon", "4096"});
    CHECK(o.code == cli::kOk);
    const std::string f = slurp(out / "fractions.csv");
    CHECK(f.find("# trials: 10\n") != std::string::npos);
    CHECK(f.find("# horizon: 4096\n") != std::string::npos);
  }
  SUBCASE("same seed, same bytes") {
    run({"occupation", "--config", cfg.string(), "--out", out.string(), "--seed", "42"});
    const std::string a = slurp(out / "fractions.csv") + slurp(out / "cdf.csv");
    run({"occupation", "--config", cfg.string(), "--out", out.string(), "--seed", "42",
         "--threads", "4"});
    const std::string b = slurp(out / "fractions.csv") + slurp(out / "cdf.csv");
    CHECK(a == b);
    CHECK(a.find("# seed: 42\n") != std::string::npos);
  }
  SUBCASE("thread count from the environment") {
    run({"occupation", "--config", cfg.string(), "--out", out.string()});
    const std::string a = slurp(out / "fractions.csv");
    ::setenv("HISTORICA_THREADS", "3", 1);
    const auto e = run({"occupation", "--config", cfg.string(), "--out", out.string()});
    CHECK(e.code == cli::kOk);
    CHECK(slurp(out / "fractions.csv") == a);
    ::setenv("HISTORICA_THREADS", "many", 1);
    CHECK(run({"occupation", "--config", cfg.string(), "--out", out.string()}).code ==
          cli::kParseError);
    ::unsetenv("HISTORICA_THREADS");
  }
}

TEST_CASE("exit codes") {
  const fs::path dir = scratch("exit_codes");
  const fs::path out = dir / "out";
  fs::create_directory(out);

  SUBCASE("probabilities that do not sum to one") {
    const fs::path cfg = write(dir, "bad.json", R"({
      "system": {"family": "t_psi", "map": "square", "letters": ["+", "-"],
                 "probs": [0.5, 0.4], "psi": [1, -1]}})");
    const auto r = run({"occupation", "--config", cfg.string(), "--out", out.string()});
    CHECK(r.code == cli::kParseError);
    CHECK(r.err.find("system.probs") != std::string::npos);
  }
  SUBCASE("forced threshold failure") {
    const fs::path cfg = write(dir, "strict.json", R"({
      "system": {"family": "t_psi", "map": "square", "letters": ["+", "-"],
                 "probs": [0.5, 0.5], "psi": [1, -1]},
      "horizon": 100, "trials": 10, "thresholds": {"ks_max": 0.0}})");
    CHECK(run({"occupation", "--config", cfg.string(), "--out", out.string()}).code ==
          cli::kThresholdFailure);
  }
  SUBCASE("missing output directory") {
    const fs::path cfg = write(dir, "walk.json", kWalk);
    const std::string missing = (dir / "nowhere").string();
    const auto r = run({"birkhoff", "--config", cfg.string(), "--out", missing, "--horizon",
                        "32768"});
    CHECK(r.code == cli::kRuntimeError);
    CHECK(r.err.find(missing) != std::string::npos);
  }
  SUBCASE("frozen walk") {
    const fs::path cfg = write(dir, "frozen.json", R"({
      "system": {"family": "t_psi", "map": "square", "letters": ["+", "-"],
                 "probs": [0.5, 0.5], "psi": [0, 0]}})");
    CHECK(run({"occupation", "--config", cfg.string(), "--out", out.string()}).code ==
          cli::kRuntimeError);
  }
  SUBCASE("command line errors") {
    CHECK(run({}).code == cli::kParseError);
    CHECK(run({"occupation"}).code == cli::kParseError);
    CHECK(run({"occupation", "--config", (dir / "absent.json").string()}).code ==
          cli::kParseError);
    CHECK(run({"--help"}).code == cli::kOk);
    CHECK(run({"--version"}).out == std::string(kVersion) + "\n");
  }
}

TEST_CASE("checkpoint commands") {
  const fs::path dir = scratch("checkpoints");
  const fs::path out = dir / "out";
  fs::create_directory(out);
  const fs::path cfg = write(dir, "all.json", R"({
    "experiments": [
      {"name": "fl", "x0": 0.5, "horizon": 8192, "trials": 4,
       "checkpoints": {"n0": 1024, "burn_in": 1},
       "system": {"family": "fractional_linear", "letters": ["u", "d"], "probs": [0.5, 0.5],
                  "a": [2, 0.5]}},
      {"name": "line", "kind": "equidist", "x0": 0, "horizon": 1000, "trials": 3,
       "system": {"family": "skew_translation", "letters": ["u", "d"], "probs": [0.5, 0.5],
                  "phi": [1, -1]}}
    ]})");
  const std::string c = cfg.string(), o = out.string();

  CHECK(run({"birkhoff", "--config", c, "--out", o}).code == cli::kOk);
  CHECK(slurp(out / "fl" / "birkhoff.csv").rfind("trial,checkpoint_n,average\n0,1024,", 0) == 0);
  CHECK(run({"interior", "--config", c, "--out", o}).code == cli::kOk);
  CHECK(slurp(out / "fl" / "interior.csv").rfind("trial,checkpoint_n,interior_fraction\n", 0) ==
        0);
  CHECK(run({"limitset", "--config", c, "--out", o}).code == cli::kOk);
  CHECK(slurp(out / "fl" / "limitset.csv").rfind("trial,checkpoint_n,lambda,rho\n", 0) == 0);
  const auto eq = run({"equidist", "--config", c, "--out", o});
  CHECK(eq.code == cli::kOk);
  CHECK(slurp(out / "line" / "equidist.csv").rfind("trial,ks\n0,", 0) == 0);
  CHECK_FALSE(fs::exists(out / "fl" / "equidist.csv"));
}

TEST_CASE("csv helpers") {
  CHECK(cli::csv_body("a,b\n1,2\n# seed: 1\n") == "a,b\n1,2\n");
  CHECK_THROWS_AS(cli::read_cdf_csv("x,y\n"), ConfigError);
  const auto rows = cli::read_cdf_csv("alpha,empirical,reference\n0.25,0.5,0.3333333333333333\n");
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].reference == 0.3333333333333333);
}

TEST_CASE("selftest command") {
  const auto a = run({"selftest"});
  CHECK(a.code == cli::kOk);
  CHECK(a.out.find("FAIL") == std::string::npos);
  CHECK(run({"selftest"}).out == a.out);

  const auto bad = run({"selftest", "--perturb-arcsine", "1e-9"});
  CHECK(bad.code == cli::kThresholdFailure);
  CHECK(bad.out.find("FAIL thaler CDF reduces to arcsine") != std::string::npos);
}
