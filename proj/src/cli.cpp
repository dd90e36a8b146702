#include "historica/cli.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <ostream>

#include <CLI11.hpp>

#include "historica/error.hpp"

namespace historica::cli {

namespace {

namespace fs = std::filesystem;

struct Overrides {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> trials;
  std::optional<std::uint64_t> horizon;
  std::optional<unsigned> threads;
};

// Failures that map to exit code 2 but are not library errors.
struct RuntimeFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw RuntimeFailure("cannot write " + path.string());
  f << content;
  if (!f.flush()) throw RuntimeFailure("cannot write " + path.string());
}

unsigned thread_count(const Overrides& o, const ConfigFile& file) {
  if (o.threads) return *o.threads;
  if (const char* env = std::getenv("HISTORICA_THREADS"); env && *env) {
    char* end = nullptr;
    const unsigned long v = std::strtoul(env, &end, 10);
    if (*end != '\0' || v < 1 || v > 4096) {
      throw ConfigError(std::string("HISTORICA_THREADS: '") + env + "' is not a thread count");
    }
    return static_cast<unsigned>(v);
  }
  return file.threads.value_or(1);
}

std::string num(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

bool report_checks(const std::vector<ThresholdCheck>& checks, std::ostream& out) {
  bool ok = true;
  for (const auto& c : checks) {
    out << "  check " << c.name << " = " << num(c.value) << " (limit " << num(c.limit) << "): "
        << (c.passed ? "ok" : "FAILED") << '\n';
    ok = ok && c.passed;
  }
  return ok;
}

// Runs one experiment, writes its files into `dir`, returns false when a
// configured threshold failed.
bool execute(const ExperimentConfig& c, const fs::path& dir, bool svg, std::ostream& out) {
  out << to_string(c.kind) << " '" << c.name << "': trials=" << c.trials
      << " horizon=" << c.horizon << " seed=" << c.seed << '\n';
  switch (c.kind) {
    case ExperimentKind::Occupation: {
      const auto r = run_occupation_law(c);
      write_file(dir / "fractions.csv", fractions_csv(r));
      write_file(dir / "cdf.csv", cdf_csv(r, c.reference));
      if (svg) write_file(dir / "cdf.svg", cdf_svg(r, c.reference));
      out << "  KS distance: " << num(r.ks) << '\n';
      for (const auto& [alpha, p] : r.probes) {
        out << "  P(A_n <= " << alpha << ") = " << p << '\n';
      }
      return report_checks(r.checks, out);
    }
    case ExperimentKind::Birkhoff: {
      const auto r = run_birkhoff_extremes(c);
      write_file(dir / "birkhoff.csv", birkhoff_csv(r));
      out << "  extreme fraction: " << r.extreme_fraction << '\n'
          << "  spread fraction: " << r.spread_fraction << '\n';
      return report_checks(r.checks, out);
    }
    case ExperimentKind::Interior: {
      const auto r = run_interior_time(c);
      write_file(dir / "interior.csv", interior_csv(r));
      out << "  mean interior fraction: " << r.mean_fraction << '\n'
          << "  max interior fraction: " << r.max_fraction << '\n'
          << "  monotone fraction: " << r.monotone_fraction << '\n';
      for (const auto& [n, f] : r.decay_curve) out << "  n=" << n << " mean=" << f << '\n';
      return report_checks(r.checks, out);
    }
    case ExperimentKind::LimitSet: {
      const auto r = run_limit_set(c);
      write_file(dir / "limitset.csv", limitset_csv(r));
      out << "  coverage fraction: " << r.coverage_fraction << '\n';
      return report_checks(r.checks, out);
    }
    case ExperimentKind::Equidistribution: {
      const auto r = run_equidistribution(c);
      write_file(dir / "equidist.csv", equidist_csv(r));
      out << "  mean KS: " << num(r.mean_ks) << '\n';
      if (!r.ergodic_input) {
        out << "  warning: step table is not mean zero or the period is not flagged compatible;"
               " equidistribution is not expected\n";
      }
      return report_checks(r.checks, out);
    }
  }
  return true;
}

int run_experiments(ExperimentKind kind, const Overrides& o, std::ostream& out,
                    std::ostream& err) {
  ConfigFile file;
  unsigned threads = 1;
  try {
    file = load_config(o.config);
    threads = thread_count(o, file);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kParseError;
  }

  std::vector<ExperimentConfig> selected;
  for (const auto& e : file.experiments) {
    if (e.kind_given && e.config.kind != kind) continue;
    // Equidistribution is only defined on the line.
    if (!e.kind_given && kind == ExperimentKind::Equidistribution &&
        !std::holds_alternative<SkewTranslation>(e.config.system.family)) {
      continue;
    }
    ExperimentConfig c = e.config;
    c.kind = kind;
    if (o.seed) c.seed = *o.seed;
    if (o.trials) c.trials = *o.trials;
    if (o.horizon) c.horizon = *o.horizon;
    c.threads = threads;
    selected.push_back(std::move(c));
  }
  if (selected.empty()) {
    err << "error: " << o.config << ": no experiment of kind '" << to_string(kind) << "'\n";
    return kParseError;
  }

  fs::path dir;
  if (!o.out.empty()) {
    dir = o.out;
  } else if (file.out) {
    dir = *file.out;
  } else {
    err << "error: no output directory: pass --out or set \"out\" in the config\n";
    return kParseError;
  }

  try {
    for (const auto& c : selected) validate(c);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kParseError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kRuntimeError;
  }

  if (!fs::is_directory(dir)) {
    err << "error: output directory " << dir << " does not exist\n";
    return kRuntimeError;
  }

  bool passed = true;
  try {
    for (const auto& c : selected) {
      fs::path target = dir;
      if (!file.single) {
        target /= c.name;
        fs::create_directory(target);
      }
      passed = execute(c, target, file.svg, out) && passed;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kRuntimeError;
  }
  if (!passed) {
    err << "threshold check failed\n";
    return kThresholdFailure;
  }
  return kOk;
}

int selftest(const SelftestOptions& options, std::ostream& out, std::ostream& err) {
  bool ok = true;
  for (const auto& c : run_selftest(options)) {
    out << (c.passed ? "ok   " : "FAIL ") << c.name << ": " << c.detail << '\n';
    ok = ok && c.passed;
  }
  if (!ok) {
    err << "selftest failed\n";
    return kThresholdFailure;
  }
  return kOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Monte Carlo experiments on skew products with one-dimensional fibers",
               "historica"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  Overrides o;
  const std::pair<const char*, ExperimentKind> kinds[] = {
      {"occupation", ExperimentKind::Occupation},
      {"birkhoff", ExperimentKind::Birkhoff},
      {"interior", ExperimentKind::Interior},
      {"limitset", ExperimentKind::LimitSet},
      {"equidist", ExperimentKind::Equidistribution},
  };
  const char* descriptions[] = {
      "occupation-time law: fractions.csv, cdf.csv, cdf.svg",
      "checkpoint Birkhoff averages: birkhoff.csv",
      "interior occupation time: interior.csv",
      "endpoint masses at checkpoints: limitset.csv",
      "equidistribution mod L of skew-translations: equidist.csv",
  };
  std::vector<CLI::App*> runners;
  for (std::size_t i = 0; i < std::size(kinds); ++i) {
    CLI::App* sub = app.add_subcommand(kinds[i].first, descriptions[i]);
    sub->add_option("--config", o.config, "experiment file (JSON)")->required();
    sub->add_option("--out", o.out, "existing output directory");
    sub->add_option("--seed", o.seed, "master seed");
    sub->add_option("--trials", o.trials, "number of trials")->check(CLI::PositiveNumber);
    sub->add_option("--horizon", o.horizon, "orbit length n")->check(CLI::PositiveNumber);
    sub->add_option("--threads", o.threads, "worker threads (speed only)")
        ->check(CLI::Range(1u, 4096u));
    runners.push_back(sub);
  }
  SelftestOptions selftest_options;
  CLI::App* self = app.add_subcommand("selftest", "closed-form invariant checks");
  self->add_option("--perturb-arcsine", selftest_options.arcsine_perturbation)
      ->group("");  // test hook

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << '\n';
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kParseError;
  }

  if (self->parsed()) return selftest(selftest_options, out, err);
  for (std::size_t i = 0; i < runners.size(); ++i) {
    if (runners[i]->parsed()) return run_experiments(kinds[i].second, o, out, err);
  }
  return kParseError;
}

}  // namespace historica::cli
