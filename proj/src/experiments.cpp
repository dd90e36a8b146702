#include "historica/experiments.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "historica/error.hpp"
#include "historica/orbit.hpp"
#include "historica/rng.hpp"

namespace historica {

namespace detail {

void rethrow_for_trial(std::exception_ptr error, std::uint64_t trial) {
  const std::string prefix = "trial " + std::to_string(trial) + ": ";
  try {
    std::rethrow_exception(error);
  } catch (const RangeError& e) {
    throw RangeError(prefix + e.what(), e.index());
  } catch (const DomainError& e) {
    throw DomainError(prefix + e.what());
  } catch (const ValidationError& e) {
    throw ValidationError(prefix + e.what());
  } catch (const ConfigError& e) {
    throw ConfigError(prefix + e.what());
  } catch (const EmptySampleError& e) {
    throw EmptySampleError(prefix + e.what());
  } catch (const UnsupportedError& e) {
    throw UnsupportedError(prefix + e.what());
  }
}

}  // namespace detail

std::string_view to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::Occupation:
      return "occupation";
    case ExperimentKind::Birkhoff:
      return "birkhoff";
    case ExperimentKind::Interior:
      return "interior";
    case ExperimentKind::LimitSet:
      return "limitset";
    case ExperimentKind::Equidistribution:
      return "equidist";
  }
  return "?";
}

// --- systems ----------------------------------------------------------------

SystemSpec make_fractional_linear(StepTable table) {
  std::vector<double> a;
  if (table.has_values("a")) {
    a = table.values("a");
    if (!table.has_values("log_a")) {
      std::vector<double> log_a;
      for (double v : a) log_a.push_back(v > 0.0 ? std::log(v) : 0.0);
      table.set_values("log_a", std::move(log_a));
    }
  } else {
    for (double v : table.values("log_a")) a.push_back(std::exp(v));
  }
  return {FractionalLinear{std::move(a)}, std::move(table), FiberSpace::UnitInterval};
}

SystemSpec make_t_psi(StepTable table, MorseSmaleMap map) {
  const FiberSpace space = map.space();
  auto psi = table.integer_values("psi");
  return {TPsi{std::move(map), std::move(psi)}, std::move(table), space};
}

SystemSpec make_coupling_walk(StepTable table, LadderPoints ladder, NorthSouthMap map) {
  auto psi = table.integer_values("psi");
  auto z = table.integer_values("z");
  return {CouplingWalk{std::move(ladder), std::move(map), std::move(psi), std::move(z)},
          std::move(table), FiberSpace::UnitInterval};
}

SystemSpec make_manneville_pomeau(double p) {
  return {MannevillePomeau{p}, StepTable::singleton(), FiberSpace::UnitInterval};
}

SystemSpec make_thaler(double c, double p) {
  return {ThalerBranch{c, p}, StepTable::singleton(), FiberSpace::UnitInterval};
}

SystemSpec make_skew_translation(StepTable table) {
  auto phi = table.values("phi");
  return {SkewTranslation{std::move(phi)}, std::move(table), FiberSpace::RealLine};
}

std::string walk_column(const SystemSpec& system) {
  if (std::holds_alternative<FractionalLinear>(system.family)) return "log_a";
  if (std::holds_alternative<TPsi>(system.family)) return "psi";
  if (std::holds_alternative<CouplingWalk>(system.family)) return "z";
  if (std::holds_alternative<SkewTranslation>(system.family)) return "phi";
  return {};
}

Cdf ReferenceLaw::cdf() const {
  switch (kind) {
    case Kind::Arcsine:
      return [](double a) { return arcsine_cdf(std::clamp(a, 0.0, 1.0)); };
    case Kind::Thaler:
      return [a = alpha, b = beta](double x) {
        if (x <= 0.0) return 0.0;
        if (x >= 1.0) return 1.0;
        return thaler_cdf(a, b, x);
      };
    case Kind::UniformMod:
      return [](double u) { return std::clamp(u, 0.0, 1.0); };
  }
  return {};
}

// --- validation and provenance ----------------------------------------------

void validate(const ExperimentConfig& c) {
  if (c.horizon < 1) throw ConfigError("horizon must be at least 1");
  if (c.trials < 1) throw ConfigError("trials must be at least 1");
  const SystemSpec& s = c.system;
  validate(s.family, s.space);
  if (alphabet_size(s.family) != s.table.size()) {
    std::ostringstream msg;
    msg << family_name(s.family) << " is defined on " << alphabet_size(s.family)
        << " letters but the step table has " << s.table.size();
    throw ConfigError(msg.str());
  }

  const bool line = s.space == FiberSpace::RealLine;
  if (const auto* x0 = std::get_if<double>(&c.x0)) {
    const bool ok = line ? std::isfinite(*x0)
                         : (s.space == FiberSpace::Circle ? (*x0 >= 0.0 && *x0 < 1.0)
                                                          : (*x0 >= 0.0 && *x0 <= 1.0));
    if (!ok) throw ConfigError("x0 lies outside the fiber space");
  }
  if (line) {
    if (!std::isfinite(c.gamma)) throw ConfigError("gamma must be finite");
  } else if (!(c.gamma > 0.0 && c.gamma < 1.0)) {
    throw ConfigError("gamma must lie in (0,1)");
  }
  if (line) {
    if (!c.window && c.kind == ExperimentKind::Interior) {
      throw ConfigError("line fibers need an explicit interior window");
    }
    if (c.window && !(c.window->first <= c.window->second)) {
      throw ConfigError("interior window must satisfy lo <= hi");
    }
  } else if (!(c.epsilon > 0.0 && c.epsilon < 0.5)) {
    throw ConfigError("epsilon must lie in (0, 1/2)");
  }

  const ReferenceLaw& r = c.reference;
  if (r.kind == ReferenceLaw::Kind::Thaler &&
      !(r.alpha > 0.0 && r.alpha < 1.0 && r.beta > 0.0 && r.beta < 1.0)) {
    throw ConfigError("thaler reference needs alpha and beta in (0,1)");
  }
  if (r.kind == ReferenceLaw::Kind::UniformMod && !(r.period > 0.0)) {
    throw ConfigError("uniform_mod reference needs a positive period");
  }
  if (c.checkpoints.n0 < 1) throw ConfigError("checkpoint base n0 must be positive");

  if (c.kind == ExperimentKind::Equidistribution) {
    if (!std::holds_alternative<SkewTranslation>(s.family)) {
      throw ConfigError("equidistribution runs need a skew_translation system");
    }
    return;
  }
  if (c.kind == ExperimentKind::Birkhoff || c.kind == ExperimentKind::LimitSet) {
    if (c.checkpoints.times(c.horizon).size() <= c.checkpoints.burn_in) {
      throw ValidationError("no checkpoint lies past the burn-in index within the horizon");
    }
  }
  const std::string column = walk_column(s);
  if (!column.empty()) s.table.require_mean_zero(column);
}

namespace {

std::string number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void describe(std::ostream& out, const std::optional<double>& v) {
  if (v) {
    out << number(*v);
  } else {
    out << "none";
  }
}

std::string describe(const ExperimentConfig& c) {
  std::ostringstream out;
  const SystemSpec& s = c.system;
  out << "kind=" << to_string(c.kind) << ";name=" << c.name << ";family=" << family_name(s.family)
      << ";space=" << to_string(s.space)
      << ";coordinates=" << (s.coordinates == Coordinates::Direct ? "direct" : "conjugate");
  std::visit(
      [&](const auto& f) {
        using F = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<F, TPsi>) {
          out << ";fixed=";
          for (double p : f.map.fixed_points()) out << number(p) << ',';
          out << ";arcs=";
          for (std::size_t i = 0; i < f.map.arc_count(); ++i) out << f.map.arc_map(i).name() << ',';
        } else if constexpr (std::is_same_v<F, CouplingWalk>) {
          out << ";ladder=" << f.ladder.name() << ";map=" << f.map.name();
        } else if constexpr (std::is_same_v<F, MannevillePomeau>) {
          out << ";p=" << number(f.p);
        } else if constexpr (std::is_same_v<F, ThalerBranch>) {
          out << ";c=" << number(f.c) << ";p=" << number(f.p);
        }
      },
      s.family);
  out << ";letters=";
  for (std::size_t i = 0; i < s.table.size(); ++i) {
    out << s.table.letters()[i] << ':' << number(s.table.probs()[i]) << ',';
  }
  for (const char* col : {"a", "log_a", "psi", "z", "phi"}) {
    if (!s.table.has_values(col)) continue;
    out << ';' << col << '=';
    for (double v : s.table.values(col)) out << number(v) << ',';
  }
  out << ";x0=";
  if (const auto* x0 = std::get_if<double>(&c.x0)) {
    out << number(*x0);
  } else {
    out << "lebesgue";
  }
  out << ";horizon=" << c.horizon << ";trials=" << c.trials << ";seed=" << c.seed
      << ";gamma=" << number(c.gamma) << ";side=" << static_cast<int>(c.side)
      << ";boundary=" << (c.boundary == Boundary::Closed ? "closed" : "open")
      << ";epsilon=" << number(c.epsilon);
  if (c.window) out << ";window=" << number(c.window->first) << ',' << number(c.window->second);
  out << ";n0=" << c.checkpoints.n0 << ";burn_in=" << c.checkpoints.burn_in
      << ";reference=" << static_cast<int>(c.reference.kind) << ',' << number(c.reference.alpha)
      << ',' << number(c.reference.beta) << ',' << number(c.reference.period) << ";probes=";
  for (double a : c.alpha_probes) out << number(a) << ',';
  out << ";period_compatible=" << c.period_compatible;
  const Thresholds& t = c.thresholds;
  out << ";low=" << number(t.low) << ";high=" << number(t.high) << ";spread=" << number(t.spread)
      << ";lambda_low=" << number(t.lambda_low) << ";lambda_high=" << number(t.lambda_high)
      << ";monotone_window=" << t.monotone_window << ";gates=";
  for (const auto* gate : {&t.min_extreme_fraction, &t.min_spread_fraction,
                           &t.min_coverage_fraction, &t.max_mean_interior,
                           &t.min_monotone_fraction, &t.ks_max}) {
    describe(out, *gate);
    out << ',';
  }
  return out.str();
}

}  // namespace

std::string config_hash(const ExperimentConfig& config) {
  // FNV-1a, 64 bit.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : describe(config)) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace {

Provenance provenance_of(const ExperimentConfig& c) {
  return {config_hash(c), c.seed, c.trials, c.horizon, kVersion};
}

double initial_point(const ExperimentConfig& c, std::uint64_t trial) {
  if (const auto* x0 = std::get_if<double>(&c.x0)) return *x0;
  RngStream stream({c.seed, trial}, Substream::InitialCondition);
  return stream.next_open_unit();
}

// Feeds f^0(x0), ..., f^{n-1}(x0) of trial `trial` to `observe`.
template <class Observer>
void drive_orbit(const ExperimentConfig& c, std::uint64_t trial, std::uint64_t n,
                 Observer&& observe) {
  OrbitEngine orbit(c.system, initial_point(c, trial));
  RngStream rng({c.seed, trial}, Substream::Letters);
  const StepTable& table = c.system.table;
  orbit.visit([&](auto& engine) {
    for (std::uint64_t j = 0; j < n; ++j) {
      observe(engine.value());
      if (j + 1 < n) engine.step(table.sample(rng));
    }
  });
}

PartitionCounter make_partition(const ExperimentConfig& c) {
  if (c.window) return PartitionCounter(c.window->first, c.window->second);
  if (c.system.space == FiberSpace::RealLine) return PartitionCounter(-c.epsilon, c.epsilon);
  return PartitionCounter::unit_interval(c.epsilon);
}

OrbitTracker make_tracker(const ExperimentConfig& c, std::vector<std::uint64_t> checkpoints) {
  return OrbitTracker(OccupationCounter(c.gamma, c.side, c.boundary), make_partition(c),
                      std::move(checkpoints));
}

std::vector<CheckpointRecord> checkpoint_trial(const ExperimentConfig& c, std::uint64_t trial,
                                               OrbitPartition* final_partition = nullptr) {
  OrbitTracker tracker = make_tracker(c, c.checkpoints.times(c.horizon));
  drive_orbit(c, trial, c.horizon, [&](double x) { tracker.observe(x); });
  if (final_partition) *final_partition = tracker.partition();
  return tracker.records();
}

std::size_t first_counted(const ExperimentConfig& c, std::size_t records) {
  return std::min(c.checkpoints.burn_in, records);
}

ThresholdCheck at_least(std::string name, double value, double limit) {
  return {std::move(name), value, limit, value >= limit};
}

ThresholdCheck at_most(std::string name, double value, double limit) {
  return {std::move(name), value, limit, value <= limit};
}

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

}  // namespace

std::vector<double> trial_orbit(const ExperimentConfig& config, std::uint64_t trial,
                                std::uint64_t n) {
  std::vector<double> out;
  out.reserve(n);
  drive_orbit(config, trial, n, [&](double x) { out.push_back(x); });
  return out;
}

double largest_gap(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  double gap = 0.0;
  for (std::size_t i = 1; i < values.size(); ++i) gap = std::max(gap, values[i] - values[i - 1]);
  return gap;
}

OccupationReport run_occupation_law(const ExperimentConfig& c) {
  validate(c);
  OccupationReport report;
  report.provenance = provenance_of(c);
  report.fractions = run_trials<double>(c.trials, c.threads, [&](std::uint64_t trial) {
    OccupationCounter counter(c.gamma, c.side, c.boundary);
    drive_orbit(c, trial, c.horizon, [&](double x) { counter.add(x); });
    return counter.fraction();
  });
  report.ecdf = Ecdf(report.fractions);
  report.ks = ks_statistic(report.ecdf, c.reference.cdf());
  for (double alpha : c.alpha_probes) report.probes.emplace_back(alpha, report.ecdf.evaluate(alpha));
  if (c.thresholds.ks_max) report.checks.push_back(at_most("ks", report.ks, *c.thresholds.ks_max));
  return report;
}

BirkhoffReport run_birkhoff_extremes(const ExperimentConfig& c) {
  validate(c);
  BirkhoffReport report;
  report.provenance = provenance_of(c);
  report.series = run_trials<std::vector<CheckpointRecord>>(
      c.trials, c.threads, [&](std::uint64_t trial) { return checkpoint_trial(c, trial); });
  const Thresholds& t = c.thresholds;
  std::uint64_t extreme = 0, spread = 0;
  for (const auto& records : report.series) {
    const auto [lo, hi] = birkhoff_extremes({records, c.checkpoints.burn_in});
    report.extremes.emplace_back(lo, hi);
    if (lo <= t.low && hi >= t.high) ++extreme;
    if (hi - lo > t.spread) ++spread;
  }
  const double trials = static_cast<double>(c.trials);
  report.extreme_fraction = static_cast<double>(extreme) / trials;
  report.spread_fraction = static_cast<double>(spread) / trials;
  if (t.min_extreme_fraction) {
    report.checks.push_back(
        at_least("extreme_fraction", report.extreme_fraction, *t.min_extreme_fraction));
  }
  if (t.min_spread_fraction) {
    report.checks.push_back(
        at_least("spread_fraction", report.spread_fraction, *t.min_spread_fraction));
  }
  return report;
}

InteriorReport run_interior_time(const ExperimentConfig& c) {
  validate(c);
  InteriorReport report;
  report.provenance = provenance_of(c);
  struct Trial {
    std::vector<CheckpointRecord> records;
    double final_fraction;
  };
  auto trials = run_trials<Trial>(c.trials, c.threads, [&](std::uint64_t trial) {
    OrbitPartition final_partition;
    auto records = checkpoint_trial(c, trial, &final_partition);
    return Trial{std::move(records), final_partition.interior_fraction()};
  });

  const std::size_t window = c.thresholds.monotone_window;
  std::uint64_t monotone = 0;
  for (auto& trial : trials) {
    report.final_fraction.push_back(trial.final_fraction);
    const auto& r = trial.records;
    const std::size_t from = r.size() > window ? r.size() - window : 0;
    bool decays = true;
    for (std::size_t k = from + 1; k < r.size(); ++k) {
      decays = decays && r[k].interior_fraction <= r[k - 1].interior_fraction;
    }
    if (decays) ++monotone;
    report.series.push_back(std::move(trial.records));
  }
  report.mean_fraction = mean(report.final_fraction);
  report.max_fraction =
      *std::max_element(report.final_fraction.begin(), report.final_fraction.end());
  report.monotone_fraction = static_cast<double>(monotone) / static_cast<double>(c.trials);
  const auto times = c.checkpoints.times(c.horizon);
  for (std::size_t k = 0; k < times.size(); ++k) {
    double s = 0.0;
    for (const auto& r : report.series) s += r[k].interior_fraction;
    report.decay_curve.emplace_back(times[k], s / static_cast<double>(c.trials));
  }
  const Thresholds& t = c.thresholds;
  if (t.max_mean_interior) {
    report.checks.push_back(at_most("mean_interior", report.mean_fraction, *t.max_mean_interior));
  }
  if (t.min_monotone_fraction) {
    report.checks.push_back(
        at_least("monotone_fraction", report.monotone_fraction, *t.min_monotone_fraction));
  }
  return report;
}

LimitSetReport run_limit_set(const ExperimentConfig& c) {
  validate(c);
  LimitSetReport report;
  report.provenance = provenance_of(c);
  report.series = run_trials<std::vector<CheckpointRecord>>(
      c.trials, c.threads, [&](std::uint64_t trial) { return checkpoint_trial(c, trial); });
  const Thresholds& t = c.thresholds;
  std::uint64_t covered = 0;
  for (const auto& records : report.series) {
    std::vector<double> lambdas;
    for (std::size_t k = first_counted(c, records.size()); k < records.size(); ++k) {
      lambdas.push_back(records[k].lambda);
    }
    const auto [lo, hi] = std::minmax_element(lambdas.begin(), lambdas.end());
    const LimitSetCoverage cov{*lo, *hi, largest_gap(lambdas)};
    if (cov.min_lambda <= t.lambda_low && cov.max_lambda >= t.lambda_high) ++covered;
    report.coverage.push_back(cov);
  }
  report.coverage_fraction = static_cast<double>(covered) / static_cast<double>(c.trials);
  if (t.min_coverage_fraction) {
    report.checks.push_back(
        at_least("coverage_fraction", report.coverage_fraction, *t.min_coverage_fraction));
  }
  return report;
}

EquidistributionReport run_equidistribution(const ExperimentConfig& c) {
  validate(c);
  EquidistributionReport report;
  report.provenance = provenance_of(c);
  const double period = c.reference.period;
  report.ergodic_input = c.system.table.is_mean_zero("phi") && c.period_compatible;
  report.ks = run_trials<double>(c.trials, c.threads, [&](std::uint64_t trial) {
    std::vector<double> points;
    points.reserve(c.horizon);
    drive_orbit(c, trial, c.horizon, [&](double y) { points.push_back(y); });
    return uniform_mod_cdf_distance(points, period);
  });
  report.mean_ks = mean(report.ks);
  if (c.thresholds.ks_max) {
    report.checks.push_back(at_most("mean_ks", report.mean_ks, *c.thresholds.ks_max));
  }
  return report;
}

}  // namespace historica
