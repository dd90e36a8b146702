#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "historica/dynamics.hpp"
#include "historica/stats.hpp"
#include "historica/stochastic.hpp"

namespace historica {

inline constexpr const char* kVersion = "0.1.0";

enum class ExperimentKind { Occupation, Birkhoff, Interior, LimitSet, Equidistribution };

std::string_view to_string(ExperimentKind kind);

/// How orbits are advanced.
///
/// Conjugate runs the additive walk behind the fiber maps when the family
/// has one (fractional-linear, T^psi, coupling walks, skew-translations) and
/// the full-precision endpoint representation for the intermittent maps.
/// Direct iterates the fiber maps themselves (fractional-linear ones on
/// endpoint distances); it exists for cross-validation.
enum class Coordinates { Conjugate, Direct };

struct SystemSpec {
  FiberFamily family;
  StepTable table = StepTable::singleton();
  FiberSpace space = FiberSpace::UnitInterval;
  Coordinates coordinates = Coordinates::Conjugate;
};

/// Builds a system whose family is read from the table's value columns.
/// Columns: "a" or "log_a" (fractional_linear), "psi" (t_psi), "psi" and
/// "z" (coupling_walk), "phi" (skew_translation).
SystemSpec make_fractional_linear(StepTable table);
SystemSpec make_t_psi(StepTable table, MorseSmaleMap map);
SystemSpec make_coupling_walk(StepTable table, LadderPoints ladder, NorthSouthMap map);
SystemSpec make_manneville_pomeau(double p);
SystemSpec make_thaler(double c, double p);
SystemSpec make_skew_translation(StepTable table);

/// Name of the value column that carries the walk behind the family, or
/// empty for the intermittent maps (no walk).
std::string walk_column(const SystemSpec& system);

/// Initial fiber point. Lebesgue draws x0 uniformly from (0,1) per trial,
/// from a sub-stream separate from the letter stream.
struct Lebesgue {};
using InitialCondition = std::variant<double, Lebesgue>;

struct ReferenceLaw {
  enum class Kind { Arcsine, Thaler, UniformMod } kind = Kind::Arcsine;
  double alpha = 0.5;   // Thaler
  double beta = 0.5;    // Thaler
  double period = 1.0;  // UniformMod

  Cdf cdf() const;
};

/// Statistical parameters and optional pass/fail gates. A gate that is not
/// set is reported but never fails a run.
struct Thresholds {
  // birkhoff
  double low = 0.1;
  double high = 0.9;
  double spread = 0.6;
  std::optional<double> min_extreme_fraction;
  std::optional<double> min_spread_fraction;
  // limitset
  double lambda_low = 0.15;
  double lambda_high = 0.85;
  std::optional<double> min_coverage_fraction;
  // interior
  std::size_t monotone_window = 4;
  std::optional<double> max_mean_interior;
  std::optional<double> min_monotone_fraction;
  // occupation, equidist
  std::optional<double> ks_max;
};

struct ExperimentConfig {
  std::string name = "experiment";
  ExperimentKind kind = ExperimentKind::Occupation;
  SystemSpec system;
  InitialCondition x0 = 0.5;
  std::uint64_t horizon = 10000;
  std::uint64_t trials = 100;
  std::uint64_t seed = 1;
  double gamma = 0.5;
  Side side = Side::Lower;
  Boundary boundary = Boundary::Closed;
  double epsilon = 0.1;
  /// Interior window for line fibers; unit-interval systems use
  /// [epsilon, 1 - epsilon].
  std::optional<std::pair<double, double>> window;
  CheckpointSchedule checkpoints;
  ReferenceLaw reference;
  std::vector<double> alpha_probes{0.1, 0.25, 0.5, 0.75, 0.9};
  /// The user asserts the period is not in the exceptional set for which
  /// the skew-translation mod period fails to be ergodic.
  bool period_compatible = true;
  Thresholds thresholds;
  /// Worker threads. Affects speed only.
  unsigned threads = 1;
};

/// Throws ConfigError / ValidationError for unusable configurations.
void validate(const ExperimentConfig& config);

/// 16 hex digits identifying every input that affects a report.
std::string config_hash(const ExperimentConfig& config);

struct Provenance {
  std::string config_hash;
  std::uint64_t seed = 0;
  std::uint64_t trials = 0;
  std::uint64_t horizon = 0;
  std::string version = kVersion;
};

struct ThresholdCheck {
  std::string name;
  double value;
  double limit;
  bool passed;
};

struct OccupationReport {
  Provenance provenance;
  std::vector<double> fractions;  // indexed by trial
  Ecdf ecdf;
  double ks = 0.0;
  std::vector<std::pair<double, double>> probes;  // (alpha, P(A_n <= alpha))
  std::vector<ThresholdCheck> checks;
};

struct BirkhoffReport {
  Provenance provenance;
  std::vector<std::vector<CheckpointRecord>> series;  // [trial][checkpoint]
  std::vector<std::pair<double, double>> extremes;    // (min, max) past burn-in
  double extreme_fraction = 0.0;  // min <= low and max >= high
  double spread_fraction = 0.0;   // max - min > spread
  std::vector<ThresholdCheck> checks;
};

struct InteriorReport {
  Provenance provenance;
  std::vector<std::vector<CheckpointRecord>> series;
  std::vector<double> final_fraction;  // at the horizon, per trial
  double mean_fraction = 0.0;
  double max_fraction = 0.0;
  std::vector<std::pair<std::uint64_t, double>> decay_curve;  // mean per checkpoint
  double monotone_fraction = 0.0;
  std::vector<ThresholdCheck> checks;
};

struct LimitSetCoverage {
  double min_lambda;
  double max_lambda;
  double largest_gap;
};

struct LimitSetReport {
  Provenance provenance;
  std::vector<std::vector<CheckpointRecord>> series;
  std::vector<LimitSetCoverage> coverage;
  double coverage_fraction = 0.0;
  std::vector<ThresholdCheck> checks;
};

struct EquidistributionReport {
  Provenance provenance;
  std::vector<double> ks;  // per trial
  double mean_ks = 0.0;
  bool ergodic_input = true;
  std::vector<ThresholdCheck> checks;
};

OccupationReport run_occupation_law(const ExperimentConfig& config);
BirkhoffReport run_birkhoff_extremes(const ExperimentConfig& config);
InteriorReport run_interior_time(const ExperimentConfig& config);
LimitSetReport run_limit_set(const ExperimentConfig& config);
EquidistributionReport run_equidistribution(const ExperimentConfig& config);

/// Orbit points f^0(x0), ..., f^{n-1}(x0) of one trial.
std::vector<double> trial_orbit(const ExperimentConfig& config, std::uint64_t trial,
                                std::uint64_t n);

/// Largest gap between consecutive sorted values.
double largest_gap(std::vector<double> values);

/// Runs fn(trial) for trial in [0, trials) on `threads` workers and returns
/// the results in trial order. The first failure by trial index is rethrown
/// with "trial N: " prefixed.
template <class Result>
std::vector<Result> run_trials(std::uint64_t trials, unsigned threads,
                               const std::function<Result(std::uint64_t)>& fn);

}  // namespace historica

#include "historica/detail/run_trials.hpp"
