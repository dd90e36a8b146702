#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "historica/experiments.hpp"

namespace historica::cli {

/// One experiment block of a config file.
struct Experiment {
  ExperimentConfig config;
  bool kind_given = false;  // "kind" key present
};

/// A parsed config file. See README.md for the grammar.
struct ConfigFile {
  std::vector<Experiment> experiments;
  std::optional<std::filesystem::path> out;
  bool svg = true;
  std::optional<unsigned> threads;
  bool single = true;  // experiment keys at top level rather than an "experiments" list
};

/// Throws ConfigError naming the offending key path.
ConfigFile parse_config(std::string_view text);
ConfigFile load_config(const std::filesystem::path& path);

// Report files. Each body ends with the provenance block.
std::string provenance_block(const Provenance& p);
std::string fractions_csv(const OccupationReport& r);
std::string cdf_csv(const OccupationReport& r, const ReferenceLaw& reference);
std::string cdf_svg(const OccupationReport& r, const ReferenceLaw& reference);
std::string birkhoff_csv(const BirkhoffReport& r);
std::string interior_csv(const InteriorReport& r);
std::string limitset_csv(const LimitSetReport& r);
std::string equidist_csv(const EquidistributionReport& r);

/// Reads cdf.csv back and returns its rows (comment lines skipped).
std::vector<CdfRow> read_cdf_csv(std::string_view text);

/// CSV body without the trailing provenance comment block.
std::string csv_body(std::string_view csv);

struct SelftestOptions {
  /// Added to 2/pi in the arcsine reference used by the checks.
  double arcsine_perturbation = 0.0;
};

struct SelftestCheck {
  std::string name;
  bool passed;
  std::string detail;
};

std::vector<SelftestCheck> run_selftest(const SelftestOptions& options = {});

enum ExitCode : int { kOk = 0, kParseError = 1, kRuntimeError = 2, kThresholdFailure = 3 };

/// Entry point of the historica executable.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace historica::cli
