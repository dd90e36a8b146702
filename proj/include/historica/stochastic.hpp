#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "historica/dynamics.hpp"
#include "historica/rng.hpp"

namespace historica {

/// Finite alphabet with a probability per letter and named per-letter value
/// columns ("psi", "z", "a", "log_a", "phi", ...).
///
/// Letters are sampled by inverse CDF over the declared order, so the order
/// is part of the experiment definition.
class StepTable {
 public:
  static constexpr double kProbabilityTolerance = 1e-12;
  static constexpr double kMeanTolerance = 1e-12;

  /// Throws ConfigError unless every probability is > 0 and they sum to 1
  /// within kProbabilityTolerance.
  StepTable(std::vector<std::string> letters, std::vector<double> probs);

  /// Single letter with probability one.
  static StepTable singleton(std::string letter = "*");

  void set_values(std::string name, std::vector<double> values);
  bool has_values(std::string_view name) const;
  /// Throws ConfigError when the column is missing.
  const std::vector<double>& values(std::string_view name) const;
  /// Column as integers; throws ConfigError if any entry is not integral.
  std::vector<std::int64_t> integer_values(std::string_view name) const;

  std::size_t size() const { return letters_.size(); }
  const std::vector<std::string>& letters() const { return letters_; }
  const std::vector<double>& probs() const { return probs_; }
  std::optional<Letter> find(std::string_view letter) const;

  double mean(std::string_view column) const;
  double second_moment(std::string_view column) const;
  /// ValidationError unless |E v| <= kMeanTolerance and E v^2 > 0.
  void require_mean_zero(std::string_view column) const;
  bool is_mean_zero(std::string_view column) const;

  /// Inverse CDF: the first letter whose cumulative probability exceeds u.
  Letter letter_for(double u) const;
  Letter sample(RngStream& rng) const {
    return letters_.size() == 1 ? Letter{0} : letter_for(rng.next_unit());
  }

 private:
  std::vector<std::string> letters_;
  std::vector<double> probs_;
  std::vector<double> cumulative_;
  std::map<std::string, std::vector<double>, std::less<>> columns_;
};

/// Position and step count of a random walk S_n = S_{n-1} + Y_n.
template <class T>
struct WalkState {
  T position{};
  std::uint64_t step_count = 0;

  friend bool operator==(const WalkState&, const WalkState&) = default;
};

template <class T>
constexpr WalkState<T> walk_advance(WalkState<T> state, T value) {
  return {state.position + value, state.step_count + 1};
}

/// h(x) = log(x / (1 - x)); DomainError outside (0,1).
double logit(double x);
/// Inverse of logit.
double sigmoid(double t);

/// Change of coordinates that turns a fiber family into an additive walk.
enum class Conjugacy {
  Logit,       // fractional-linear maps, T^psi over the logistic map
  OrbitIndex,  // T^psi over any north-south map: h(T^t(x0)) = t
  Identity,    // skew-translations
};

/// Max over n <= letters.size() of |h(f^n(x0)) - (h(x0) + S_n)|, where the
/// left side iterates the fiber maps directly and S_n sums the conjugated
/// step values. UnsupportedError when the family has no such conjugacy.
double conjugated_orbit_check(const FiberFamily& family, Conjugacy conjugacy, double x0,
                              std::span<const Letter> letters);

}  // namespace historica
