#include "historica/stochastic.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "historica/error.hpp"

namespace historica {

StepTable::StepTable(std::vector<std::string> letters, std::vector<double> probs)
    : letters_(std::move(letters)), probs_(std::move(probs)) {
  if (letters_.empty()) throw ConfigError("step table needs at least one letter");
  if (letters_.size() != probs_.size()) {
    std::ostringstream msg;
    msg << "step table lists " << letters_.size() << " letters but " << probs_.size()
        << " probabilities";
    throw ConfigError(msg.str());
  }
  for (std::size_t i = 0; i < letters_.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (letters_[i] == letters_[j]) throw ConfigError("duplicate letter '" + letters_[i] + "'");
    }
  }
  double total = 0.0;
  for (std::size_t i = 0; i < probs_.size(); ++i) {
    if (!(probs_[i] > 0.0) || !std::isfinite(probs_[i])) {
      std::ostringstream msg;
      msg << "probability of letter '" << letters_[i] << "' is " << probs_[i]
          << "; every letter needs positive probability";
      throw ConfigError(msg.str());
    }
    total += probs_[i];
    cumulative_.push_back(total);
  }
  if (std::abs(total - 1.0) > kProbabilityTolerance) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "probabilities sum to " << total << ", not 1";
    throw ConfigError(msg.str());
  }
  // The last letter absorbs the rounding slack of the cumulative sum.
  cumulative_.back() = 1.0;
}

StepTable StepTable::singleton(std::string letter) {
  return StepTable({std::move(letter)}, {1.0});
}

void StepTable::set_values(std::string name, std::vector<double> values) {
  if (values.size() != letters_.size()) {
    std::ostringstream msg;
    msg << "value column '" << name << "' has " << values.size() << " entries for "
        << letters_.size() << " letters";
    throw ConfigError(msg.str());
  }
  for (double v : values) {
    if (!std::isfinite(v)) throw ConfigError("value column '" + name + "' has a non-finite entry");
  }
  columns_[std::move(name)] = std::move(values);
}

bool StepTable::has_values(std::string_view name) const { return columns_.contains(name); }

const std::vector<double>& StepTable::values(std::string_view name) const {
  const auto it = columns_.find(name);
  if (it == columns_.end()) {
    throw ConfigError("step table has no value column '" + std::string(name) + "'");
  }
  return it->second;
}

std::vector<std::int64_t> StepTable::integer_values(std::string_view name) const {
  const auto& column = values(name);
  std::vector<std::int64_t> out;
  out.reserve(column.size());
  for (double v : column) {
    if (v != std::floor(v) || std::abs(v) > 9.0e15) {
      std::ostringstream msg;
      msg << "value column '" << name << "' must hold integers, found " << v;
      throw ConfigError(msg.str());
    }
    out.push_back(static_cast<std::int64_t>(v));
  }
  return out;
}

std::optional<Letter> StepTable::find(std::string_view letter) const {
  const auto it = std::find(letters_.begin(), letters_.end(), letter);
  if (it == letters_.end()) return std::nullopt;
  return Letter{static_cast<std::size_t>(it - letters_.begin())};
}

double StepTable::mean(std::string_view column) const {
  const auto& v = values(column);
  double sum = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) sum += probs_[i] * v[i];
  return sum;
}

double StepTable::second_moment(std::string_view column) const {
  const auto& v = values(column);
  double sum = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) sum += probs_[i] * v[i] * v[i];
  return sum;
}

bool StepTable::is_mean_zero(std::string_view column) const {
  return std::abs(mean(column)) <= kMeanTolerance && second_moment(column) > 0.0;
}

void StepTable::require_mean_zero(std::string_view column) const {
  const double m = mean(column);
  const double m2 = second_moment(column);
  if (!(m2 > 0.0)) {
    throw ValidationError("step column '" + std::string(column) +
                          "' is identically zero: the walk is frozen");
  }
  if (std::abs(m) > kMeanTolerance) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "step column '" << column << "' has mean " << m << "; a mean-zero walk is required";
    throw ValidationError(msg.str());
  }
}

Letter StepTable::letter_for(double u) const {
  std::size_t i = 0;
  while (i + 1 < cumulative_.size() && !(u < cumulative_[i])) ++i;
  return Letter{i};
}

double logit(double x) {
  if (!(x > 0.0 && x < 1.0)) {
    std::ostringstream msg;
    msg << "logit: x = " << x << " outside (0,1)";
    throw DomainError(msg.str());
  }
  return std::log(x) - std::log1p(-x);
}

double sigmoid(double t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

namespace {

// T^t(x0) for t in [lo, hi], built by repeated single steps of the map.
class OrbitTable {
 public:
  OrbitTable(const MorseSmaleMap& map, double x0, std::int64_t lo, std::int64_t hi) : lo_(lo) {
    std::vector<double> forward{x0};
    for (std::int64_t t = 1; t <= hi; ++t) forward.push_back(map.power(1, forward.back()));
    std::vector<double> backward;
    double x = x0;
    for (std::int64_t t = -1; t >= lo; --t) backward.push_back(x = map.power(-1, x));
    points_.assign(backward.rbegin(), backward.rend());
    points_.insert(points_.end(), forward.begin(), forward.end());
  }

  // The t whose orbit point is nearest to x; ties go to the smallest |t|.
  std::int64_t index_of(double x) const {
    std::int64_t best = 0;
    double best_gap = std::abs(at(0) - x);
    for (std::size_t i = 0; i < points_.size(); ++i) {
      const std::int64_t t = static_cast<std::int64_t>(i) + lo_;
      const double gap = std::abs(points_[i] - x);
      if (gap < best_gap || (gap == best_gap && std::abs(t) < std::abs(best))) {
        best = t;
        best_gap = gap;
      }
    }
    return best;
  }

 private:
  double at(std::int64_t t) const { return points_[static_cast<std::size_t>(t - lo_)]; }

  std::int64_t lo_;
  std::vector<double> points_;
};

}  // namespace

double conjugated_orbit_check(const FiberFamily& family, Conjugacy conjugacy, double x0,
                              std::span<const Letter> letters) {
  const std::string family_label(family_name(family));
  const auto unsupported = [&]() -> UnsupportedError {
    return UnsupportedError("no registered conjugacy of this kind for " + family_label);
  };
  if (letters.empty()) return 0.0;

  // Conjugated step value of each letter.
  std::vector<double> steps;
  if (const auto* f = std::get_if<FractionalLinear>(&family)) {
    if (conjugacy != Conjugacy::Logit) throw unsupported();
    for (double a : f->a) steps.push_back(std::log(a));
  } else if (const auto* f = std::get_if<TPsi>(&family)) {
    const bool logistic_arc = f->map.space() == FiberSpace::UnitInterval &&
                              f->map.arc_count() == 1 && f->map.arc_map(0).is_logistic();
    if (conjugacy == Conjugacy::Logit && !logistic_arc) throw unsupported();
    if (conjugacy == Conjugacy::Identity) throw unsupported();
    for (std::int64_t v : f->psi) steps.push_back(static_cast<double>(v));
  } else if (const auto* f = std::get_if<SkewTranslation>(&family)) {
    if (conjugacy != Conjugacy::Identity) throw unsupported();
    steps = f->phi;
  } else {
    throw unsupported();
  }

  if (conjugacy == Conjugacy::OrbitIndex) {
    const auto& t_psi = std::get<TPsi>(family);
    std::int64_t s = 0, lo = 0, hi = 0;
    for (Letter l : letters) {
      s += t_psi.psi.at(l.index);
      lo = std::min(lo, s);
      hi = std::max(hi, s);
    }
    const OrbitTable table(t_psi.map, x0, lo, hi);
    double worst = 0.0;
    double x = x0;
    s = 0;
    for (Letter l : letters) {
      x = fiber_apply(family, l, x);
      s += t_psi.psi[l.index];
      worst = std::max(worst, std::abs(static_cast<double>(table.index_of(x) - s)));
    }
    return worst;
  }

  const auto h = [&](double x) { return conjugacy == Conjugacy::Logit ? logit(x) : x; };
  const double start = h(x0);
  double walk = 0.0;
  double x = x0;
  double worst = 0.0;
  for (Letter l : letters) {
    x = fiber_apply(family, l, x);
    walk += steps.at(l.index);
    worst = std::max(worst, std::abs(h(x) - (start + walk)));
  }
  return worst;
}

}  // namespace historica
