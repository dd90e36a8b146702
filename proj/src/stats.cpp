#include "historica/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "historica/error.hpp"

namespace historica {

namespace {

void require_epsilon(double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 0.5)) {
    std::ostringstream msg;
    msg << "epsilon = " << epsilon << " must lie in (0, 1/2)";
    throw DomainError(msg.str());
  }
}

double ratio(std::uint64_t count, std::uint64_t n) {
  return n == 0 ? 0.0 : static_cast<double>(count) / static_cast<double>(n);
}

}  // namespace

OccupationCounter::OccupationCounter(double gamma, Side side, Boundary boundary)
    : gamma_(gamma), side_(side), boundary_(boundary) {
  if (!std::isfinite(gamma)) throw DomainError("occupation threshold must be finite");
}

double OccupationCounter::fraction() const { return ratio(hits_, n_); }

OccupationCounter occupation_update(OccupationCounter counter, double x) {
  counter.add(x);
  return counter;
}

Ecdf::Ecdf(std::vector<double> samples) : samples_(std::move(samples)) {
  std::sort(samples_.begin(), samples_.end());
}

double Ecdf::evaluate(double q) const {
  if (samples_.empty()) return 0.0;
  const auto it = std::upper_bound(samples_.begin(), samples_.end(), q);
  return ratio(static_cast<std::uint64_t>(it - samples_.begin()), samples_.size());
}

std::vector<CdfRow> cdf_table(const Ecdf& ecdf, const Cdf& reference) {
  std::vector<CdfRow> rows;
  const auto& s = ecdf.samples();
  for (std::size_t i = 0; i < s.size();) {
    std::size_t j = i;
    while (j < s.size() && s[j] == s[i]) ++j;
    rows.push_back({s[i], ratio(j, s.size()), reference(s[i])});
    i = j;
  }
  return rows;
}

double ks_statistic(std::span<const CdfRow> rows) {
  if (rows.empty()) throw EmptySampleError("KS distance of an empty sample");
  double below = 0.0;  // F_n just left of the current jump
  double d = 0.0;
  for (const CdfRow& row : rows) {
    d = std::max({d, std::abs(row.empirical - row.reference), std::abs(below - row.reference)});
    below = row.empirical;
  }
  return d;
}

double ks_statistic(const Ecdf& ecdf, const Cdf& reference) {
  if (ecdf.empty()) throw EmptySampleError("KS distance of an empty sample");
  const auto rows = cdf_table(ecdf, reference);
  return ks_statistic(rows);
}

double ecdf_distance(const Ecdf& a, const Ecdf& b) {
  if (a.empty() || b.empty()) throw EmptySampleError("ECDF distance needs two nonempty samples");
  const auto& sa = a.samples();
  const auto& sb = b.samples();
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < sa.size() || j < sb.size()) {
    double v;
    if (j == sb.size() || (i < sa.size() && sa[i] <= sb[j])) {
      v = sa[i];
    } else {
      v = sb[j];
    }
    while (i < sa.size() && sa[i] == v) ++i;
    while (j < sb.size() && sb[j] == v) ++j;
    d = std::max(d, std::abs(ratio(i, sa.size()) - ratio(j, sb.size())));
  }
  return d;
}

double arcsine_cdf(double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    std::ostringstream msg;
    msg << "arcsine_cdf: alpha = " << alpha << " outside [0,1]";
    throw DomainError(msg.str());
  }
  return 2.0 * std::numbers::inv_pi * std::asin(std::sqrt(alpha));
}

double thaler_cdf(double alpha, double beta, double x) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("thaler_cdf: alpha must lie in (0,1)");
  if (!(beta > 0.0 && beta < 1.0)) throw DomainError("thaler_cdf: beta must lie in (0,1)");
  if (!(x > 0.0 && x < 1.0)) throw DomainError("thaler_cdf: x must lie in (0,1)");
  const double pa = std::numbers::pi * alpha;
  const double arg = beta * std::pow(1.0 - x, alpha) /
                         (std::pow(x, alpha) * (1.0 - beta) * std::sin(pa)) +
                     std::cos(pa) / std::sin(pa);
  // arccot on (0, pi); the argument is negative only when alpha > 1/2.
  const double arccot = arg > 0.0 ? std::atan(1.0 / arg) : std::numbers::pi / 2.0 - std::atan(arg);
  return arccot / pa;
}

double uniform_mod_cdf_distance(std::span<const double> samples, double period) {
  if (!(period > 0.0)) throw DomainError("uniform_mod_cdf_distance: period must be positive");
  if (samples.empty()) throw EmptySampleError("uniform_mod_cdf_distance of an empty sample");
  std::vector<double> reduced;
  reduced.reserve(samples.size());
  for (double s : samples) {
    double u = std::fmod(s, period) / period;
    if (u < 0.0) u += 1.0;
    if (u >= 1.0) u = 0.0;
    reduced.push_back(u);
  }
  return ks_statistic(Ecdf(std::move(reduced)), [](double u) { return u; });
}

std::vector<std::uint64_t> CheckpointSchedule::times(std::uint64_t horizon) const {
  std::vector<std::uint64_t> out;
  if (n0 == 0) throw DomainError("checkpoint base n0 must be positive");
  for (std::uint64_t n = n0; n <= horizon; n *= 2) {
    out.push_back(n);
    if (n > horizon / 2) break;
  }
  return out;
}

std::pair<double, double> birkhoff_extremes(const CheckpointSeries& series) {
  if (series.records.size() <= series.burn_in) {
    throw EmptySampleError("no checkpoint recorded past the burn-in index");
  }
  double lo = series.records[series.burn_in].birkhoff_average;
  double hi = lo;
  for (std::size_t k = series.burn_in; k < series.records.size(); ++k) {
    lo = std::min(lo, series.records[k].birkhoff_average);
    hi = std::max(hi, series.records[k].birkhoff_average);
  }
  return {lo, hi};
}

double OrbitPartition::lambda() const { return ratio(below, n()); }
double OrbitPartition::interior_fraction() const { return ratio(interior, n()); }
double OrbitPartition::rho() const { return ratio(above, n()); }

PartitionCounter::PartitionCounter(double lo, double hi) : lo_(lo), hi_(hi) {
  if (!(lo <= hi)) throw DomainError("interior window must satisfy lo <= hi");
}

PartitionCounter PartitionCounter::unit_interval(double epsilon) {
  require_epsilon(epsilon);
  return PartitionCounter(epsilon, 1.0 - epsilon);
}

OrbitPartition orbit_partition(std::span<const double> orbit, double epsilon) {
  PartitionCounter counter = PartitionCounter::unit_interval(epsilon);
  for (double x : orbit) counter.add(x);
  return counter.counts();
}

double interior_fraction(std::span<const double> orbit, double epsilon, std::size_t n) {
  return orbit_partition(orbit.first(std::min(n, orbit.size())), epsilon).interior_fraction();
}

double interior_fraction(std::span<const double> orbit, double epsilon) {
  return interior_fraction(orbit, epsilon, orbit.size());
}

EndpointMasses endpoint_masses(std::span<const double> orbit, double epsilon) {
  const OrbitPartition p = orbit_partition(orbit, epsilon);
  return {p.lambda(), p.rho()};
}

}  // namespace historica
