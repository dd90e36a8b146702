#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

namespace historica {

// Which endpoint interval an occupation counter watches.
enum class Side { Lower = 0, Upper = 1 };
enum class Boundary { Closed, Open };

/// Counts visits of an orbit to I_0(g) = [0,g] (Lower) or I_1(g) = [g,1]
/// (Upper); the Open boundary drops g itself. On line fibers the same
/// counter watches (-inf, g] or [g, inf).
class OccupationCounter {
 public:
  OccupationCounter(double gamma, Side side, Boundary boundary = Boundary::Closed);

  bool contains(double x) const {
    if (side_ == Side::Lower) return boundary_ == Boundary::Closed ? x <= gamma_ : x < gamma_;
    return boundary_ == Boundary::Closed ? x >= gamma_ : x > gamma_;
  }
  void add(double x) {
    ++n_;
    if (contains(x)) ++hits_;
  }

  double gamma() const { return gamma_; }
  Side side() const { return side_; }
  Boundary boundary() const { return boundary_; }
  std::uint64_t hits() const { return hits_; }
  std::uint64_t steps() const { return n_; }
  /// hits / n, or 0 before the first update.
  double fraction() const;

 private:
  double gamma_;
  Side side_;
  Boundary boundary_;
  std::uint64_t hits_ = 0;
  std::uint64_t n_ = 0;
};

OccupationCounter occupation_update(OccupationCounter counter, double x);

/// Sorted sample, queried as the right-continuous empirical CDF.
class Ecdf {
 public:
  Ecdf() = default;
  explicit Ecdf(std::vector<double> samples);

  /// #{samples <= q} / size
  double evaluate(double q) const;
  std::size_t size() const { return samples_.size(); }
  bool empty() const { return samples_.empty(); }
  const std::vector<double>& samples() const { return samples_; }

 private:
  std::vector<double> samples_;
};

using Cdf = std::function<double(double)>;

/// One row per distinct sample value v: (v, F_n(v), F(v)).
struct CdfRow {
  double value;
  double empirical;
  double reference;
};
std::vector<CdfRow> cdf_table(const Ecdf& ecdf, const Cdf& reference);

/// Exact one-sample KS distance sup |F_n - F| for continuous F, evaluated on
/// both sides of every jump of F_n. EmptySampleError on an empty sample.
double ks_statistic(const Ecdf& ecdf, const Cdf& reference);
/// The same distance recomputed from a cdf_table.
double ks_statistic(std::span<const CdfRow> rows);
/// sup |F_a - F_b| between two empirical CDFs.
double ecdf_distance(const Ecdf& a, const Ecdf& b);

/// (2/pi) arcsin(sqrt(alpha)); DomainError outside [0,1].
double arcsine_cdf(double alpha);
/// Lamperti's generalized arcsine distribution function G_{alpha,beta},
/// valued in (0,1) on (0,1). Reduces to arcsine_cdf at alpha = beta = 1/2.
double thaler_cdf(double alpha, double beta, double x);

/// KS distance between the sample reduced mod `period` (rescaled to [0,1))
/// and the uniform law.
double uniform_mod_cdf_distance(std::span<const double> samples, double period);

/// Geometric checkpoint times n0 * 2^k up to a horizon.
struct CheckpointSchedule {
  std::uint64_t n0 = 1024;
  std::size_t burn_in = 4;

  std::vector<std::uint64_t> times(std::uint64_t horizon) const;
};

struct CheckpointRecord {
  std::uint64_t n = 0;
  double birkhoff_average = 0.0;
  double interior_fraction = 0.0;
  double lambda = 0.0;  // mass below the interior window (near 0)
  double rho = 0.0;     // mass above the interior window (near 1)
};

struct CheckpointSeries {
  std::vector<CheckpointRecord> records;
  std::size_t burn_in = 0;
};

/// (min, max) of checkpoint Birkhoff averages at indices >= burn_in.
/// EmptySampleError when no checkpoint survives the burn-in.
std::pair<double, double> birkhoff_extremes(const CheckpointSeries& series);

/// Visit counts of an orbit prefix against the partition
/// [lo_limit, lo) | [lo, hi] | (hi, hi_limit]. Counts always sum to n.
struct OrbitPartition {
  std::uint64_t below = 0;
  std::uint64_t interior = 0;
  std::uint64_t above = 0;

  std::uint64_t n() const { return below + interior + above; }
  double lambda() const;
  double interior_fraction() const;
  double rho() const;
};

/// Streams orbit points into an OrbitPartition for the window [lo, hi].
class PartitionCounter {
 public:
  PartitionCounter(double lo, double hi);
  /// Window [eps, 1 - eps] on the unit interval; DomainError unless
  /// 0 < eps < 1/2.
  static PartitionCounter unit_interval(double epsilon);

  void add(double x) {
    if (x < lo_) {
      ++counts_.below;
    } else if (x > hi_) {
      ++counts_.above;
    } else {
      ++counts_.interior;
    }
  }
  const OrbitPartition& counts() const { return counts_; }

 private:
  double lo_;
  double hi_;
  OrbitPartition counts_;
};

/// Fraction of the first `n` points of `orbit` in [eps, 1 - eps].
double interior_fraction(std::span<const double> orbit, double epsilon, std::size_t n);
double interior_fraction(std::span<const double> orbit, double epsilon);

struct EndpointMasses {
  double lambda;  // [0, eps)
  double rho;     // (1 - eps, 1]
};
EndpointMasses endpoint_masses(std::span<const double> orbit, double epsilon);
OrbitPartition orbit_partition(std::span<const double> orbit, double epsilon);

}  // namespace historica
