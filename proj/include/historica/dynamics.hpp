#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace historica {

/// Smallest positive normal double. Interior orbit points of the intermittent
/// maps are never allowed closer than this to an endpoint.
inline constexpr double kMinPos = std::numeric_limits<double>::min();

enum class FiberSpace { UnitInterval, Circle, RealLine };

std::string_view to_string(FiberSpace space);

/// Index of a symbol in a StepTable's declared letter order.
struct Letter {
  std::size_t index = 0;
  friend bool operator==(Letter, Letter) = default;
};

/// A point of [0,1] stored as its distance to the nearer endpoint.
///
/// `upper == false` encodes x = dist with x < 1/2, `upper == true` encodes
/// x = 1 - dist with x >= 1/2. Points within 1e-300 of either endpoint keep
/// full relative precision, which plain doubles only do near 0.
struct UnitPoint {
  double dist = 0.0;
  bool upper = false;

  static UnitPoint from_value(double x);
  static UnitPoint from_lower(double x);  // x = dist from 0, any x in [0,1]
  static UnitPoint from_upper(double y);  // x = 1 - y, any y in [0,1]

  double value() const { return upper ? 1.0 - dist : dist; }
  // Distance to 0 and to 1; the far one is only accurate to an ulp of 1/2.
  double lower_distance() const { return upper ? 1.0 - dist : dist; }
  double upper_distance() const { return upper ? dist : 1.0 - dist; }
  bool is_endpoint() const { return dist == 0.0; }

  friend bool operator<(const UnitPoint& a, const UnitPoint& b);
  friend bool operator==(const UnitPoint&, const UnitPoint&) = default;
};

/// Increasing homeomorphism of [0,1] fixing only 0 and 1, given by a closed
/// form and its closed-form inverse.
class NorthSouthMap {
 public:
  using Fn = std::function<double(double)>;

  NorthSouthMap(std::string name, Fn forward, Fn inverse);

  /// u -> u^2
  static NorthSouthMap square();
  /// Time-one map of the logistic flow, u -> e u / (1 + (e - 1) u).
  static NorthSouthMap logistic();
  /// Identity arc. Not north-south; only for degenerate control runs.
  static NorthSouthMap identity();
  /// "square" | "logistic" | "identity"; anything else is a ConfigError.
  static NorthSouthMap by_name(std::string_view name);

  double forward(double u) const { return forward_(u); }
  double inverse(double u) const { return inverse_(u); }
  const std::string& name() const { return name_; }

  bool is_identity() const { return name_ == "identity"; }
  /// True when T^t(u) = sigmoid(logit(u) + t), i.e. logit conjugates T to a
  /// unit translation.
  bool is_logistic() const { return name_ == "logistic"; }

 private:
  std::string name_;
  Fn forward_;
  Fn inverse_;
};

/// Strictly increasing points p_k in (0,1), k in [-kMaxIndex, kMaxIndex].
class LadderPoints {
 public:
  static constexpr std::int64_t kMaxIndex = 1024;
  using Generator = std::function<UnitPoint(std::int64_t)>;

  LadderPoints(std::string name, Generator generator);

  /// p_k = 2^k / (1 + 2^k)
  static LadderPoints dyadic();

  const std::string& name() const { return name_; }

  /// p_k. Throws RangeError when |k| > kMaxIndex.
  UnitPoint point(std::int64_t k) const;
  double value(std::int64_t k) const { return point(k).value(); }
  /// d_k = p_{k+1} - p_k, computed without cancellation near the endpoints.
  double width(std::int64_t k) const;
  /// The k with x in [p_k, p_{k+1}). x must lie strictly inside
  /// [p_{-kMaxIndex}, p_{kMaxIndex+1}); otherwise RangeError.
  std::int64_t locate(double x) const;

 private:
  std::size_t slot(std::int64_t k) const;

  std::string name_;
  std::vector<UnitPoint> points_;  // k = -kMaxIndex .. kMaxIndex + 1
  std::vector<double> values_;
};

/// Morse-Smale map of period one, stored as an ordered list of fixed points
/// with a north-south arc map on each gap between consecutive fixed points.
/// On the circle the last arc wraps around from the last fixed point to the
/// first one.
class MorseSmaleMap {
 public:
  explicit MorseSmaleMap(NorthSouthMap single);
  MorseSmaleMap(std::vector<double> fixed_points, std::vector<NorthSouthMap> arcs,
                FiberSpace space);

  FiberSpace space() const { return space_; }
  const std::vector<double>& fixed_points() const { return fixed_; }
  const NorthSouthMap& arc_map(std::size_t arc) const { return arcs_.at(arc); }
  std::size_t arc_count() const { return arcs_.size(); }
  /// Arc containing x, or npos when x is a fixed point.
  std::size_t arc_of(double x) const;
  /// T^k(x); k < 0 applies the inverse.
  double power(std::int64_t k, double x) const;

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

 private:
  struct Chart {
    double lo;
    double width;
    bool wraps;
  };
  Chart chart(std::size_t arc) const;

  std::vector<double> fixed_;
  std::vector<NorthSouthMap> arcs_;
  FiberSpace space_;
};

// Fiber map families. Letter-indexed vectors follow the StepTable order.

struct FractionalLinear {
  std::vector<double> a;
};

struct TPsi {
  MorseSmaleMap map;
  std::vector<std::int64_t> psi;
};

struct CouplingWalk {
  LadderPoints ladder;
  NorthSouthMap map;
  std::vector<std::int64_t> psi;
  std::vector<std::int64_t> z;
};

struct MannevillePomeau {
  double p = 2.0;
};

struct ThalerBranch {
  double c = 0.5;
  double p = 2.0;
};

struct SkewTranslation {
  std::vector<double> phi;
};

using FiberFamily = std::variant<FractionalLinear, TPsi, CouplingWalk, MannevillePomeau,
                                 ThalerBranch, SkewTranslation>;

std::string_view family_name(const FiberFamily& family);
/// Number of letters the family is defined on (1 for the interval maps).
std::size_t alphabet_size(const FiberFamily& family);
FiberSpace default_space(const FiberFamily& family);
/// Throws ConfigError when parameters violate the family's invariants
/// (a <= 0 or a == 1, p <= 1, c outside (0,1), mismatched letter counts) or
/// when the fiber space does not suit the family.
void validate(const FiberFamily& family, FiberSpace space);

double apply_fractional_linear(double a, double x);
double apply_manneville_pomeau(double p, double x);
double apply_thaler_branch(double c, double p, double x);
double logistic_flow(double t, double x);
double apply_north_south_power(const NorthSouthMap& map, std::int64_t k, double u);

/// One step of the fiber map selected by `letter`.
double fiber_apply(const FiberFamily& family, Letter letter, double x);

// Full-precision steps of the two-branch intermittent maps. Interior inputs
// stay interior: results are clamped to distance >= kMinPos from 0 and 1.
UnitPoint step_manneville_pomeau(double p, UnitPoint x);
UnitPoint step_fractional_linear(double a, UnitPoint x);
UnitPoint step_thaler_branch(double c, double p, UnitPoint x);

/// Exponents of the generalized arcsine law obeyed by a two-branch Thaler
/// map: alpha = 1/p and beta from the one-sided derivatives at the branch
/// point and the tail-ratio constant.
struct ThalerLawParameters {
  double alpha;
  double beta;
};
ThalerLawParameters thaler_law_parameters(const ThalerBranch& map);
ThalerLawParameters thaler_law_parameters(const MannevillePomeau& map);

}  // namespace historica
