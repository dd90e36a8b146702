#include "historica/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "historica/error.hpp"

namespace historica {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};

// x^e, by repeated multiplication when e is a small integer. Both paths are
// deterministic; the integer path is several times faster than std::pow.
double power(double x, double e) {
  if (e >= 1.0 && e <= 16.0 && e == std::floor(e)) {
    double r = x;
    for (int i = 1; i < static_cast<int>(e); ++i) r *= x;
    return r;
  }
  return std::pow(x, e);
}

void require_unit(double x, const char* op) {
  if (!(x >= 0.0 && x <= 1.0)) {
    std::ostringstream msg;
    msg << op << ": x = " << x << " outside [0,1]";
    throw DomainError(msg.str());
  }
}

double clamp_interior(double y) {
  static const double kTop = std::nextafter(1.0, 0.0);
  return std::clamp(y, kMinPos, kTop);
}

void check_letter(Letter letter, std::size_t size, std::string_view family) {
  if (letter.index >= size) {
    std::ostringstream msg;
    msg << "letter index " << letter.index << " outside the " << size << "-letter alphabet of "
        << family;
    throw ConfigError(msg.str());
  }
}

// Shared full-precision step for maps with a left branch on [0,c) and a
// right branch on [c,1]. `left_gain(x)` is f(x) - x for x the distance to 0;
// `right_gain(y)` is (1-y) - f(1-y) for y the distance to 1.
template <class LeftGain, class RightGain>
UnitPoint two_branch_step(double c, UnitPoint x, LeftGain left_gain, RightGain right_gain) {
  if (x.is_endpoint()) return x;
  const double lo = x.lower_distance();
  const double up = x.upper_distance();
  double new_lo = 0.0;
  double new_up = 0.0;
  if (lo < c) {
    const double g = left_gain(lo);
    new_lo = lo + g;
    new_up = up - g;
  } else {
    const double g = right_gain(up);
    new_up = up + g;
    new_lo = lo - g;
  }
  UnitPoint r = new_lo < 0.5 ? UnitPoint{new_lo, false} : UnitPoint{new_up, true};
  if (!(r.dist >= kMinPos)) r.dist = kMinPos;
  return r;
}

}  // namespace

std::string_view to_string(FiberSpace space) {
  switch (space) {
    case FiberSpace::UnitInterval:
      return "interval";
    case FiberSpace::Circle:
      return "circle";
    case FiberSpace::RealLine:
      return "line";
  }
  return "?";
}

// --- UnitPoint --------------------------------------------------------------

UnitPoint UnitPoint::from_value(double x) { return from_lower(x); }

UnitPoint UnitPoint::from_lower(double x) {
  return x < 0.5 ? UnitPoint{x, false} : UnitPoint{1.0 - x, true};
}

UnitPoint UnitPoint::from_upper(double y) {
  return y <= 0.5 ? UnitPoint{y, true} : UnitPoint{1.0 - y, false};
}

bool operator<(const UnitPoint& a, const UnitPoint& b) {
  if (a.upper != b.upper) return b.upper;
  return a.upper ? a.dist > b.dist : a.dist < b.dist;
}

// --- NorthSouthMap ----------------------------------------------------------

NorthSouthMap::NorthSouthMap(std::string name, Fn forward, Fn inverse)
    : name_(std::move(name)), forward_(std::move(forward)), inverse_(std::move(inverse)) {}

NorthSouthMap NorthSouthMap::square() {
  return NorthSouthMap("square", [](double u) { return u * u; },
                       [](double u) { return std::sqrt(u); });
}

NorthSouthMap NorthSouthMap::logistic() {
  return NorthSouthMap("logistic", [](double u) { return logistic_flow(1.0, u); },
                       [](double u) { return logistic_flow(-1.0, u); });
}

NorthSouthMap NorthSouthMap::identity() {
  return NorthSouthMap("identity", [](double u) { return u; }, [](double u) { return u; });
}

NorthSouthMap NorthSouthMap::by_name(std::string_view name) {
  if (name == "square") return square();
  if (name == "logistic") return logistic();
  if (name == "identity") return identity();
  throw ConfigError("unknown north-south map '" + std::string(name) +
                    "' (expected square, logistic or identity)");
}

// --- LadderPoints -----------------------------------------------------------

LadderPoints::LadderPoints(std::string name, Generator generator) : name_(std::move(name)) {
  points_.reserve(2 * kMaxIndex + 2);
  for (std::int64_t k = -kMaxIndex; k <= kMaxIndex + 1; ++k) {
    const UnitPoint p = generator(k);
    if (!(p.dist > 0.0) || (!points_.empty() && !(points_.back() < p))) {
      std::ostringstream msg;
      msg << "ladder '" << name_ << "' is not strictly increasing inside (0,1) at k = " << k;
      throw ConfigError(msg.str());
    }
    points_.push_back(p);
    values_.push_back(p.value());
  }
}

LadderPoints LadderPoints::dyadic() {
  return LadderPoints("dyadic", [](std::int64_t k) {
    if (k < 0) {
      const double t = std::ldexp(1.0, static_cast<int>(k));
      return UnitPoint{t / (1.0 + t), false};
    }
    const double t = std::ldexp(1.0, static_cast<int>(-k));
    return UnitPoint{t / (1.0 + t), true};
  });
}

std::size_t LadderPoints::slot(std::int64_t k) const {
  if (k < -kMaxIndex || k > kMaxIndex + 1) {
    std::ostringstream msg;
    msg << "ladder index " << k << " outside the represented range [" << -kMaxIndex << ", "
        << kMaxIndex << "]";
    throw RangeError(msg.str(), k);
  }
  return static_cast<std::size_t>(k + kMaxIndex);
}

UnitPoint LadderPoints::point(std::int64_t k) const { return points_[slot(k)]; }

double LadderPoints::width(std::int64_t k) const {
  const UnitPoint a = points_[slot(k)];
  const UnitPoint b = points_[slot(k + 1)];
  if (!a.upper && !b.upper) return b.dist - a.dist;
  if (a.upper && b.upper) return a.dist - b.dist;
  return (1.0 - b.dist) - a.dist;
}

std::int64_t LadderPoints::locate(double x) const {
  if (!(x >= values_.front() && x < values_.back())) {
    std::ostringstream msg;
    msg << "point " << x << " lies outside the represented ladder intervals";
    throw RangeError(msg.str(), x < 0.5 ? -kMaxIndex - 1 : kMaxIndex + 1);
  }
  const auto it = std::upper_bound(values_.begin(), values_.end(), x);
  return static_cast<std::int64_t>(it - values_.begin()) - 1 - kMaxIndex;
}

// --- MorseSmaleMap ----------------------------------------------------------

MorseSmaleMap::MorseSmaleMap(NorthSouthMap single)
    : fixed_{0.0, 1.0}, arcs_{std::move(single)}, space_(FiberSpace::UnitInterval) {}

MorseSmaleMap::MorseSmaleMap(std::vector<double> fixed_points, std::vector<NorthSouthMap> arcs,
                             FiberSpace space)
    : fixed_(std::move(fixed_points)), arcs_(std::move(arcs)), space_(space) {
  if (!std::is_sorted(fixed_.begin(), fixed_.end()) ||
      std::adjacent_find(fixed_.begin(), fixed_.end()) != fixed_.end()) {
    throw ConfigError("Morse-Smale fixed points must be strictly increasing");
  }
  if (space_ == FiberSpace::UnitInterval) {
    if (fixed_.size() < 2 || fixed_.front() != 0.0 || fixed_.back() != 1.0) {
      throw ConfigError("Morse-Smale map on [0,1] must fix 0 and 1");
    }
    if (arcs_.size() != fixed_.size() - 1) {
      throw ConfigError("Morse-Smale map on [0,1] needs one arc per gap between fixed points");
    }
  } else if (space_ == FiberSpace::Circle) {
    if (fixed_.empty() || fixed_.front() < 0.0 || fixed_.back() >= 1.0) {
      throw ConfigError("Morse-Smale map on the circle needs fixed points in [0,1)");
    }
    if (arcs_.size() != fixed_.size()) {
      throw ConfigError("Morse-Smale map on the circle needs one arc per fixed point");
    }
  } else {
    throw ConfigError("Morse-Smale maps live on the interval or the circle");
  }
}

MorseSmaleMap::Chart MorseSmaleMap::chart(std::size_t arc) const {
  if (arc + 1 < fixed_.size()) return {fixed_[arc], fixed_[arc + 1] - fixed_[arc], false};
  return {fixed_.back(), fixed_.front() + 1.0 - fixed_.back(), true};
}

std::size_t MorseSmaleMap::arc_of(double x) const {
  if (space_ == FiberSpace::Circle) x -= std::floor(x);
  const auto it = std::lower_bound(fixed_.begin(), fixed_.end(), x);
  if (it != fixed_.end() && *it == x) return npos;
  if (it == fixed_.begin() || it == fixed_.end()) {
    if (space_ == FiberSpace::Circle) return fixed_.size() - 1;
    return npos;
  }
  return static_cast<std::size_t>(it - fixed_.begin()) - 1;
}

double MorseSmaleMap::power(std::int64_t k, double x) const {
  if (space_ == FiberSpace::Circle) x -= std::floor(x);
  const std::size_t arc = arc_of(x);
  if (arc == npos || k == 0) return x;
  const Chart c = chart(arc);
  double lifted = x;
  if (c.wraps && lifted < c.lo) lifted += 1.0;
  const double u = std::clamp((lifted - c.lo) / c.width, 0.0, 1.0);
  double y = c.lo + c.width * apply_north_south_power(arcs_[arc], k, u);
  if (space_ == FiberSpace::Circle) y -= std::floor(y);
  return y;
}

// --- families ---------------------------------------------------------------

std::string_view family_name(const FiberFamily& family) {
  return std::visit(Overloaded{
                        [](const FractionalLinear&) { return "fractional_linear"; },
                        [](const TPsi&) { return "t_psi"; },
                        [](const CouplingWalk&) { return "coupling_walk"; },
                        [](const MannevillePomeau&) { return "manneville_pomeau"; },
                        [](const ThalerBranch&) { return "thaler"; },
                        [](const SkewTranslation&) { return "skew_translation"; },
                    },
                    family);
}

std::size_t alphabet_size(const FiberFamily& family) {
  return std::visit(Overloaded{
                        [](const FractionalLinear& f) { return f.a.size(); },
                        [](const TPsi& f) { return f.psi.size(); },
                        [](const CouplingWalk& f) { return f.psi.size(); },
                        [](const MannevillePomeau&) { return std::size_t{1}; },
                        [](const ThalerBranch&) { return std::size_t{1}; },
                        [](const SkewTranslation& f) { return f.phi.size(); },
                    },
                    family);
}

FiberSpace default_space(const FiberFamily& family) {
  if (std::holds_alternative<SkewTranslation>(family)) return FiberSpace::RealLine;
  if (const auto* t = std::get_if<TPsi>(&family)) return t->map.space();
  return FiberSpace::UnitInterval;
}

void validate(const FiberFamily& family, FiberSpace space) {
  std::visit(
      Overloaded{
          [&](const FractionalLinear& f) {
            if (f.a.empty()) throw ConfigError("fractional_linear: empty coefficient list");
            for (double a : f.a) {
              if (!(a > 0.0) || a == 1.0 || !std::isfinite(a)) {
                std::ostringstream msg;
                msg << "fractional_linear: coefficient a = " << a
                    << " must be positive, finite and different from 1";
                throw ConfigError(msg.str());
              }
            }
            if (space != FiberSpace::UnitInterval)
              throw ConfigError("fractional_linear lives on the unit interval");
          },
          [&](const TPsi& f) {
            if (f.psi.empty()) throw ConfigError("t_psi: empty psi list");
            if (space != f.map.space())
              throw ConfigError("t_psi: fiber space does not match the Morse-Smale map");
          },
          [&](const CouplingWalk& f) {
            if (f.psi.empty() || f.psi.size() != f.z.size())
              throw ConfigError("coupling_walk: psi and z must list one value per letter");
            if (space != FiberSpace::UnitInterval)
              throw ConfigError("coupling_walk lives on the unit interval");
          },
          [&](const MannevillePomeau& f) {
            if (!(f.p > 1.0) || !std::isfinite(f.p))
              throw ConfigError("manneville_pomeau: p must exceed 1");
            if (space != FiberSpace::UnitInterval)
              throw ConfigError("manneville_pomeau lives on the unit interval");
          },
          [&](const ThalerBranch& f) {
            if (!(f.c > 0.0 && f.c < 1.0)) throw ConfigError("thaler: c must lie in (0,1)");
            if (!(f.p > 1.0) || !std::isfinite(f.p)) throw ConfigError("thaler: p must exceed 1");
            if (space != FiberSpace::UnitInterval)
              throw ConfigError("thaler lives on the unit interval");
          },
          [&](const SkewTranslation& f) {
            if (f.phi.empty()) throw ConfigError("skew_translation: empty phi list");
            for (double v : f.phi)
              if (!std::isfinite(v)) throw ConfigError("skew_translation: phi must be finite");
            if (space != FiberSpace::RealLine)
              throw ConfigError("skew_translation lives on the real line");
          },
      },
      family);
}

double apply_fractional_linear(double a, double x) {
  if (!(a > 0.0)) {
    std::ostringstream msg;
    msg << "fractional-linear coefficient a = " << a << " must be positive";
    throw DomainError(msg.str());
  }
  require_unit(x, "apply_fractional_linear");
  return a * x / (1.0 + (a - 1.0) * x);
}

double apply_manneville_pomeau(double p, double x) {
  if (!(p > 1.0)) throw DomainError("Manneville-Pomeau exponent p must exceed 1");
  require_unit(x, "apply_manneville_pomeau");
  if (x == 0.0 || x == 1.0) return x;
  const double scale = std::exp2(p);
  const double y = x < 0.5 ? x + scale * power(x, p + 1.0)
                           : x - scale * power(1.0 - x, p + 1.0);
  return clamp_interior(y);
}

double apply_thaler_branch(double c, double p, double x) {
  if (!(c > 0.0 && c < 1.0)) throw DomainError("Thaler branch point c must lie in (0,1)");
  if (!(p > 1.0)) throw DomainError("Thaler exponent p must exceed 1");
  require_unit(x, "apply_thaler_branch");
  if (x == 0.0 || x == 1.0) return x;
  const double y = x < c ? x + (1.0 - c) * power(x / c, p + 1.0)
                         : x - c * power((1.0 - x) / (1.0 - c), p + 1.0);
  return clamp_interior(y);
}

double logistic_flow(double t, double x) {
  require_unit(x, "logistic_flow");
  if (x == 0.0 || x == 1.0 || t == 0.0) return x;
  // e^t x / (1 + (e^t - 1) x), rewritten so that neither e^t nor e^-t
  // overflows into inf/inf.
  if (t > 0.0) return x / (x + (1.0 - x) * std::exp(-t));
  const double et = std::exp(t);
  return et * x / (1.0 - x + et * x);
}

double apply_north_south_power(const NorthSouthMap& map, std::int64_t k, double u) {
  if (k >= 0) {
    for (std::int64_t i = 0; i < k; ++i) u = map.forward(u);
  } else {
    for (std::int64_t i = 0; i < -k; ++i) u = map.inverse(u);
  }
  return u;
}

double fiber_apply(const FiberFamily& family, Letter letter, double x) {
  return std::visit(
      Overloaded{
          [&](const FractionalLinear& f) {
            check_letter(letter, f.a.size(), "fractional_linear");
            return apply_fractional_linear(f.a[letter.index], x);
          },
          [&](const TPsi& f) {
            check_letter(letter, f.psi.size(), "t_psi");
            return f.map.power(f.psi[letter.index], x);
          },
          [&](const CouplingWalk& f) {
            check_letter(letter, f.psi.size(), "coupling_walk");
            require_unit(x, "fiber_apply(coupling_walk)");
            if (x == 0.0 || x == 1.0) return x;
            const std::int64_t k = f.ladder.locate(x);
            const double u = (x - f.ladder.value(k)) / f.ladder.width(k);
            const std::int64_t target = k + f.z[letter.index];
            if (target < -LadderPoints::kMaxIndex || target > LadderPoints::kMaxIndex) {
              std::ostringstream msg;
              msg << "coupling walk left the represented ladder: index " << target;
              throw RangeError(msg.str(), target);
            }
            const double tu = apply_north_south_power(f.map, f.psi[letter.index],
                                                      std::clamp(u, 0.0, 1.0));
            return f.ladder.value(target) + f.ladder.width(target) * tu;
          },
          [&](const MannevillePomeau& f) {
            check_letter(letter, 1, "manneville_pomeau");
            return apply_manneville_pomeau(f.p, x);
          },
          [&](const ThalerBranch& f) {
            check_letter(letter, 1, "thaler");
            return apply_thaler_branch(f.c, f.p, x);
          },
          [&](const SkewTranslation& f) {
            check_letter(letter, f.phi.size(), "skew_translation");
            return x + f.phi[letter.index];
          },
      },
      family);
}

UnitPoint step_fractional_linear(double a, UnitPoint x) {
  if (!(a > 0.0)) {
    std::ostringstream msg;
    msg << "fractional-linear coefficient a = " << a << " must be positive";
    throw DomainError(msg.str());
  }
  if (x.is_endpoint()) return x;
  // f(x) = a x / d and 1 - f(x) = (1 - x) / d with d = 1 + (a - 1) x.
  const double lo = x.lower_distance();
  const double up = x.upper_distance();
  const double d = x.upper ? a - (a - 1.0) * up : 1.0 + (a - 1.0) * lo;
  const double new_lo = a * lo / d;
  UnitPoint r = new_lo < 0.5 ? UnitPoint{new_lo, false} : UnitPoint{up / d, true};
  if (!(r.dist >= kMinPos)) r.dist = kMinPos;
  return r;
}

UnitPoint step_manneville_pomeau(double p, UnitPoint x) {
  if (!(p > 1.0)) throw DomainError("Manneville-Pomeau exponent p must exceed 1");
  const double scale = std::exp2(p);
  const auto gain = [=](double d) { return scale * power(d, p + 1.0); };
  return two_branch_step(0.5, x, gain, gain);
}

UnitPoint step_thaler_branch(double c, double p, UnitPoint x) {
  if (!(c > 0.0 && c < 1.0)) throw DomainError("Thaler branch point c must lie in (0,1)");
  if (!(p > 1.0)) throw DomainError("Thaler exponent p must exceed 1");
  return two_branch_step(
      c, x, [=](double d) { return (1.0 - c) * power(d / c, p + 1.0); },
      [=](double d) { return c * power(d / (1.0 - c), p + 1.0); });
}

ThalerLawParameters thaler_law_parameters(const ThalerBranch& map) {
  const double c = map.c;
  const double p = map.p;
  const double slope_left = 1.0 + (1.0 - c) * (p + 1.0) / c;  // f'(c-)
  const double slope_right = 1.0 + c * (p + 1.0) / (1.0 - c);  // f'(c+)
  // (1-x) - f(1-x) ~ a^p (f(x) - x) as x -> 0.
  const double tail_ratio = std::pow(c / (1.0 - c), (p + 2.0) / p);
  return {1.0 / p, slope_left / (slope_left + slope_right / tail_ratio)};
}

ThalerLawParameters thaler_law_parameters(const MannevillePomeau& map) {
  return thaler_law_parameters(ThalerBranch{0.5, map.p});
}

}  // namespace historica
