#include "historica/orbit.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "historica/error.hpp"
#include "historica/experiments.hpp"

namespace historica {

OrbitCache::OrbitCache(MorseSmaleMap map, double x0) : map_(std::move(map)), forward_{x0} {}

double OrbitCache::at(std::int64_t t) {
  if (t >= 0) {
    const auto i = static_cast<std::size_t>(t);
    while (forward_.size() <= i) forward_.push_back(map_.power(1, forward_.back()));
    return forward_[i];
  }
  const auto i = static_cast<std::size_t>(-t - 1);
  while (backward_.size() <= i) {
    backward_.push_back(map_.power(-1, backward_.empty() ? forward_[0] : backward_.back()));
  }
  return backward_[i];
}

namespace engine {

CountWalk::CountWalk(double origin_, std::vector<double> steps_, bool through_sigmoid_)
    : origin(origin_),
      steps(std::move(steps_)),
      counts(steps.size(), 0),
      through_sigmoid(through_sigmoid_),
      x(through_sigmoid_ ? sigmoid(origin_) : origin_) {}

void CountWalk::step(Letter letter) {
  ++counts[letter.index];
  double s = origin;
  for (std::size_t i = 0; i < steps.size(); ++i) {
    s += static_cast<double>(counts[i]) * steps[i];
  }
  x = through_sigmoid ? sigmoid(s) : s;
}

IndexWalk::IndexWalk(const TPsi& family, double x0)
    : psi(family.psi), orbit(family.map, x0), x(x0) {}

Coupling::Coupling(const CouplingWalk& family_, double x0)
    : family(&family_),
      k(family_.ladder.locate(x0)),
      orbit(MorseSmaleMap(family_.map),
            std::clamp((x0 - family_.ladder.value(k)) / family_.ladder.width(k), 0.0, 1.0)),
      x(x0) {}

void Coupling::step(Letter letter) {
  const std::int64_t target = k + family->z[letter.index];
  if (target < -LadderPoints::kMaxIndex || target > LadderPoints::kMaxIndex) {
    std::ostringstream msg;
    msg << "coupling walk left the represented ladder: index " << target;
    throw RangeError(msg.str(), target);
  }
  k = target;
  s += family->psi[letter.index];
  x = family->ladder.value(k) + family->ladder.width(k) * orbit.at(s);
}

}  // namespace engine

OrbitEngine::OrbitEngine(const SystemSpec& system, double x0) : state_(engine::Pinned{x0}) {
  if (system.coordinates == Coordinates::Direct) {
    if (const auto* f = std::get_if<FractionalLinear>(&system.family)) {
      state_.emplace<engine::DirectFractional>(
          engine::DirectFractional{f, UnitPoint::from_value(x0), x0});
      return;
    }
    state_.emplace<engine::Direct>(engine::Direct{&system.family, x0});
    return;
  }
  const bool unit_endpoint =
      system.space == FiberSpace::UnitInterval && (x0 == 0.0 || x0 == 1.0);

  if (const auto* f = std::get_if<FractionalLinear>(&system.family)) {
    if (unit_endpoint) return;
    std::vector<double> steps;
    for (double a : f->a) steps.push_back(std::log(a));
    state_.emplace<engine::CountWalk>(logit(x0), std::move(steps), true);
  } else if (const auto* f = std::get_if<TPsi>(&system.family)) {
    if (f->map.arc_of(x0) == MorseSmaleMap::npos) return;
    const bool logistic_arc = f->map.space() == FiberSpace::UnitInterval &&
                              f->map.arc_count() == 1 && f->map.arc_map(0).is_logistic();
    if (logistic_arc) {
      std::vector<double> steps(f->psi.begin(), f->psi.end());
      state_.emplace<engine::CountWalk>(logit(x0), std::move(steps), true);
    } else {
      state_.emplace<engine::IndexWalk>(*f, x0);
    }
  } else if (const auto* f = std::get_if<CouplingWalk>(&system.family)) {
    if (unit_endpoint) return;
    state_.emplace<engine::Coupling>(*f, x0);
  } else if (const auto* f = std::get_if<MannevillePomeau>(&system.family)) {
    state_.emplace<engine::IntervalMap>(
        engine::IntervalMap{false, 0.5, f->p, UnitPoint::from_value(x0), x0});
  } else if (const auto* f = std::get_if<ThalerBranch>(&system.family)) {
    state_.emplace<engine::IntervalMap>(
        engine::IntervalMap{true, f->c, f->p, UnitPoint::from_value(x0), x0});
  } else if (const auto* f = std::get_if<SkewTranslation>(&system.family)) {
    state_.emplace<engine::CountWalk>(x0, f->phi, false);
  }
}

OrbitTracker::OrbitTracker(OccupationCounter occupation, PartitionCounter partition,
                           std::vector<std::uint64_t> checkpoints)
    : occupation_(occupation), partition_(partition), checkpoints_(std::move(checkpoints)) {
  records_.reserve(checkpoints_.size());
}

void OrbitTracker::record() {
  const OrbitPartition& p = partition_.counts();
  records_.push_back({n_, birkhoff_average(), p.interior_fraction(), p.lambda(), p.rho()});
  ++next_;
}

}  // namespace historica
