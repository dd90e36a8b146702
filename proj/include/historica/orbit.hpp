#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include "historica/dynamics.hpp"
#include "historica/stats.hpp"
#include "historica/stochastic.hpp"

namespace historica {

struct SystemSpec;

/// Lazily extended orbit T^t(x0), t in Z, of a Morse-Smale map.
class OrbitCache {
 public:
  OrbitCache(MorseSmaleMap map, double x0);

  double at(std::int64_t t);

 private:
  MorseSmaleMap map_;
  std::vector<double> forward_;   // t = 0, 1, 2, ...
  std::vector<double> backward_;  // t = -1, -2, ...
};

namespace engine {

/// Fixed point; every letter leaves it in place.
struct Pinned {
  double x;
  double value() const { return x; }
  void step(Letter) {}
};

/// Iterates fiber_apply on doubles.
struct Direct {
  const FiberFamily* family;
  double x;
  double value() const { return x; }
  void step(Letter letter) { x = fiber_apply(*family, letter, x); }
};

/// Direct iteration of fractional-linear maps on the endpoint-distance
/// representation, so excursions towards 1 do not freeze at 1 - ulp.
struct DirectFractional {
  const FractionalLinear* family;
  UnitPoint point;
  double x;

  double value() const { return x; }
  void step(Letter letter) {
    point = step_fractional_linear(family->a.at(letter.index), point);
    x = point.value();
  }
};

/// Real walk S = origin + sum_letters count * step, mapped back through
/// sigmoid (logit-conjugate families) or the identity (line fibers).
///
/// The position is recomputed from integer letter counts, so it depends on
/// how often each letter occurred and not on their order.
struct CountWalk {
  double origin;
  std::vector<double> steps;
  std::vector<std::int64_t> counts;
  bool through_sigmoid;
  double x;

  CountWalk(double origin, std::vector<double> steps, bool through_sigmoid);
  double value() const { return x; }
  void step(Letter letter);
};

/// Integer walk S_n on the orbit index of T^psi: the point is T^{S_n}(x0).
struct IndexWalk {
  std::vector<std::int64_t> psi;
  std::int64_t s = 0;
  OrbitCache orbit;
  double x;

  IndexWalk(const TPsi& family, double x0);
  double value() const { return x; }
  void step(Letter letter) {
    s += psi[letter.index];
    x = orbit.at(s);
  }
};

/// Coupling random walk as the pair (ladder index k, orbit index s): the
/// point is p_k + d_k T^s(u0).
struct Coupling {
  const CouplingWalk* family;
  std::int64_t k;
  std::int64_t s = 0;
  OrbitCache orbit;
  double x;

  Coupling(const CouplingWalk& family, double x0);
  double value() const { return x; }
  void step(Letter letter);
};

/// Manneville-Pomeau or Thaler map on the endpoint-distance representation.
struct IntervalMap {
  bool thaler;
  double c;
  double p;
  UnitPoint point;
  double x;

  double value() const { return x; }
  void step(Letter) {
    point = thaler ? step_thaler_branch(c, p, point) : step_manneville_pomeau(p, point);
    x = point.value();
  }
};

}  // namespace engine

/// The orbit simulator of one trial. Holds no random state: the caller
/// supplies one letter per step.
class OrbitEngine {
 public:
  using State = std::variant<engine::Pinned, engine::Direct, engine::DirectFractional, engine::CountWalk, engine::IndexWalk,
                             engine::Coupling, engine::IntervalMap>;

  /// `system` must outlive the engine.
  OrbitEngine(const SystemSpec& system, double x0);

  double value() const {
    return std::visit([](const auto& e) { return e.value(); }, state_);
  }
  void step(Letter letter) {
    std::visit([&](auto& e) { e.step(letter); }, state_);
  }
  /// Calls f(concrete_engine&) so hot loops can be specialized per engine.
  template <class F>
  decltype(auto) visit(F&& f) {
    return std::visit(std::forward<F>(f), state_);
  }

 private:
  State state_;
};

/// Streaming per-orbit statistics: Birkhoff sum, one occupation counter,
/// the interior/endpoint partition, and checkpoint records.
class OrbitTracker {
 public:
  OrbitTracker(OccupationCounter occupation, PartitionCounter partition,
               std::vector<std::uint64_t> checkpoints);

  void observe(double x) {
    ++n_;
    sum_ += x;
    occupation_.add(x);
    partition_.add(x);
    if (next_ < checkpoints_.size() && n_ == checkpoints_[next_]) record();
  }

  std::uint64_t steps() const { return n_; }
  double birkhoff_average() const { return n_ == 0 ? 0.0 : sum_ / static_cast<double>(n_); }
  const OccupationCounter& occupation() const { return occupation_; }
  const OrbitPartition& partition() const { return partition_.counts(); }
  const std::vector<CheckpointRecord>& records() const { return records_; }

 private:
  void record();

  std::uint64_t n_ = 0;
  double sum_ = 0.0;
  OccupationCounter occupation_;
  PartitionCounter partition_;
  std::vector<std::uint64_t> checkpoints_;
  std::size_t next_ = 0;
  std::vector<CheckpointRecord> records_;
};

}  // namespace historica
