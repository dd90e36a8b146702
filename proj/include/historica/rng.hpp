#pragma once

#include <array>
#include <cstdint>

namespace historica {

/// Philox4x64-10 counter-based block cipher (Salmon et al., Random123).
///
/// Output is a pure function of (counter, key) and uses only 64-bit integer
/// arithmetic, so streams are identical on every platform. The round function
/// and constants match Random123 and numpy.random.Philox.
struct Philox4x64 {
  using Counter = std::array<std::uint64_t, 4>;
  using Key = std::array<std::uint64_t, 2>;

  static Counter block(Counter counter, Key key);
};

/// Identifies the random stream of one Monte Carlo trial.
struct RngStreamSpec {
  std::uint64_t master_seed = 0;
  std::uint64_t stream_index = 0;
};

/// Independent sub-streams of a trial. Orbit noise and initial-condition
/// noise never share counter space.
enum class Substream : std::uint64_t { Letters = 0, InitialCondition = 1 };

/// Sequential reader over a Philox stream.
///
/// Word j of stream (seed, index, sub) is word j % 4 of
/// Philox4x64-10(counter = {j / 4, sub, index, 0}, key = {seed, 0}).
/// This layout is frozen: changing it changes every report.
class RngStream {
 public:
  explicit RngStream(RngStreamSpec spec, Substream sub = Substream::Letters);

  std::uint64_t next_u64() {
    if (lane_ == 4) refill();
    ++position_;
    return buffer_[lane_++];
  }

  /// Uniform on [0,1) with 53 random bits.
  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }
  /// Uniform on (0,1): the midpoint of a 2^-53 cell, never 0 or 1.
  double next_open_unit() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Random access to word j without disturbing the sequential position.
  std::uint64_t word_at(std::uint64_t j) const;
  std::uint64_t position() const { return position_; }
  RngStreamSpec spec() const { return spec_; }

 private:
  void refill();

  RngStreamSpec spec_;
  std::uint64_t sub_;
  std::uint64_t block_ = 0;
  std::uint64_t position_ = 0;
  std::array<std::uint64_t, 4> buffer_{};
  unsigned lane_ = 4;
};

}  // namespace historica
