#include "historica/rng.hpp"

namespace historica {

namespace {

constexpr std::uint64_t kMul0 = 0xD2E7470EE14C6C93ULL;
constexpr std::uint64_t kMul1 = 0xCA5A826395121157ULL;
constexpr std::uint64_t kWeyl0 = 0x9E3779B97F4A7C15ULL;
constexpr std::uint64_t kWeyl1 = 0xBB67AE8584CAA73BULL;

inline void mulhilo(std::uint64_t a, std::uint64_t b, std::uint64_t& hi, std::uint64_t& lo) {
  const unsigned __int128 product = static_cast<unsigned __int128>(a) * b;
  hi = static_cast<std::uint64_t>(product >> 64);
  lo = static_cast<std::uint64_t>(product);
}

}  // namespace

Philox4x64::Counter Philox4x64::block(Counter c, Key k) {
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      k[0] += kWeyl0;
      k[1] += kWeyl1;
    }
    std::uint64_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, c[0], hi0, lo0);
    mulhilo(kMul1, c[2], hi1, lo1);
    c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
  }
  return c;
}

RngStream::RngStream(RngStreamSpec spec, Substream sub)
    : spec_(spec), sub_(static_cast<std::uint64_t>(sub)) {}

void RngStream::refill() {
  buffer_ = Philox4x64::block({block_++, sub_, spec_.stream_index, 0}, {spec_.master_seed, 0});
  lane_ = 0;
}

std::uint64_t RngStream::word_at(std::uint64_t j) const {
  const auto words =
      Philox4x64::block({j / 4, sub_, spec_.stream_index, 0}, {spec_.master_seed, 0});
  return words[j % 4];
}

}  // namespace historica
