#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <optional>
#include <thread>
#include <vector>

namespace historica {

namespace detail {
// Rethrows `error` as the same exception category with "trial N: " prefixed.
[[noreturn]] void rethrow_for_trial(std::exception_ptr error, std::uint64_t trial);
}  // namespace detail

template <class Result>
std::vector<Result> run_trials(std::uint64_t trials, unsigned threads,
                               const std::function<Result(std::uint64_t)>& fn) {
  std::vector<std::optional<Result>> slots(trials);
  std::vector<std::exception_ptr> errors(trials);
  std::atomic<std::uint64_t> next{0};
  const auto worker = [&] {
    for (std::uint64_t t = next++; t < trials; t = next++) {
      try {
        slots[t].emplace(fn(t));
      } catch (...) {
        errors[t] = std::current_exception();
      }
    }
  };
  const unsigned workers =
      static_cast<unsigned>(std::clamp<std::uint64_t>(threads, 1, std::max<std::uint64_t>(trials, 1)));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned i = 0; i < workers; ++i) pool.emplace_back(worker);
  }
  std::vector<Result> out;
  out.reserve(trials);
  for (std::uint64_t t = 0; t < trials; ++t) {
    if (errors[t]) detail::rethrow_for_trial(errors[t], t);
    out.push_back(std::move(*slots[t]));
  }
  return out;
}

}  // namespace historica
