#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <vector>

#include <omp.h>

#include "gibbstv/rng.hpp"

namespace gibbstv {

enum class Execution { serial, parallel };

inline void set_num_threads(int n) {
  if (n > 0) omp_set_num_threads(n);
}

// Index block sharing one generator stream. Seeding a Mersenne Twister costs
// more than a typical draw, so streams are per block rather than per index.
inline constexpr std::size_t kDrawBlock = 64;

// Runs fn(rng, i) for i in [0, count). Block b = i / kDrawBlock draws from
// the stream derived from (seed, b) in index order, so results do not depend
// on the thread count and serial and parallel runs agree bit for bit.
template <class T, class Fn>
std::vector<T> draw_values(std::size_t count, std::uint64_t seed, Execution exec,
                           Fn&& fn) {
  std::vector<T> out(count);
  const std::size_t blocks = (count + kDrawBlock - 1) / kDrawBlock;
  auto run_block = [&](std::size_t b) {
    Rng rng = stream_rng(seed, b);
    const std::size_t end = std::min(count, (b + 1) * kDrawBlock);
    for (std::size_t i = b * kDrawBlock; i < end; ++i) out[i] = fn(rng, i);
  };
  if (exec == Execution::serial || blocks < 2) {
    for (std::size_t b = 0; b < blocks; ++b) run_block(b);
    return out;
  }
  std::exception_ptr err = nullptr;
  const auto nb = static_cast<std::int64_t>(blocks);
#pragma omp parallel for schedule(dynamic, 1)
  for (std::int64_t b = 0; b < nb; ++b) {
    try {
      run_block(static_cast<std::size_t>(b));
    } catch (...) {
#pragma omp critical(gibbstv_draw_error)
      if (!err) err = std::current_exception();
    }
  }
  if (err) std::rethrow_exception(err);
  return out;
}

// Deterministic parallel map without randomness.
template <class T, class Fn>
std::vector<T> map_indices(std::size_t count, Execution exec, Fn&& fn) {
  std::vector<T> out(count);
  if (exec == Execution::serial || count < 2) {
    for (std::size_t i = 0; i < count; ++i) out[i] = fn(i);
    return out;
  }
  std::exception_ptr err = nullptr;
  const auto n = static_cast<std::int64_t>(count);
#pragma omp parallel for schedule(dynamic, 1)
  for (std::int64_t i = 0; i < n; ++i) {
    try {
      out[static_cast<std::size_t>(i)] = fn(static_cast<std::size_t>(i));
    } catch (...) {
#pragma omp critical(gibbstv_map_error)
      if (!err) err = std::current_exception();
    }
  }
  if (err) std::rethrow_exception(err);
  return out;
}

}  // namespace gibbstv
