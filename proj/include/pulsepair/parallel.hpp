#ifndef PULSEPAIR_PARALLEL_HPP
#define PULSEPAIR_PARALLEL_HPP

#include <algorithm>
#include <cstdint>
#include <exception>
#include <thread>
#include <vector>

namespace pulsepair {

/// Evaluates `fn(i)` for i in [0, count) on up to `threads` workers and
/// returns the results in index order. Work is split into fixed contiguous
/// chunks, so the output never depends on the worker count as long as `fn` is
/// a pure function of its index.
template <typename Result, typename Fn>
std::vector<Result> ordered_map(std::int64_t count, int threads, Fn&& fn) {
  std::vector<Result> out(static_cast<std::size_t>(std::max<std::int64_t>(count, 0)));
  if (count <= 0) return out;
  const int workers =
      static_cast<int>(std::clamp<std::int64_t>(threads < 1 ? 1 : threads, 1, count));
  if (workers == 1) {
    for (std::int64_t i = 0; i < count; ++i) out[static_cast<std::size_t>(i)] = fn(i);
    return out;
  }
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  const std::int64_t chunk = (count + workers - 1) / workers;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      const std::int64_t begin = w * chunk;
      const std::int64_t end = std::min(count, begin + chunk);
      try {
        for (std::int64_t i = begin; i < end; ++i) out[static_cast<std::size_t>(i)] = fn(i);
      } catch (...) {
        errors[static_cast<std::size_t>(w)] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

}  // namespace pulsepair

#endif  // PULSEPAIR_PARALLEL_HPP
