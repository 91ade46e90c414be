#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace afg {

/// Process-wide worker count used by the parallel helpers. 1 means serial.
void set_thread_count(int threads);
int thread_count();

/// Fixed chunk size for reductions; results never depend on the thread count.
inline constexpr std::size_t kChunk = 4096;

/// Calls body(begin, end) over [0, count) in fixed chunks distributed over workers.
void parallel_chunks(std::size_t count, const std::function<void(std::size_t, std::size_t)>& body);

/// Deterministic sum: per-chunk partials are combined in chunk order.
template <typename T, typename F>
T chunked_sum(std::size_t count, F&& term) {
  const std::size_t chunks = (count + kChunk - 1) / kChunk;
  std::vector<T> partial(chunks, T{});
  parallel_chunks(count, [&](std::size_t b, std::size_t e) {
    T s{};
    for (std::size_t i = b; i < e; ++i) s += term(i);
    partial[b / kChunk] = s;
  });
  T total{};
  for (const T& p : partial) total += p;
  return total;
}

}  // namespace afg
