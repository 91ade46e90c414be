#include "afg/parallel.hpp"

#include <atomic>
#include <exception>
#include <mutex>

namespace afg {

namespace {
std::atomic<int> g_threads{1};
}

void set_thread_count(int threads) { g_threads = std::max(1, threads); }
int thread_count() { return g_threads.load(); }

void parallel_chunks(std::size_t count, const std::function<void(std::size_t, std::size_t)>& body) {
  const std::size_t chunks = (count + kChunk - 1) / kChunk;
  const int workers = static_cast<int>(std::min<std::size_t>(chunks, static_cast<std::size_t>(thread_count())));
  if (workers <= 1) {
    for (std::size_t c = 0; c < chunks; ++c) body(c * kChunk, std::min(count, (c + 1) * kChunk));
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_lock;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      try {
        for (std::size_t c = next++; c < chunks; c = next++) body(c * kChunk, std::min(count, (c + 1) * kChunk));
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_lock);
        if (!failure) failure = std::current_exception();
        next = chunks;
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace afg
