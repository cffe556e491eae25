#include "chainlab/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace chainlab {

unsigned worker_count() {
  unsigned workers = std::max(1u, std::thread::hardware_concurrency());
  if (const char* cap = std::getenv("CHAIN_LAB_THREADS")) {
    try {
      const long value = std::stol(cap);
      if (value >= 1) workers = std::min(workers, static_cast<unsigned>(value));
    } catch (const std::exception&) {
      // Unparseable values leave the default in place.
    }
  }
  return workers;
}

void parallel_for(std::int64_t first, std::int64_t last,
                  const std::function<void(std::int64_t, std::int64_t)>& body) {
  if (last <= first) return;
  const std::int64_t total = last - first;
  const unsigned workers =
      static_cast<unsigned>(std::min<std::int64_t>(worker_count(), total));
  if (workers <= 1) {
    body(first, last);
    return;
  }
  // Small chunks handed out in order keep threads busy when cost grows with the index.
  const std::int64_t chunk = std::max<std::int64_t>(1, total / (16 * workers));
  std::atomic<std::int64_t> next{first};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const std::int64_t begin = next.fetch_add(chunk);
        if (begin >= last) return;
        try {
          body(begin, std::min(last, begin + chunk));
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          next.store(last);
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace chainlab
