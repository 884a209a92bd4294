#include "torlevy/common.hpp"

#include <algorithm>
#include <atomic>
#include <thread>

namespace torlevy {

namespace {
std::atomic<int> g_max_threads{0};  // 0 = hardware default
}

void set_max_threads(int n) { g_max_threads.store(n > 0 ? n : 0); }

int max_threads() {
  int n = g_max_threads.load();
  if (n > 0) return n;
  unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

void parallel_chunks(std::size_t n_items, const std::function<void(int, std::size_t, std::size_t)>& fn,
                     int n_chunks) {
  if (n_items == 0) return;
  n_chunks = std::min<std::size_t>(n_chunks, n_items);
  auto chunk_bounds = [&](int c) {
    std::size_t lo = n_items * c / n_chunks;
    std::size_t hi = n_items * (c + 1) / n_chunks;
    return std::pair<std::size_t, std::size_t>(lo, hi);
  };
  int workers = std::min(max_threads(), n_chunks);
  if (workers <= 1) {
    for (int c = 0; c < n_chunks; ++c) {
      auto [lo, hi] = chunk_bounds(c);
      fn(c, lo, hi);
    }
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        int c = next.fetch_add(1);
        if (c >= n_chunks) return;
        auto [lo, hi] = chunk_bounds(c);
        fn(c, lo, hi);
      }
    });
  }
  for (auto& t : pool) t.join();
}

std::string version_string() { return "0.1.0"; }

}  // namespace torlevy
