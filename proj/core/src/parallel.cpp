#include "cflow/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <thread>
#include <vector>

namespace cflow {

namespace {
std::atomic<int> g_threads{1};
}

void set_threads(int n) { g_threads.store(std::max(1, n)); }
int thread_count() { return g_threads.load(); }

void parallel_for(std::int64_t n, const std::function<void(std::int64_t, std::int64_t)>& fn) {
  const int t = std::min<std::int64_t>(thread_count(), std::max<std::int64_t>(n, 1));
  if (t <= 1 || n < 4096) {
    fn(0, n);
    return;
  }
  std::vector<std::thread> workers;
  workers.reserve(std::size_t(t));
  const std::int64_t chunk = (n + t - 1) / t;
  for (int i = 0; i < t; ++i) {
    const std::int64_t b = i * chunk;
    const std::int64_t e = std::min<std::int64_t>(b + chunk, n);
    if (b >= e) break;
    workers.emplace_back([&fn, b, e] { fn(b, e); });
  }
  for (auto& w : workers) w.join();
}

double pairwise_sum(std::span<const double> v) {
  const std::size_t n = v.size();
  if (n <= 64) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  const std::size_t half = n / 2;
  return pairwise_sum(v.subspan(0, half)) + pairwise_sum(v.subspan(half));
}

double parallel_sum(std::int64_t n,
                    const std::function<double(std::int64_t, std::int64_t)>& chunk_sum) {
  const int t = thread_count();
  if (t <= 1 || n < 4096) return chunk_sum(0, n);
  const std::int64_t chunk = (n + t - 1) / t;
  std::vector<double> partial(std::size_t(t), 0.0);
  std::vector<std::thread> workers;
  for (int i = 0; i < t; ++i) {
    const std::int64_t b = i * chunk;
    const std::int64_t e = std::min<std::int64_t>(b + chunk, n);
    if (b >= e) break;
    workers.emplace_back([&, i, b, e] { partial[std::size_t(i)] = chunk_sum(b, e); });
  }
  for (auto& w : workers) w.join();
  return pairwise_sum(partial);
}

} // namespace cflow
