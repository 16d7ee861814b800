#pragma once

#include <cstdint>
#include <functional>
#include <span>

namespace cflow {

/// Sets the worker-thread count for field kernels and reductions (>= 1).
void set_threads(int n);
int thread_count();

/// Runs fn(begin, end) over [0, n) split into per-thread contiguous chunks.
/// Chunk boundaries depend only on n and the thread count, so results of
/// deterministic chunk work are reproducible at a fixed thread count.
void parallel_for(std::int64_t n, const std::function<void(std::int64_t, std::int64_t)>& fn);

/// Fixed-order pairwise sum; deterministic and accurate for long ranges.
double pairwise_sum(std::span<const double> v);

/// Deterministic parallel reduction: pairwise within fixed chunks, chunk
/// partials combined in index order.
double parallel_sum(std::int64_t n, const std::function<double(std::int64_t, std::int64_t)>& chunk_sum);

} // namespace cflow
