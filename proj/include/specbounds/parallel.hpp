#pragma once

#include <cstdint>
#include <functional>
#include <random>

namespace specbounds {

/// Worker cap: SPECBOUNDS_THREADS when set to a positive integer, otherwise
/// the hardware concurrency.
int worker_count();

/// Runs task(i) for i in [0, n_tasks) on up to worker_count() threads.
/// Tasks must write to disjoint outputs; callers reduce in index order so
/// results do not depend on the thread count. The first exception thrown
/// by any task is rethrown on the calling thread.
void parallel_for(int n_tasks, const std::function<void(int)>& task);

/// Independent deterministic random stream for (seed, stream index).
std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t stream);

/// Samples per deterministic work chunk for Monte Carlo estimators.
inline constexpr int k_chunk_size = 1024;

} // namespace specbounds
