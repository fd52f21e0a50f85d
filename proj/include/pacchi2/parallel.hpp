#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>

namespace pacchi2 {

// Name of the environment variable that caps worker threads.
inline constexpr const char* kWorkersEnv = "PACCHI2_WORKERS";

// Value of PACCHI2_WORKERS if set and positive, else hardware concurrency.
unsigned worker_count();

// Runs fn(0..n-1) on up to `workers` threads (0 = worker_count()). The first
// exception by index is rethrown after all jobs finish.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn, unsigned workers = 0);

// splitmix64 finalizer; derives independent per-job seeds from a master seed.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

}  // namespace pacchi2
