#pragma once

#include <cstdint>
#include <functional>
#include <random>

namespace implorenz {

/// Per-task generator derived from (master seed, task index).
std::mt19937_64 seeded_rng(std::uint64_t master, std::uint64_t index);

/// Runs body(i) for i in [0, n) on up to `workers` threads. Tasks must write
/// only to their own slot so results do not depend on scheduling. The first
/// exception thrown by a task is rethrown after all workers stop.
void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& body);

/// Resolves a worker count (<= 0 means hardware concurrency).
int resolve_workers(int requested);

}  // namespace implorenz
