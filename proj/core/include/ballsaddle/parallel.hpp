#pragma once

#include <cstddef>
#include <functional>

namespace ballsaddle {

/// Worker count: BALLSADDLE_THREADS when set to a positive integer, otherwise
/// std::thread::hardware_concurrency() (at least 1).
std::size_t worker_count();

/// Calls body(i) for every i in [0, count), split into contiguous chunks over
/// worker_count() threads. body must only write to slot i of caller-owned
/// storage; reductions happen afterwards on the caller's thread, so results do
/// not depend on scheduling. The first exception thrown by any body is rethrown.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace ballsaddle
