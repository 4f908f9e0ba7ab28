#pragma once

#include <cstddef>
#include <functional>

namespace gwgl {

/// Worker count: GWGL_THREADS when set to a positive integer, else the
/// hardware concurrency.
unsigned worker_count();

/// Runs body(0..n-1) across worker_count() threads. Each index runs exactly
/// once; the first exception is rethrown after all workers finish. Calls made
/// from inside a worker run serially.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace gwgl
