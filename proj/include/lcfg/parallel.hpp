#pragma once

#include <cstddef>
#include <functional>

namespace lcfg {

/// Worker count: hardware concurrency, capped by the LCFG_THREADS environment variable.
std::size_t thread_budget();

/// Runs body(i) for i in [0, n) on up to thread_budget() threads. The first exception
/// thrown by any body (lowest index) is rethrown after all workers finish.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace lcfg
