#pragma once

#include <cstddef>
#include <functional>

namespace warpft {

/// Upper bound on worker threads (1 = serial).  Results never depend on it.
void set_thread_count(unsigned n);
unsigned thread_count();

/// Calls body(i) for i in [0, n), statically partitioned over the worker pool.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace warpft
