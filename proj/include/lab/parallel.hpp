#pragma once

#include <cstddef>
#include <functional>

namespace lab {

// Runs fn(i) for i in [0, n) on up to `jobs` threads (0 = hardware count).
// Work is split statically, so output written to pre-assigned slots is
// independent of scheduling. Exceptions are captured and rethrown once.
void parallel_for(std::size_t n, unsigned jobs, const std::function<void(std::size_t)>& fn);

unsigned default_jobs();

}  // namespace lab
