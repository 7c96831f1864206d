#pragma once

#include <cstddef>
#include <functional>

namespace stencil_lab {

/// Parallelism cap: STENCIL_LAB_THREADS when set (>= 1), otherwise the
/// hardware concurrency. Deterministic outputs do not depend on it.
unsigned max_threads();

/// Runs fn(0..n-1), using up to max_threads() worker threads when n > 1.
/// fn must write to disjoint state per index.
void parallel_for_index(std::size_t n, const std::function<void(std::size_t)>& fn);

} // namespace stencil_lab
