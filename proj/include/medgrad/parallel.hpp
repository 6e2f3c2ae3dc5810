#pragma once

#include <cstddef>
#include <functional>

namespace medgrad {

/// Worker count used by parallel_for. Defaults to 1.
void set_thread_count(int n);
int thread_count();

/// Calls fn(begin, end) on contiguous chunks of [0, n). Each index is owned by
/// exactly one chunk, so writes to per-index slots never race and results do
/// not depend on the worker count.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& fn);

}  // namespace medgrad
