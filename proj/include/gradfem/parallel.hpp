#pragma once

#include <cstddef>
#include <functional>

namespace gradfem {

/// Worker count used by parallel loops. 0 selects the hardware concurrency.
void set_thread_count(unsigned n);
[[nodiscard]] unsigned thread_count();

/// Calls fn(i) for i in [0, n) across worker threads in contiguous blocks.
/// Callers must write only to slot i so results do not depend on scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace gradfem
