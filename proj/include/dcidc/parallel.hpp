#pragma once

#include <cstddef>
#include <functional>

namespace dcidc {

// Worker count from DCIDC_THREADS (default 1, clamped to >= 1).
std::size_t thread_count();

// Runs body(begin, end) over contiguous chunks of [0, n). Each index is
// handled by exactly one call, so results are identical for any thread count
// as long as body writes only to the rows it owns.
void parallel_for(std::size_t n,
                  const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace dcidc
