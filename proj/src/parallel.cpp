#include "dcidc/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace dcidc {

std::size_t thread_count() {
  const char* env = std::getenv("DCIDC_THREADS");
  if (env == nullptr) return 1;
  try {
    const long v = std::stol(env);
    return v < 1 ? 1 : static_cast<std::size_t>(v);
  } catch (...) {
    return 1;
  }
}

void parallel_for(std::size_t n,
                  const std::function<void(std::size_t, std::size_t)>& body) {
  // Small jobs are not worth a thread launch.
  constexpr std::size_t kMinChunk = 64;
  const std::size_t workers = std::min(thread_count(), (n + kMinChunk - 1) / kMinChunk);
  if (workers <= 1) {
    if (n > 0) body(0, n);
    return;
  }
  const std::size_t chunk = (n + workers - 1) / workers;
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (std::size_t begin = 0; begin < n; begin += chunk) {
    const std::size_t end = std::min(n, begin + chunk);
    pool.emplace_back([&body, begin, end] { body(begin, end); });
  }
}

}  // namespace dcidc
