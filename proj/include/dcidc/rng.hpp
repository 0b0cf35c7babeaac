#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace dcidc {

// Seeded generator with portable uniform/normal draws. The standard
// distributions are implementation-defined, so draws are derived from the raw
// 64-bit engine output instead; the same seed gives the same stream on every
// toolchain.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Independent stream for a named consumer ("init", "h-init", "shuffle",
  // "synth"). Adding a consumer never shifts the draws of another.
  static Rng stream(std::uint64_t seed, std::string_view name);

  std::uint64_t next_u64() { return engine_(); }
  // [0, 1)
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  // [0, n)
  std::uint64_t below(std::uint64_t n);
  double normal();

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace dcidc
