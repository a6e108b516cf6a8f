#pragma once

#include <cstdint>

namespace regkrylov {

/// Counter-based generator: output n is the SplitMix64 finalizer applied to
/// key + (n+1)·φ. Any draw can be recomputed from (seed, stream, counter), so
/// results are reproducible across platforms and easy to port.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0);

  /// Pure: the raw 64-bit output at a given counter.
  std::uint64_t at(std::uint64_t counter) const;

  std::uint64_t next_u64() { return at(counter_++); }
  /// Uniform in (0, 1], 53-bit resolution.
  double uniform();
  /// Standard normal via Box–Muller (pairs are consumed in order).
  double normal();

  /// Independent generator for a sub-stream.
  CounterRng split(std::uint64_t stream) const;

  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

std::uint64_t splitmix64_mix(std::uint64_t z);

}  // namespace regkrylov
