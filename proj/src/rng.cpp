#include "regkrylov/rng.hpp"

#include <cmath>
#include <numbers>

namespace regkrylov {

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
}

std::uint64_t splitmix64_mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream)
    : key_(splitmix64_mix(seed ^ splitmix64_mix(stream + kGolden))) {}

std::uint64_t CounterRng::at(std::uint64_t counter) const {
  return splitmix64_mix(key_ + (counter + 1) * kGolden);
}

double CounterRng::uniform() {
  // top 53 bits, shifted into (0, 1]
  return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
}

double CounterRng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double t = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(t);
  has_spare_ = true;
  return r * std::cos(t);
}

CounterRng CounterRng::split(std::uint64_t stream) const {
  CounterRng child(0);
  child.key_ = splitmix64_mix(key_ ^ splitmix64_mix(stream + 1));
  return child;
}

}  // namespace regkrylov
