#include "minisocial/rng.hpp"

#include <cmath>
#include <numbers>

namespace minisocial {

std::uint64_t CounterRng::mix(std::uint64_t z) {
  // splitmix64 finaliser
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ULL;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBULL;
  z ^= z >> 31;
  return z;
}

CounterRng CounterRng::split(std::string_view name) const {
  CounterRng child;
  child.key_ = mix(key_ ^ mix(fnv1a64(name)));
  return child;
}

CounterRng CounterRng::split(std::uint64_t index) const {
  CounterRng child;
  child.key_ = mix(key_ + mix(index + 0xA5A5A5A5A5A5A5A5ULL));
  return child;
}

std::uint64_t CounterRng::below(std::uint64_t n) {
  // rejection sampling keeps the result unbiased
  const std::uint64_t limit = (~std::uint64_t{0} / n) * n;
  std::uint64_t x = next_u64();
  while (x >= limit) x = next_u64();
  return x % n;
}

double CounterRng::normal() {
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace minisocial
