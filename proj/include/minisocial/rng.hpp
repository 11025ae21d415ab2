#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <utility>

namespace minisocial {

/// Counter-based generator: every draw is a pure function of (key, counter).
///
/// Streams are derived with split(), so scenario sampling, learner
/// initialisation and action sampling never share state. All conversions to
/// floating point and integer ranges are spelled out here instead of going
/// through <random> distributions, whose output is implementation-defined.
class CounterRng {
 public:
  CounterRng() = default;
  explicit CounterRng(std::uint64_t seed) : key_(mix(seed ^ 0x5eed5eed5eed5eedULL)) {}

  [[nodiscard]] CounterRng split(std::string_view name) const;
  [[nodiscard]] CounterRng split(std::uint64_t index) const;

  std::uint64_t next_u64() { return mix(key_ + (++counter_) * 0x9E3779B97F4A7C15ULL); }

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n). n must be > 0.
  std::uint64_t below(std::uint64_t n);

  /// Standard normal via Box-Muller.
  double normal();

  template <typename T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::size_t j = below(i);
      std::swap(items[i - 1], items[j]);
    }
  }

  [[nodiscard]] std::uint64_t key() const { return key_; }
  [[nodiscard]] std::uint64_t counter() const { return counter_; }

  static std::uint64_t mix(std::uint64_t z);

 private:
  std::uint64_t key_ = mix(0x5eed5eed5eed5eedULL);
  std::uint64_t counter_ = 0;
};

/// 64-bit FNV-1a, used for config hashes and stream names.
std::uint64_t fnv1a64(std::string_view data);

}  // namespace minisocial
