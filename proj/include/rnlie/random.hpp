#pragma once

// Counter-based generator: every draw is a pure hash of (seed, stream,
// counter), so workers can derive independent streams by index and results
// do not depend on scheduling.

#include <cstdint>
#include <cstdlib>
#include <limits>
#include <string>

namespace rnlie {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

class CounterRng {
 public:
  using result_type = std::uint64_t;

  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
      : key_(splitmix64(seed) ^ splitmix64(stream * 0xd1342543de82ef95ULL + 1)) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() { return splitmix64(key_ + splitmix64(counter_++)); }

  /// Uniform double in [0, 1) from the top 53 bits.
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  CounterRng substream(std::uint64_t index) const { return CounterRng(key_, index + 0x632be59bd9b4e019ULL); }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

inline constexpr std::uint64_t kDefaultSeed = 20240601;

/// RNL_SEED from the environment, else the built-in default.
inline std::uint64_t default_seed() {
  if (const char* env = std::getenv("RNL_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
    }
  }
  return kDefaultSeed;
}

}  // namespace rnlie
