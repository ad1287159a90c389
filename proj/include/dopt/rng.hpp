#ifndef DOPT_RNG_HPP
#define DOPT_RNG_HPP

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace dopt {

/// Seedable generator with a fully specified draw discipline, so that
/// instances can be reproduced outside this code base.
///
/// Engine: std::mt19937_64 seeded with the 64-bit seed. Bounded integers are
/// drawn by rejection: with r = hi - lo + 1, raw outputs v < (2^64 mod r) are
/// discarded and lo + (v mod r) is returned. Shuffles are Fisher-Yates from
/// the last index down, drawing j uniformly in [0, i].
class Rng {
 public:
  static constexpr const char* kAlgorithm = "mt19937_64/rejection";

  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Uniform integer in [lo, hi] (inclusive).
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    const std::uint64_t range = static_cast<std::uint64_t>(hi - lo) + 1;
    if (range == 0) return lo + static_cast<std::int64_t>(next());
    const std::uint64_t limit = -range % range;  // 2^64 mod range
    std::uint64_t v = next();
    while (v < limit) v = next();
    return lo + static_cast<std::int64_t>(v % range);
  }

  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(uniform_int(0, static_cast<std::int64_t>(i - 1)));
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace dopt

#endif  // DOPT_RNG_HPP
