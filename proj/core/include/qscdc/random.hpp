// Deterministic random stream shared by the protocol, security test and
// adversary code. Variates are derived from raw engine words rather than
// std distributions so a seed reproduces the same transcript everywhere.

#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>

namespace qscdc {

class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  // Uniform in [0, 1), 53 significant bits.
  double unit() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Uniform in {0, ..., n-1}, rejection sampled so every value is exact.
  std::size_t index(std::size_t n) {
    if (n == 0) throw std::invalid_argument("index range must be nonempty");
    const std::uint64_t limit =
        UINT64_MAX - (UINT64_MAX % static_cast<std::uint64_t>(n) + 1) %
                         static_cast<std::uint64_t>(n);
    std::uint64_t r = engine_();
    while (r > limit) r = engine_();
    return static_cast<std::size_t>(r % static_cast<std::uint64_t>(n));
  }

  int bit() { return static_cast<int>(engine_() >> 63); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace qscdc
