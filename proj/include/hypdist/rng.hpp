// Seedable, splittable random source with portable draws.
//
// The engine is std::mt19937_64, whose output sequence is fixed by the
// standard. Seeds for independent streams are derived with SplitMix64 from
// (seed, stream). All derived distributions are implemented here rather than
// taken from <random> so that draws are identical across standard libraries.

#ifndef HYPDIST_RNG_HPP_
#define HYPDIST_RNG_HPP_

#include <cstdint>
#include <random>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>

namespace hypdist {

using BigInt = boost::multiprecision::cpp_int;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

class Rng {
 public:
  static constexpr std::string_view algorithm = "mt19937_64+splitmix64/v1";

  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0)
      : engine_(splitmix64(splitmix64(seed) ^ splitmix64(~stream))) {}

  std::uint64_t next() { return engine_(); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform01() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

  // Uniform on (0, 1].
  double uniform_open_closed() { return 1.0 - uniform01(); }

  // Uniform on {0, ..., n-1}; n > 0.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    std::uint64_t r = next();
    while (r >= limit) r = next();
    return r % n;
  }

  // Uniform on {0, ..., n-1} for arbitrary-precision n > 0.
  BigInt below(const BigInt& n) {
    const std::size_t bits = boost::multiprecision::msb(n) + 1;
    const std::size_t words = (bits + 63) / 64;
    const std::size_t top_bits = bits - 64 * (words - 1);
    const std::uint64_t top_mask =
        top_bits == 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << top_bits) - 1);
    for (;;) {
      BigInt r = 0;
      for (std::size_t i = 0; i < words; ++i) {
        std::uint64_t w = next();
        if (i == 0) w &= top_mask;
        r <<= 64;
        r += w;
      }
      if (r < n) return r;
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace hypdist

#endif  // HYPDIST_RNG_HPP_
