#ifndef GMIX_RNG_HPP_
#define GMIX_RNG_HPP_

#include <cstdint>
#include <limits>

namespace gmix {

/// Counter-based 64-bit generator. The output at position i depends only on
/// (key, i), so streams can be split and replayed without shared state.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t key) : key_(key) {}

  static std::uint64_t mix(std::uint64_t key, std::uint64_t ctr) {
    std::uint64_t z = key ^ (ctr * 0x9E3779B97F4A7C15ull + 0xD1B54A32D192ED03ull);
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ull;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBull;
    z ^= z >> 31;
    z += key * 0x2545F4914F6CDD1Dull;
    z ^= z >> 29;
    z *= 0xD6E8FEB86659FD93ull;
    z ^= z >> 32;
    return z;
  }

  std::uint64_t next() { return mix(key_, ctr_++); }

  /// Uniform in [0, n), unbiased via modulo rejection.
  std::uint64_t below(std::uint64_t n) {
    std::uint64_t x, r;
    do {
      x = next();
      r = x % n;
    } while (x - r > std::numeric_limits<std::uint64_t>::max() - n + 1);
    return r;
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double real01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Independent stream derived from this generator's key.
  CounterRng child(std::uint64_t stream) const {
    return CounterRng(mix(key_, 0xC2B2AE3D27D4EB4Full ^ stream));
  }

  std::uint64_t key() const { return key_; }

 private:
  std::uint64_t key_;
  std::uint64_t ctr_ = 0;
};

}  // namespace gmix

#endif  // GMIX_RNG_HPP_
