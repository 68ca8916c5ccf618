#ifndef CONVHASH_COMMON_HPP
#define CONVHASH_COMMON_HPP

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>

namespace convhash {

/// Raised for problems with input data: unreadable files, malformed CSV,
/// classes with too little material, bad audio. CLI maps this to exit code 2.
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

/// Raised when a model file cannot be parsed or fails its invariant checks
/// on load. CLI maps this to exit code 3.
class ModelFormatError : public std::runtime_error {
 public:
  explicit ModelFormatError(const std::string& what) : std::runtime_error(what) {}
};

// splitmix64 step, used to derive independent stream seeds from one master
// seed without correlated low bits.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed for a named sub-stream of a master seed. Streams are tagged with
/// small integers so adding a stream never shifts the others.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t tag) {
  return splitmix64(master ^ splitmix64(tag));
}

/// Seed for a sub-stream named by text ("projection", "aa:species_004", ...).
/// The tag is folded with FNV-1a so per-label streams stay independent.
inline std::uint64_t derive_seed(std::uint64_t master, std::string_view tag) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const unsigned char ch : tag) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return splitmix64(master ^ splitmix64(h));
}

/// Uniform integer in [0, n) from a mt19937_64, via rejection sampling.
/// Unlike std::uniform_int_distribution this is bit-exact across standard
/// library implementations.
inline std::uint64_t bounded_rand(std::mt19937_64& rng, std::uint64_t n) {
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % n;
}

/// Uniform double in (0, 1].
inline double uniform_unit(std::mt19937_64& rng) {
  return static_cast<double>((rng() >> 11) + 1) * 0x1.0p-53;
}

/// Standard normal deviates via Box-Muller on mt19937_64 output, so a seed
/// regenerates the same sequence on every standard library.
class GaussianSource {
 public:
  explicit GaussianSource(std::uint64_t seed) : rng_(seed) {}

  double next() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = uniform_unit(rng_);
    const double u2 = uniform_unit(rng_);
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
  }

 private:
  std::mt19937_64 rng_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace convhash

#endif  // CONVHASH_COMMON_HPP
