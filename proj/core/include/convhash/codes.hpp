#ifndef CONVHASH_CODES_HPP
#define CONVHASH_CODES_HPP

#include <cstdint>
#include <utility>
#include <vector>

#include "convhash/archetypes.hpp"
#include "convhash/hashing.hpp"

namespace convhash {

/// Indices of the strongest convex-code coefficients, ascending.
struct EffectiveSet {
  std::vector<std::uint32_t> indices;

  bool empty() const { return indices.empty(); }
  std::size_t size() const { return indices.size(); }
};

/// Bloom layout shared by every code in a model: bit width (power of two)
/// and the seeded hash family applied to each set element.
struct BloomConfig {
  std::uint32_t bits = 1024;
  std::vector<std::pair<HashAlgo, std::uint64_t>> family;  // (algorithm, seed)
};

/// Bloom-filter binary code over archetype indices.
struct ConvCode {
  std::vector<std::uint64_t> words;
  std::uint32_t bits = 0;

  bool bit(std::uint32_t i) const { return (words[i >> 6] >> (i & 63)) & 1u; }
  void set_bit(std::uint32_t i) { words[i >> 6] |= std::uint64_t(1) << (i & 63); }
  std::uint32_t popcount() const;
};

/// Seeded random bijection over archetype indices; ranks[i] is the permuted
/// position of archetype i.
struct MinHashPermutation {
  std::vector<std::uint32_t> ranks;
  std::uint64_t seed = 0;
};

/// Top-Z coefficients of a convex code by magnitude (ties favor the lower
/// index); coefficients at or below 1e-12 never qualify. Indices ascending.
EffectiveSet effective_set(const ConvexCode& code, std::uint32_t Z);

/// Sets one bit per (element, family member) pair: digest modulo bit width.
/// An empty set yields the all-zero code.
ConvCode bloom_encode(const EffectiveSet& set, const BloomConfig& config);

/// Jaccard similarity of two ascending index sets (1.0 when both empty).
double jaccard_sets(const EffectiveSet& a, const EffectiveSet& b);

/// Jaccard similarity of two bit strings: |and| / |or| (1.0 when both zero).
double jaccard_bits(const ConvCode& a, const ConvCode& b);

/// Fisher-Yates permutation of {0..n-1} from a seeded portable generator.
MinHashPermutation make_permutation(std::uint64_t seed, std::uint32_t n);

/// Minimum permuted rank over the effective set.
std::uint32_t min_hash(const EffectiveSet& set, const MinHashPermutation& perm);

/// Min-hash of a convex code: minimum permuted rank over its top-Z support.
std::uint32_t min_hash(const ConvexCode& y, const MinHashPermutation& perm, std::uint32_t Z);

}  // namespace convhash

#endif  // CONVHASH_CODES_HPP
