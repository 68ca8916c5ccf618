#include "convhash/codes.hpp"

#include <algorithm>
#include <bit>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>

#include "convhash/common.hpp"

namespace convhash {

std::uint32_t ConvCode::popcount() const {
  std::uint32_t n = 0;
  for (std::uint64_t w : words) n += static_cast<std::uint32_t>(std::popcount(w));
  return n;
}

EffectiveSet effective_set(const ConvexCode& code, std::uint32_t Z) {
  if (Z == 0) throw std::invalid_argument("effective set size must be positive");
  if (Z > code.dim) throw DataError("Z exceeds dictionary size");

  constexpr double kZero = 1e-12;
  std::vector<std::pair<std::uint32_t, double>> live;
  live.reserve(code.support.size());
  for (const auto& entry : code.support) {
    if (entry.second > kZero) live.push_back(entry);
  }
  if (live.size() > Z) {
    // Magnitude descending, index ascending on ties; support is already
    // index-sorted, so stable_sort preserves the tie order.
    std::stable_sort(live.begin(), live.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
    live.resize(Z);
  }
  EffectiveSet set;
  set.indices.reserve(live.size());
  for (const auto& [idx, v] : live) set.indices.push_back(idx);
  std::sort(set.indices.begin(), set.indices.end());
  return set;
}

ConvCode bloom_encode(const EffectiveSet& set, const BloomConfig& config) {
  if (config.bits == 0 || (config.bits & (config.bits - 1)) != 0)
    throw std::invalid_argument("bloom width must be a power of two");
  if (config.family.empty()) throw std::invalid_argument("empty hash family");
  for (std::size_t i = 0; i < config.family.size(); ++i) {
    for (std::size_t j = i + 1; j < config.family.size(); ++j) {
      if (config.family[i] == config.family[j])
        throw std::invalid_argument("hash family members must be distinct");
    }
  }

  ConvCode code;
  code.bits = config.bits;
  code.words.assign((config.bits + 63) / 64, 0);
  const std::uint64_t mask = config.bits - 1;
  for (std::uint32_t element : set.indices) {
    for (const auto& [algo, seed] : config.family) {
      code.set_bit(static_cast<std::uint32_t>(hash_element(algo, element, seed) & mask));
    }
  }
  return code;
}

double jaccard_sets(const EffectiveSet& a, const EffectiveSet& b) {
  std::size_t inter = 0;
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < a.indices.size() && j < b.indices.size()) {
    if (a.indices[i] == b.indices[j]) {
      ++inter;
      ++i;
      ++j;
    } else if (a.indices[i] < b.indices[j]) {
      ++i;
    } else {
      ++j;
    }
  }
  const std::size_t uni = a.indices.size() + b.indices.size() - inter;
  if (uni == 0) return 1.0;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

double jaccard_bits(const ConvCode& a, const ConvCode& b) {
  if (a.bits != b.bits) throw DataError("incompatible code widths");
  std::uint64_t inter = 0;
  std::uint64_t uni = 0;
  for (std::size_t w = 0; w < a.words.size(); ++w) {
    inter += std::popcount(a.words[w] & b.words[w]);
    uni += std::popcount(a.words[w] | b.words[w]);
  }
  if (uni == 0) return 1.0;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

MinHashPermutation make_permutation(std::uint64_t seed, std::uint32_t n) {
  MinHashPermutation perm;
  perm.seed = seed;
  perm.ranks.resize(n);
  std::iota(perm.ranks.begin(), perm.ranks.end(), 0u);
  std::mt19937_64 rng(seed);
  for (std::uint32_t i = n; i > 1; --i) {
    const auto j = static_cast<std::uint32_t>(bounded_rand(rng, i));
    std::swap(perm.ranks[i - 1], perm.ranks[j]);
  }
  return perm;
}

std::uint32_t min_hash(const EffectiveSet& set, const MinHashPermutation& perm) {
  if (set.empty()) throw DataError("no support to hash");
  std::uint32_t best = std::numeric_limits<std::uint32_t>::max();
  for (std::uint32_t element : set.indices) {
    if (element >= perm.ranks.size())
      throw std::invalid_argument("element outside permutation domain");
    best = std::min(best, perm.ranks[element]);
  }
  return best;
}

std::uint32_t min_hash(const ConvexCode& y, const MinHashPermutation& perm, std::uint32_t Z) {
  return min_hash(effective_set(y, Z), perm);
}

}  // namespace convhash
