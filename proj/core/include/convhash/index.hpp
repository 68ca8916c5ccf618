#ifndef CONVHASH_INDEX_HPP
#define CONVHASH_INDEX_HPP

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "convhash/archetypes.hpp"
#include "convhash/codes.hpp"

namespace convhash {

inline constexpr std::uint16_t kEmptySlot = 0xFFFF;

struct HashTableEntry {
  ConvCode key;          // bit-identical to one training conv-code of the class
  std::uint16_t label = 0;  // index into the model's label table
};

/// qT medoid keys, grouped by class in label order, medoids in index order.
struct HashTable {
  std::vector<HashTableEntry> entries;
  std::uint32_t clusters_per_class = 0;
};

/// Min-hash value -> label table. One slot per archetype; 0xFFFF = EMPTY.
struct DirectAddressTable {
  std::vector<std::uint16_t> slots;
  std::uint64_t perm_seed = 0;
};

/// One CSF-level decision: winning label, its best similarity, and whether
/// the minhash path had to fall back to the full scan.
struct CsfVote {
  std::uint16_t label = 0;
  double similarity = 0.0;
  bool fallback = false;
};

struct VocalizationPrediction {
  std::uint16_t label = 0;
  std::map<std::uint16_t, std::uint32_t> per_csf_votes;
  std::uint32_t n_csfs = 0;

  double vote_fraction() const {
    return n_csfs ? static_cast<double>(per_csf_votes.at(label)) / n_csfs : 0.0;
  }
};

/// Query-side instrumentation; counters only, no timing.
struct ClassifyStats {
  std::uint64_t jaccard_evals = 0;
  std::uint64_t direct_hits = 0;
  std::uint64_t fallbacks = 0;
};

/// PAM-style K-medoids under 1 - jaccard_bits: greedy most-central +
/// max-min initialization, then best-swap refinement (max 50 sweeps).
/// Returns T medoids, each bit-identical to an input code, in input order.
std::vector<ConvCode> kmedoids_jaccard(const std::vector<ConvCode>& codes, std::uint32_t T,
                                       std::uint64_t seed);

/// Runs kmedoids_jaccard per class (classes in label order) and lays the
/// medoid keys out flat; exactly labels.size() * T entries.
HashTable build_hash_table(const std::vector<std::vector<ConvCode>>& codes_by_class,
                           const std::vector<std::string>& labels, std::uint32_t T,
                           std::uint64_t seed);

/// Full scan: argmax jaccard_bits over all keys, ties to the lowest entry
/// index (class order, then medoid order).
CsfVote classify_csf(const ConvCode& code, const HashTable& table, ClassifyStats* stats = nullptr);

/// Majority vote over CSF decisions; vote ties go to the higher summed
/// similarity across the tied labels' winning CSFs, then the lowest label.
VocalizationPrediction aggregate_votes(const std::vector<CsfVote>& votes);

/// Full-scan classification of every CSF code, then the voting rule.
VocalizationPrediction classify_vocalization(const std::vector<ConvCode>& codes,
                                             const HashTable& table,
                                             ClassifyStats* stats = nullptr);

/// Populates the qd-slot table: each training item votes for its min-hash
/// slot; slot label = majority, ties to the larger class (by training item
/// count), then the lowest label. Untouched slots stay EMPTY.
DirectAddressTable build_direct_table(
    const std::vector<std::pair<ConvexCode, std::uint16_t>>& train_codes,
    const MinHashPermutation& perm, std::uint32_t Z, std::uint32_t qd);

/// O(1) path: one array access at the query's min-hash. An EMPTY slot falls
/// back to the full scan (flagged); direct hits perform no Jaccard work and
/// count as similarity 1.0 in the vote.
CsfVote classify_csf_minhash(const ConvexCode& y, const DirectAddressTable& dtable,
                             const MinHashPermutation& perm, std::uint32_t Z,
                             const HashTable& table, const BloomConfig& bloom,
                             ClassifyStats* stats = nullptr);

}  // namespace convhash

#endif  // CONVHASH_INDEX_HPP
