#include "convhash/index.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cassert>
#include <limits>
#include <stdexcept>

#include "convhash/common.hpp"

namespace convhash {
namespace {

// Pairwise 1 - jaccard_bits, cached densely when that fits in memory.
class DistanceOracle {
 public:
  explicit DistanceOracle(const std::vector<ConvCode>& codes) : codes_(codes) {
    const std::size_t n = codes.size();
    if (n <= 3000) {
      cache_.resize(n, n);
      for (std::size_t i = 0; i < n; ++i) {
        cache_(i, i) = 0.0;
        for (std::size_t j = i + 1; j < n; ++j) {
          const double d = 1.0 - jaccard_bits(codes[i], codes[j]);
          cache_(i, j) = d;
          cache_(j, i) = d;
        }
      }
      cached_ = true;
    } else {
      // Validate widths up front so uncached lookups cannot throw mid-sweep.
      for (const auto& c : codes)
        if (c.bits != codes.front().bits) throw DataError("incompatible code widths");
    }
  }

  double operator()(std::size_t i, std::size_t j) const {
    if (cached_) return cache_(i, j);
    if (i == j) return 0.0;
    return 1.0 - jaccard_bits(codes_[i], codes_[j]);
  }

 private:
  const std::vector<ConvCode>& codes_;
  Eigen::MatrixXd cache_;
  bool cached_ = false;
};

}  // namespace

std::vector<ConvCode> kmedoids_jaccard(const std::vector<ConvCode>& codes, std::uint32_t T,
                                       std::uint64_t seed) {
  (void)seed;  // initialization is fully deterministic; seed kept for API stability
  if (T == 0) throw std::invalid_argument("cluster count must be positive");
  const std::size_t n = codes.size();
  if (n < T) throw DataError("fewer codes than clusters");

  std::vector<std::size_t> medoids;
  medoids.reserve(T);
  if (n == T) {
    for (std::size_t i = 0; i < n; ++i) medoids.push_back(i);
  } else {
    const DistanceOracle dist(codes);

    // Greedy seeding: most-central code first, then max-min additions.
    std::size_t central = 0;
    double central_sum = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < n; ++j) s += dist(i, j);
      if (s < central_sum) {
        central_sum = s;
        central = i;
      }
    }
    medoids.push_back(central);
    std::vector<double> min_dist(n);
    for (std::size_t i = 0; i < n; ++i) min_dist[i] = dist(i, central);
    min_dist[central] = -1.0;
    while (medoids.size() < T) {
      std::size_t next = 0;
      double best = -1.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (min_dist[i] > best) {
          best = min_dist[i];
          next = i;
        }
      }
      medoids.push_back(next);
      min_dist[next] = -1.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (min_dist[i] < 0.0) continue;
        min_dist[i] = std::min(min_dist[i], dist(i, next));
      }
    }

    // PAM swap refinement, one best swap per sweep. Per-point caches hold the
    // nearest medoid and the two smallest medoid distances; candidate deltas
    // are accumulated in a single pass over points per candidate.
    std::vector<char> is_medoid(n, 0);
    for (std::size_t m : medoids) is_medoid[m] = 1;
    std::vector<std::size_t> nearest(n);
    std::vector<double> dysma(n), dysmb(n);
    auto refresh = [&]() {
      for (std::size_t i = 0; i < n; ++i) {
        double d1 = std::numeric_limits<double>::infinity();
        double d2 = d1;
        std::size_t arg = 0;
        for (std::size_t k = 0; k < medoids.size(); ++k) {
          const double d = dist(i, medoids[k]);
          if (d < d1) {
            d2 = d1;
            d1 = d;
            arg = k;
          } else if (d < d2) {
            d2 = d;
          }
        }
        nearest[i] = arg;
        dysma[i] = d1;
        dysmb[i] = d2;
      }
    };
    refresh();

    std::vector<double> delta(T);
    std::vector<double> removal_loss(T);
    for (int sweep = 0; sweep < 50; ++sweep) {
      std::fill(removal_loss.begin(), removal_loss.end(), 0.0);
      for (std::size_t i = 0; i < n; ++i) removal_loss[nearest[i]] += dysmb[i] - dysma[i];

      double best_delta = -1e-12;
      std::size_t best_j = T;
      std::size_t best_h = n;
      for (std::size_t h = 0; h < n; ++h) {
        if (is_medoid[h]) continue;
        std::copy(removal_loss.begin(), removal_loss.end(), delta.begin());
        double shared = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          const double dh = dist(i, h);
          if (dh < dysma[i]) {
            shared += dh - dysma[i];
            delta[nearest[i]] += dysma[i] - dysmb[i];
          } else if (dh < dysmb[i]) {
            delta[nearest[i]] += dh - dysmb[i];
          }
        }
        for (std::size_t j = 0; j < T; ++j) {
          const double td = shared + delta[j];
          if (td < best_delta) {
            best_delta = td;
            best_j = j;
            best_h = h;
          }
        }
      }
      if (best_h == n) break;
      is_medoid[medoids[best_j]] = 0;
      is_medoid[best_h] = 1;
      medoids[best_j] = best_h;
      refresh();
    }
  }

  std::sort(medoids.begin(), medoids.end());
  std::vector<ConvCode> out;
  out.reserve(T);
  for (std::size_t m : medoids) out.push_back(codes[m]);
  return out;
}

HashTable build_hash_table(const std::vector<std::vector<ConvCode>>& codes_by_class,
                           const std::vector<std::string>& labels, std::uint32_t T,
                           std::uint64_t seed) {
  if (codes_by_class.size() != labels.size())
    throw std::invalid_argument("one code sequence required per label");
  if (labels.empty()) throw std::invalid_argument("no classes");
  if (labels.size() >= kEmptySlot) throw std::invalid_argument("too many classes");

  HashTable table;
  table.clusters_per_class = T;
  table.entries.reserve(labels.size() * T);
  for (std::size_t c = 0; c < labels.size(); ++c) {
    if (codes_by_class[c].size() < T)
      throw DataError("fewer codes than clusters: " + labels[c]);
    std::vector<ConvCode> medoids;
    try {
      medoids = kmedoids_jaccard(codes_by_class[c], T, derive_seed(seed, "kmedoids:" + labels[c]));
    } catch (const DataError& e) {
      throw DataError(std::string(e.what()) + ": " + labels[c]);
    }
    for (auto& m : medoids) {
      if (m.bits != codes_by_class.front().front().bits)
        throw DataError("incompatible code widths");
      table.entries.push_back({std::move(m), static_cast<std::uint16_t>(c)});
    }
  }
  return table;
}

CsfVote classify_csf(const ConvCode& code, const HashTable& table, ClassifyStats* stats) {
  if (table.entries.empty()) throw std::invalid_argument("empty hash table");
  CsfVote vote;
  double best = -1.0;
  for (const auto& entry : table.entries) {
    const double sim = jaccard_bits(code, entry.key);
    if (sim > best) {
      best = sim;
      vote.label = entry.label;
      vote.similarity = sim;
    }
  }
  if (stats) stats->jaccard_evals += table.entries.size();
  return vote;
}

VocalizationPrediction aggregate_votes(const std::vector<CsfVote>& votes) {
  if (votes.empty()) throw DataError("no CSFs in vocalization");
  VocalizationPrediction pred;
  pred.n_csfs = static_cast<std::uint32_t>(votes.size());
  std::map<std::uint16_t, double> similarity_sum;
  for (const auto& v : votes) {
    pred.per_csf_votes[v.label] += 1;
    similarity_sum[v.label] += v.similarity;
  }
  std::uint32_t best_count = 0;
  double best_sim = -1.0;
  for (const auto& [label, count] : pred.per_csf_votes) {
    const double sim = similarity_sum[label];
    // Count, then summed similarity, then lowest label (map order supplies it).
    if (count > best_count || (count == best_count && sim > best_sim)) {
      best_count = count;
      best_sim = sim;
      pred.label = label;
    }
  }
  return pred;
}

VocalizationPrediction classify_vocalization(const std::vector<ConvCode>& codes,
                                             const HashTable& table, ClassifyStats* stats) {
  if (codes.empty()) throw DataError("no CSFs in vocalization");
  std::vector<CsfVote> votes;
  votes.reserve(codes.size());
  for (const auto& code : codes) votes.push_back(classify_csf(code, table, stats));
  return aggregate_votes(votes);
}

DirectAddressTable build_direct_table(
    const std::vector<std::pair<ConvexCode, std::uint16_t>>& train_codes,
    const MinHashPermutation& perm, std::uint32_t Z, std::uint32_t qd) {
  if (perm.ranks.size() != qd) throw std::invalid_argument("permutation size mismatch");

  std::vector<std::map<std::uint16_t, std::uint32_t>> slot_votes(qd);
  std::map<std::uint16_t, std::uint64_t> class_totals;
  for (const auto& [code, label] : train_codes) {
    const std::uint32_t m = min_hash(code, perm, Z);
    assert(m < qd && "min-hash outside table range");
    slot_votes[m][label] += 1;
    class_totals[label] += 1;
  }

  DirectAddressTable table;
  table.perm_seed = perm.seed;
  table.slots.assign(qd, kEmptySlot);
  for (std::uint32_t s = 0; s < qd; ++s) {
    std::uint32_t best_count = 0;
    std::uint64_t best_total = 0;
    for (const auto& [label, count] : slot_votes[s]) {
      const std::uint64_t total = class_totals[label];
      // Majority, then larger class, then lowest label (map order supplies it).
      if (count > best_count || (count == best_count && total > best_total)) {
        best_count = count;
        best_total = total;
        table.slots[s] = label;
      }
    }
  }
  return table;
}

CsfVote classify_csf_minhash(const ConvexCode& y, const DirectAddressTable& dtable,
                             const MinHashPermutation& perm, std::uint32_t Z,
                             const HashTable& table, const BloomConfig& bloom,
                             ClassifyStats* stats) {
  if (perm.seed != dtable.perm_seed || perm.ranks.size() != dtable.slots.size())
    throw ModelFormatError("permutation does not match table");

  const EffectiveSet set = effective_set(y, Z);
  const std::uint32_t m = min_hash(set, perm);
  const std::uint16_t slot = dtable.slots[m];
  if (slot != kEmptySlot) {
    if (stats) stats->direct_hits += 1;
    return {slot, 1.0, false};
  }
  if (stats) stats->fallbacks += 1;
  CsfVote vote = classify_csf(bloom_encode(set, bloom), table, stats);
  vote.fallback = true;
  return vote;
}

}  // namespace convhash
