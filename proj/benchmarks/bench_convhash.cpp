// Microbenchmarks for the hot classification path: Jaccard on packed codes,
// Bloom encoding, simplex-constrained encoding, and full-vs-minhash lookup.
#include <benchmark/benchmark.h>

#include <algorithm>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "convhash/archetypes.hpp"
#include "convhash/codes.hpp"
#include "convhash/common.hpp"
#include "convhash/index.hpp"

namespace {

using namespace convhash;

ConvCode random_code(std::mt19937_64& rng, std::uint32_t bits, std::uint32_t ones) {
  ConvCode code;
  code.bits = bits;
  code.words.assign((bits + 63) / 64, 0);
  for (std::uint32_t i = 0; i < ones; ++i) code.set_bit(bounded_rand(rng, bits));
  return code;
}

ConvexCode random_convex_code(std::mt19937_64& rng, std::uint32_t dim, std::uint32_t support) {
  std::vector<std::uint32_t> idx(dim);
  for (std::uint32_t i = 0; i < dim; ++i) idx[i] = i;
  for (std::uint32_t i = dim - 1; i > 0; --i) std::swap(idx[i], idx[bounded_rand(rng, i + 1)]);
  ConvexCode y;
  y.dim = dim;
  double total = 0.0;
  for (std::uint32_t k = 0; k < support; ++k) {
    const double w = uniform_unit(rng) + 1e-3;
    y.support.emplace_back(idx[k], w);
    total += w;
  }
  for (auto& [i, w] : y.support) w /= total;
  std::sort(y.support.begin(), y.support.end());
  return y;
}

BloomConfig bench_bloom(std::uint32_t bits) {
  BloomConfig cfg;
  cfg.bits = bits;
  cfg.family = {{HashAlgo::murmur3, 11}, {HashAlgo::spooky, 23}};
  return cfg;
}

/// qd codes spread evenly over q labels, plus a matching hash table of
/// T medoids per class, sized so table scans dominate the full path.
struct IndexFixture {
  std::uint32_t q, T, bits, Z;
  BloomConfig bloom;
  HashTable table;
  std::vector<ConvexCode> queries;
  MinHashPermutation perm;
  DirectAddressTable direct;

  IndexFixture(std::uint32_t q_, std::uint32_t T_, std::uint32_t d_, std::uint32_t bits_,
               std::uint32_t Z_)
      : q(q_), T(T_), bits(bits_), Z(Z_), bloom(bench_bloom(bits_)) {
    std::mt19937_64 rng(7);
    const std::uint32_t qd = q * d_;
    std::vector<std::pair<ConvexCode, std::uint16_t>> train;
    std::vector<std::vector<ConvCode>> by_class(q);
    std::vector<std::string> labels;
    for (std::uint32_t c = 0; c < q; ++c) labels.push_back("c" + std::to_string(c));
    for (std::uint32_t c = 0; c < q; ++c) {
      for (std::uint32_t i = 0; i < 4 * T; ++i) {
        ConvexCode y = random_convex_code(rng, qd, Z);
        by_class[c].push_back(bloom_encode(effective_set(y, Z), bloom));
        train.emplace_back(std::move(y), static_cast<std::uint16_t>(c));
      }
    }
    table = build_hash_table(by_class, labels, T, 99);
    perm = make_permutation(41, qd);
    direct = build_direct_table(train, perm, Z, qd);
    for (std::uint32_t i = 0; i < 256; ++i) queries.push_back(random_convex_code(rng, qd, Z));
  }
};

void BM_JaccardBits(benchmark::State& state) {
  std::mt19937_64 rng(3);
  const auto bits = static_cast<std::uint32_t>(state.range(0));
  const ConvCode a = random_code(rng, bits, bits / 100);
  const ConvCode b = random_code(rng, bits, bits / 100);
  for (auto _ : state) benchmark::DoNotOptimize(jaccard_bits(a, b));
}
BENCHMARK(BM_JaccardBits)->Arg(1024)->Arg(4096);

void BM_BloomEncode(benchmark::State& state) {
  std::mt19937_64 rng(5);
  const BloomConfig cfg = bench_bloom(1024);
  const ConvexCode y = random_convex_code(rng, 250, 4);
  const EffectiveSet set = effective_set(y, 4);
  for (auto _ : state) benchmark::DoNotOptimize(bloom_encode(set, cfg));
}
BENCHMARK(BM_BloomEncode);

void BM_SimplexEncode(benchmark::State& state) {
  std::mt19937_64 rng(11);
  const auto K = static_cast<std::uint32_t>(500);
  const auto atoms = static_cast<std::uint32_t>(state.range(0));
  Eigen::MatrixXd D(K, atoms);
  for (Eigen::Index j = 0; j < D.cols(); ++j)
    for (Eigen::Index i = 0; i < D.rows(); ++i) D(i, j) = uniform_unit(rng) - 0.5;
  std::vector<ArchetypalDictionary> dicts;
  ArchetypalDictionary dict;
  dict.D = D;
  dict.d = atoms;
  dict.class_label = "all";
  dicts.push_back(std::move(dict));
  const ConcatenatedDictionary df(dicts);
  Eigen::VectorXd x(K);
  for (Eigen::Index i = 0; i < K; ++i) x(i) = uniform_unit(rng) - 0.5;
  for (auto _ : state) benchmark::DoNotOptimize(encode(x, df));
}
BENCHMARK(BM_SimplexEncode)->Arg(25)->Arg(250);

const IndexFixture& fixture_for(std::uint32_t q) {
  static std::map<std::uint32_t, IndexFixture> cache;
  auto it = cache.find(q);
  if (it == cache.end()) it = cache.try_emplace(q, q, 10u, 25u, 1024u, 4u).first;
  return it->second;
}

void BM_ClassifyFull(benchmark::State& state) {
  const IndexFixture& fx = fixture_for(static_cast<std::uint32_t>(state.range(0)));
  std::size_t i = 0;
  for (auto _ : state) {
    const ConvexCode& y = fx.queries[i++ % fx.queries.size()];
    benchmark::DoNotOptimize(classify_csf(bloom_encode(effective_set(y, fx.Z), fx.bloom),
                                          fx.table));
  }
}

void BM_ClassifyMinhash(benchmark::State& state) {
  const IndexFixture& fx = fixture_for(static_cast<std::uint32_t>(state.range(0)));
  std::size_t i = 0;
  for (auto _ : state) {
    const ConvexCode& y = fx.queries[i++ % fx.queries.size()];
    benchmark::DoNotOptimize(
        classify_csf_minhash(y, fx.direct, fx.perm, fx.Z, fx.table, fx.bloom));
  }
}

// q=50 gives qT=500 table entries; q=200 scales the scan 4x.
BENCHMARK(BM_ClassifyFull)->Arg(50)->Arg(200);
BENCHMARK(BM_ClassifyMinhash)->Arg(50)->Arg(200);

}  // namespace

BENCHMARK_MAIN();
