#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "convhash/common.hpp"
#include "convhash/model.hpp"
#include "support.hpp"

using namespace convhash;

namespace {

std::string read_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_bytes(const std::filesystem::path& path, const std::string& data) {
  std::ofstream out(path, std::ios::binary);
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
  REQUIRE(out.good());
}

/// Small but fully consistent model: q=2, d=2, K=4, fft=64, T=1, 64-bit codes.
ModelFile tiny_model() {
  ModelFile mdl;
  mdl.sample_rate = 22050;
  mdl.fft_size = 64;
  mdl.frame_s = 0.004;
  mdl.overlap = 0.25;
  mdl.log_compress = true;
  mdl.W = 1;
  mdl.m = 33;
  mdl.K = 4;
  mdl.Z = 2;
  mdl.T = 1;
  mdl.d = 2;
  mdl.projection_seed = 101;
  mdl.permutation_seed = 202;
  mdl.bloom.bits = 64;
  mdl.bloom.family = {{HashAlgo::murmur3, 7}, {HashAlgo::spooky, 9}};
  mdl.labels = {"siskin", "warbler"};
  for (int c = 0; c < 2; ++c) {
    Eigen::MatrixXd D(4, 2);
    for (int r = 0; r < 4; ++r)
      for (int k = 0; k < 2; ++k) D(r, k) = 0.25 * (c + 1) + 0.125 * r - 0.0625 * k;
    mdl.dictionaries.push_back(D);
  }
  mdl.table.clusters_per_class = 1;
  mdl.table.entries = {{test_support::code_with_bits(64, {1, 17}), 0},
                       {test_support::code_with_bits(64, {3, 40, 63}), 1}};
  mdl.direct.perm_seed = 202;
  mdl.direct.slots = {0, kEmptySlot, 1, 1};
  return mdl;
}

void check_equal(const ModelFile& a, const ModelFile& b) {
  CHECK(a.sample_rate == b.sample_rate);
  CHECK(a.fft_size == b.fft_size);
  CHECK(a.frame_s == b.frame_s);
  CHECK(a.overlap == b.overlap);
  CHECK(a.log_compress == b.log_compress);
  CHECK(a.W == b.W);
  CHECK(a.m == b.m);
  CHECK(a.K == b.K);
  CHECK(a.Z == b.Z);
  CHECK(a.T == b.T);
  CHECK(a.d == b.d);
  CHECK(a.projection_seed == b.projection_seed);
  CHECK(a.permutation_seed == b.permutation_seed);
  CHECK(a.bloom.bits == b.bloom.bits);
  CHECK(a.bloom.family == b.bloom.family);
  CHECK(a.labels == b.labels);
  REQUIRE(a.dictionaries.size() == b.dictionaries.size());
  for (std::size_t c = 0; c < a.dictionaries.size(); ++c)
    CHECK((a.dictionaries[c].array() == b.dictionaries[c].array()).all());
  CHECK(a.table.clusters_per_class == b.table.clusters_per_class);
  REQUIRE(a.table.entries.size() == b.table.entries.size());
  for (std::size_t e = 0; e < a.table.entries.size(); ++e) {
    CHECK(a.table.entries[e].label == b.table.entries[e].label);
    CHECK(a.table.entries[e].key.bits == b.table.entries[e].key.bits);
    CHECK(a.table.entries[e].key.words == b.table.entries[e].key.words);
  }
  CHECK(a.direct.slots == b.direct.slots);
  CHECK(a.direct.perm_seed == b.direct.perm_seed);
}

}  // namespace

TEST_CASE("model defaults match the reference configuration") {
  const ModelFile mdl;
  CHECK(mdl.sample_rate == 44100);
  CHECK(mdl.fft_size == 512);
  CHECK(mdl.frame_s == 0.020);
  CHECK(mdl.overlap == 0.5);
  CHECK(mdl.W == 5);
  CHECK(mdl.m == 257);
  CHECK(mdl.K == 500);
  CHECK(mdl.Z == 4);
  CHECK(mdl.T == 10);
  CHECK(mdl.d == 25);
  CHECK(mdl.bloom.bits == 1024);
  CHECK(!mdl.log_compress);
}

TEST_CASE("derived counts follow the label list") {
  const ModelFile mdl = tiny_model();
  CHECK(mdl.q() == 2);
  CHECK(mdl.qd() == 4);
}

TEST_CASE("save and load round-trip every field") {
  const auto dir = test_support::scratch_dir("model_roundtrip");
  const auto path = (dir / "tiny.cvxh").string();
  const ModelFile original = tiny_model();
  save_model(original, path);
  const ModelFile loaded = load_model(path);
  check_equal(original, loaded);
  std::filesystem::remove_all(dir);
}

TEST_CASE("save is deterministic and survives a load cycle byte for byte") {
  const auto dir = test_support::scratch_dir("model_bytes");
  const auto first = (dir / "first.cvxh").string();
  const auto again = (dir / "again.cvxh").string();
  const auto cycled = (dir / "cycled.cvxh").string();
  const ModelFile original = tiny_model();
  save_model(original, first);
  save_model(original, again);
  CHECK(read_bytes(first) == read_bytes(again));
  save_model(load_model(first), cycled);
  CHECK(read_bytes(first) == read_bytes(cycled));
  std::filesystem::remove_all(dir);
}

TEST_CASE("runtime companions regenerate from stored seeds") {
  const ModelFile mdl = tiny_model();
  const ProjectionMatrix proj = model_projection(mdl);
  CHECK(proj.seed == mdl.projection_seed);
  CHECK(proj.K == mdl.K);
  CHECK(proj.W == mdl.W);
  CHECK(proj.m == mdl.m);
  const ProjectionMatrix direct = make_projection(mdl.projection_seed, mdl.K, mdl.W, mdl.m);
  CHECK((proj.entries.array() == direct.entries.array()).all());

  const MinHashPermutation perm = model_permutation(mdl);
  CHECK(perm.seed == mdl.permutation_seed);
  CHECK(perm.ranks == make_permutation(mdl.permutation_seed, mdl.qd()).ranks);

  const ConcatenatedDictionary dict = model_dictionary(mdl);
  CHECK(dict.class_count() == 2);
  CHECK(dict.atom_count() == 4);
  CHECK(dict.feature_dim() == 4);
  CHECK(dict.labels() == mdl.labels);
  CHECK((dict.atoms().col(3).array() == mdl.dictionaries[1].col(1).array()).all());
}

TEST_CASE("malformed model files raise typed format errors") {
  const auto dir = test_support::scratch_dir("model_corrupt");
  const auto path = (dir / "tiny.cvxh").string();
  save_model(tiny_model(), path);
  const std::string good = read_bytes(path);
  const auto patched = [&](std::size_t offset, char value) {
    std::string bad = good;
    REQUIRE(offset < bad.size());
    bad[offset] = value;
    const auto bad_path = dir / "bad.cvxh";
    write_bytes(bad_path, bad);
    return bad_path.string();
  };

  SUBCASE("missing file") {
    CHECK_THROWS_AS(load_model((dir / "missing.cvxh").string()), ModelFormatError);
  }
  SUBCASE("bad magic") {
    CHECK_THROWS_WITH_AS(load_model(patched(0, 'X')), "bad magic", ModelFormatError);
  }
  SUBCASE("unknown version") {
    CHECK_THROWS_WITH_AS(load_model(patched(8, 2)), "unsupported model format version",
                         ModelFormatError);
  }
  SUBCASE("truncation anywhere in the tail") {
    for (const std::size_t keep : {good.size() - 1, good.size() / 2, std::size_t{11}}) {
      write_bytes(dir / "bad.cvxh", good.substr(0, keep));
      CHECK_THROWS_WITH_AS(load_model((dir / "bad.cvxh").string()), "truncated model file",
                           ModelFormatError);
    }
  }
  SUBCASE("trailing bytes") {
    write_bytes(dir / "bad.cvxh", good + '\0');
    CHECK_THROWS_WITH_AS(load_model((dir / "bad.cvxh").string()),
                         "corrupt model file: trailing bytes", ModelFormatError);
  }
  SUBCASE("even context window fails validation") {
    // Little-endian u32 W sits right after the one-byte log flag.
    CHECK_THROWS_WITH_AS(load_model(patched(37, 2)),
                         "corrupt model file: context window must be odd", ModelFormatError);
  }
  SUBCASE("zero effective-set size fails validation") {
    CHECK_THROWS_WITH_AS(load_model(patched(49, 0)), "corrupt model file: Z outside [1, qd]",
                         ModelFormatError);
  }
  SUBCASE("non-power-of-two code width is rejected") {
    CHECK_THROWS_WITH_AS(load_model(patched(53, 65)),
                         "corrupt model file: code width not a power of two", ModelFormatError);
  }
  std::filesystem::remove_all(dir);
}
