#include "convhash/model.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <stdexcept>

#include "convhash/common.hpp"

namespace convhash {
namespace {

constexpr char kMagic[8] = {'C', 'V', 'X', 'H', 'A', 'S', 'H', '\0'};
constexpr std::uint32_t kVersion = 1;

class Writer {
 public:
  void u8(std::uint8_t v) { buf_.push_back(static_cast<char>(v)); }
  void u16(std::uint16_t v) {
    for (int i = 0; i < 2; ++i) u8(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) u8(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) u8(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void bytes(const void* p, std::size_t n) {
    buf_.append(static_cast<const char*>(p), n);
  }
  const std::string& str() const { return buf_; }

 private:
  std::string buf_;
};

class Reader {
 public:
  explicit Reader(std::string data) : data_(std::move(data)) {}

  std::uint8_t u8() {
    need(1);
    return static_cast<std::uint8_t>(data_[pos_++]);
  }
  std::uint16_t u16() {
    std::uint16_t v = 0;
    for (int i = 0; i < 2; ++i) v |= static_cast<std::uint16_t>(u8()) << (8 * i);
    return v;
  }
  std::uint32_t u32() {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(u8()) << (8 * i);
    return v;
  }
  std::uint64_t u64() {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(u8()) << (8 * i);
    return v;
  }
  double f64() { return std::bit_cast<double>(u64()); }
  std::string bytes(std::size_t n) {
    need(n);
    std::string s = data_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  bool exhausted() const { return pos_ == data_.size(); }

 private:
  void need(std::size_t n) {
    if (pos_ + n > data_.size()) throw ModelFormatError("truncated model file");
  }
  std::string data_;
  std::size_t pos_ = 0;
};

[[noreturn]] void corrupt(const std::string& detail) {
  throw ModelFormatError("corrupt model file: " + detail);
}

void validate(const ModelFile& mdl) {
  if (mdl.labels.empty()) corrupt("no classes");
  if (mdl.labels.size() >= kEmptySlot) corrupt("too many classes");
  for (const auto& label : mdl.labels)
    if (label.empty()) corrupt("empty class label");
  if (mdl.d < 2) corrupt("archetype count below 2");
  if (mdl.fft_size < 64 || (mdl.fft_size & (mdl.fft_size - 1)) != 0)
    corrupt("fft size not a power of two >= 64");
  if (mdl.m != mdl.fft_size / 2 + 1) corrupt("bin count disagrees with fft size");
  if (mdl.W == 0 || mdl.W % 2 == 0) corrupt("context window must be odd");
  if (mdl.K == 0 || std::uint64_t(mdl.K) >= std::uint64_t(mdl.W) * mdl.m)
    corrupt("projection does not compress");
  if (!(mdl.frame_s > 0.0) || !(mdl.overlap >= 0.0) || !(mdl.overlap < 1.0))
    corrupt("bad framing parameters");
  if (mdl.sample_rate == 0) corrupt("bad sample rate");
  if (mdl.bloom.bits == 0 || (mdl.bloom.bits & (mdl.bloom.bits - 1)) != 0)
    corrupt("code width not a power of two");
  if (mdl.bloom.family.empty()) corrupt("empty hash family");
  for (std::size_t i = 0; i < mdl.bloom.family.size(); ++i) {
    const auto algo = static_cast<std::uint8_t>(mdl.bloom.family[i].first);
    if (algo > 1) corrupt("unknown hash algorithm");
    for (std::size_t j = i + 1; j < mdl.bloom.family.size(); ++j)
      if (mdl.bloom.family[i] == mdl.bloom.family[j]) corrupt("duplicate hash family member");
  }
  if (mdl.Z == 0 || mdl.Z > mdl.qd()) corrupt("Z outside [1, qd]");
  if (mdl.T == 0) corrupt("cluster count must be positive");

  if (mdl.dictionaries.size() != mdl.labels.size()) corrupt("dictionary count mismatch");
  for (const auto& D : mdl.dictionaries) {
    if (D.rows() != static_cast<Eigen::Index>(mdl.K) ||
        D.cols() != static_cast<Eigen::Index>(mdl.d))
      corrupt("dictionary shape mismatch");
    if (!D.allFinite()) corrupt("non-finite dictionary entry");
  }

  if (mdl.table.clusters_per_class != mdl.T) corrupt("table cluster count mismatch");
  if (mdl.table.entries.size() != std::size_t(mdl.q()) * mdl.T)
    corrupt("hash table entry count mismatch");
  const std::size_t words = (mdl.bloom.bits + 63) / 64;
  for (const auto& entry : mdl.table.entries) {
    if (entry.label >= mdl.q()) corrupt("entry label out of range");
    if (entry.key.bits != mdl.bloom.bits || entry.key.words.size() != words)
      corrupt("entry width mismatch");
  }

  if (mdl.direct.slots.size() != mdl.qd()) corrupt("direct table size mismatch");
  if (mdl.direct.perm_seed != mdl.permutation_seed) corrupt("permutation seed mismatch");
  for (std::uint16_t slot : mdl.direct.slots)
    if (slot != kEmptySlot && slot >= mdl.q()) corrupt("slot label out of range");
}

}  // namespace

void save_model(const ModelFile& model, const std::string& path) {
  Writer w;
  w.bytes(kMagic, sizeof kMagic);
  w.u32(kVersion);
  w.u32(model.sample_rate);
  w.u32(model.fft_size);
  w.f64(model.frame_s);
  w.f64(model.overlap);
  w.u8(model.log_compress ? 1 : 0);
  w.u32(model.W);
  w.u32(model.m);
  w.u32(model.K);
  w.u32(model.Z);
  w.u32(model.bloom.bits);
  w.u32(model.T);
  w.u32(model.q());
  w.u32(model.d);
  w.u64(model.projection_seed);
  w.u64(model.permutation_seed);
  w.u32(static_cast<std::uint32_t>(model.bloom.family.size()));
  for (const auto& [algo, seed] : model.bloom.family) {
    w.u8(static_cast<std::uint8_t>(algo));
    w.u64(seed);
  }
  for (const auto& label : model.labels) {
    w.u32(static_cast<std::uint32_t>(label.size()));
    w.bytes(label.data(), label.size());
  }
  for (const auto& D : model.dictionaries) {
    for (Eigen::Index r = 0; r < D.rows(); ++r)
      for (Eigen::Index c = 0; c < D.cols(); ++c) w.f64(D(r, c));
  }
  w.u32(static_cast<std::uint32_t>(model.table.entries.size()));
  for (const auto& entry : model.table.entries) {
    w.u16(entry.label);
    for (std::uint64_t word : entry.key.words) w.u64(word);
  }
  w.u32(static_cast<std::uint32_t>(model.direct.slots.size()));
  for (std::uint16_t slot : model.direct.slots) w.u16(slot);

  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) throw DataError("cannot write model file: " + path);
  const std::size_t n = std::fwrite(w.str().data(), 1, w.str().size(), f);
  const bool ok = (n == w.str().size()) && (std::fclose(f) == 0);
  if (!ok) throw DataError("cannot write model file: " + path);
}

ModelFile load_model(const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "rb");
  if (!f) throw ModelFormatError("cannot open model file: " + path);
  std::string data;
  char chunk[65536];
  std::size_t got;
  while ((got = std::fread(chunk, 1, sizeof chunk, f)) > 0) data.append(chunk, got);
  std::fclose(f);

  Reader r(std::move(data));
  const std::string magic = r.bytes(sizeof kMagic);
  if (std::memcmp(magic.data(), kMagic, sizeof kMagic) != 0)
    throw ModelFormatError("bad magic");
  const std::uint32_t version = r.u32();
  if (version != kVersion) throw ModelFormatError("unsupported model format version");

  ModelFile mdl;
  mdl.sample_rate = r.u32();
  mdl.fft_size = r.u32();
  mdl.frame_s = r.f64();
  mdl.overlap = r.f64();
  mdl.log_compress = r.u8() != 0;
  mdl.W = r.u32();
  mdl.m = r.u32();
  mdl.K = r.u32();
  mdl.Z = r.u32();
  mdl.bloom.bits = r.u32();
  mdl.T = r.u32();
  const std::uint32_t q = r.u32();
  mdl.d = r.u32();
  mdl.projection_seed = r.u64();
  mdl.permutation_seed = r.u64();
  const std::uint32_t family = r.u32();
  if (family == 0 || family > 16) corrupt("implausible hash family size");
  for (std::uint32_t i = 0; i < family; ++i) {
    const std::uint8_t algo = r.u8();
    const std::uint64_t seed = r.u64();
    if (algo > 1) corrupt("unknown hash algorithm");
    mdl.bloom.family.emplace_back(static_cast<HashAlgo>(algo), seed);
  }
  if (q == 0 || q >= kEmptySlot) corrupt("implausible class count");
  for (std::uint32_t c = 0; c < q; ++c) {
    const std::uint32_t len = r.u32();
    if (len > 4096) corrupt("implausible label length");
    mdl.labels.push_back(r.bytes(len));
  }
  if (mdl.K == 0 || mdl.d == 0 || std::uint64_t(mdl.K) * mdl.d > (1u << 28))
    corrupt("implausible dictionary shape");
  for (std::uint32_t c = 0; c < q; ++c) {
    Eigen::MatrixXd D(mdl.K, mdl.d);
    for (std::uint32_t row = 0; row < mdl.K; ++row)
      for (std::uint32_t col = 0; col < mdl.d; ++col) D(row, col) = r.f64();
    mdl.dictionaries.push_back(std::move(D));
  }
  mdl.table.clusters_per_class = mdl.T;
  const std::uint32_t entries = r.u32();
  if (mdl.bloom.bits == 0 || (mdl.bloom.bits & (mdl.bloom.bits - 1)) != 0)
    corrupt("code width not a power of two");
  const std::size_t words = (mdl.bloom.bits + 63) / 64;
  if (std::uint64_t(entries) * words > (1u << 28)) corrupt("implausible table size");
  for (std::uint32_t e = 0; e < entries; ++e) {
    HashTableEntry entry;
    entry.label = r.u16();
    entry.key.bits = mdl.bloom.bits;
    entry.key.words.resize(words);
    for (std::size_t wd = 0; wd < words; ++wd) entry.key.words[wd] = r.u64();
    mdl.table.entries.push_back(std::move(entry));
  }
  const std::uint32_t slots = r.u32();
  if (slots > (1u << 28)) corrupt("implausible direct table size");
  mdl.direct.slots.resize(slots);
  for (std::uint32_t s = 0; s < slots; ++s) mdl.direct.slots[s] = r.u16();
  mdl.direct.perm_seed = mdl.permutation_seed;
  if (!r.exhausted()) corrupt("trailing bytes");

  validate(mdl);
  return mdl;
}

ProjectionMatrix model_projection(const ModelFile& model) {
  return make_projection(model.projection_seed, model.K, model.W, model.m);
}

MinHashPermutation model_permutation(const ModelFile& model) {
  return make_permutation(model.permutation_seed, model.qd());
}

ConcatenatedDictionary model_dictionary(const ModelFile& model) {
  std::vector<ArchetypalDictionary> dicts;
  dicts.reserve(model.labels.size());
  for (std::size_t c = 0; c < model.labels.size(); ++c) {
    ArchetypalDictionary dict;
    dict.D = model.dictionaries[c];
    dict.class_label = model.labels[c];
    dict.d = model.d;
    dicts.push_back(std::move(dict));
  }
  return ConcatenatedDictionary(dicts);
}

}  // namespace convhash
