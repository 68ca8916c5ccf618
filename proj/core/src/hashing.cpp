#include "convhash/hashing.hpp"

#include <cassert>
#include <cstring>

namespace convhash {
namespace {

inline std::uint64_t rotl64(std::uint64_t x, int r) { return (x << r) | (x >> (64 - r)); }

inline std::uint64_t load_le64(const std::uint8_t* p) {
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | p[i];
  return v;
}

inline std::uint64_t load_le32(const std::uint8_t* p) {
  return std::uint64_t(p[0]) | std::uint64_t(p[1]) << 8 | std::uint64_t(p[2]) << 16 |
         std::uint64_t(p[3]) << 24;
}

inline std::uint64_t fmix64(std::uint64_t k) {
  k ^= k >> 33;
  k *= 0xff51afd7ed558ccdULL;
  k ^= k >> 33;
  k *= 0xc4ceb9fe1a85ec53ULL;
  k ^= k >> 33;
  return k;
}

}  // namespace

std::uint64_t murmur3_x64_128_low(const void* data, std::size_t len, std::uint64_t seed) {
  const auto* bytes = static_cast<const std::uint8_t*>(data);
  const std::size_t nblocks = len / 16;

  std::uint64_t h1 = seed;
  std::uint64_t h2 = seed;
  const std::uint64_t c1 = 0x87c37b91114253d5ULL;
  const std::uint64_t c2 = 0x4cf5ad432745937fULL;

  for (std::size_t i = 0; i < nblocks; ++i) {
    std::uint64_t k1 = load_le64(bytes + i * 16);
    std::uint64_t k2 = load_le64(bytes + i * 16 + 8);

    k1 *= c1;
    k1 = rotl64(k1, 31);
    k1 *= c2;
    h1 ^= k1;
    h1 = rotl64(h1, 27);
    h1 += h2;
    h1 = h1 * 5 + 0x52dce729ULL;

    k2 *= c2;
    k2 = rotl64(k2, 33);
    k2 *= c1;
    h2 ^= k2;
    h2 = rotl64(h2, 31);
    h2 += h1;
    h2 = h2 * 5 + 0x38495ab5ULL;
  }

  const std::uint8_t* tail = bytes + nblocks * 16;
  std::uint64_t k1 = 0;
  std::uint64_t k2 = 0;
  switch (len & 15) {
    case 15: k2 ^= std::uint64_t(tail[14]) << 48; [[fallthrough]];
    case 14: k2 ^= std::uint64_t(tail[13]) << 40; [[fallthrough]];
    case 13: k2 ^= std::uint64_t(tail[12]) << 32; [[fallthrough]];
    case 12: k2 ^= std::uint64_t(tail[11]) << 24; [[fallthrough]];
    case 11: k2 ^= std::uint64_t(tail[10]) << 16; [[fallthrough]];
    case 10: k2 ^= std::uint64_t(tail[9]) << 8; [[fallthrough]];
    case 9:
      k2 ^= std::uint64_t(tail[8]);
      k2 *= c2;
      k2 = rotl64(k2, 33);
      k2 *= c1;
      h2 ^= k2;
      [[fallthrough]];
    case 8: k1 ^= std::uint64_t(tail[7]) << 56; [[fallthrough]];
    case 7: k1 ^= std::uint64_t(tail[6]) << 48; [[fallthrough]];
    case 6: k1 ^= std::uint64_t(tail[5]) << 40; [[fallthrough]];
    case 5: k1 ^= std::uint64_t(tail[4]) << 32; [[fallthrough]];
    case 4: k1 ^= std::uint64_t(tail[3]) << 24; [[fallthrough]];
    case 3: k1 ^= std::uint64_t(tail[2]) << 16; [[fallthrough]];
    case 2: k1 ^= std::uint64_t(tail[1]) << 8; [[fallthrough]];
    case 1:
      k1 ^= std::uint64_t(tail[0]);
      k1 *= c1;
      k1 = rotl64(k1, 31);
      k1 *= c2;
      h1 ^= k1;
      break;
    default: break;
  }

  h1 ^= std::uint64_t(len);
  h2 ^= std::uint64_t(len);
  h1 += h2;
  h2 += h1;
  h1 = fmix64(h1);
  h2 = fmix64(h2);
  h1 += h2;
  return h1;
}

namespace {

constexpr std::uint64_t kSpookyConst = 0xdeadbeefdeadbeefULL;

inline void short_mix(std::uint64_t& h0, std::uint64_t& h1, std::uint64_t& h2,
                      std::uint64_t& h3) {
  h2 = rotl64(h2, 50);
  h2 += h3;
  h0 ^= h2;
  h3 = rotl64(h3, 52);
  h3 += h0;
  h1 ^= h3;
  h0 = rotl64(h0, 30);
  h0 += h1;
  h2 ^= h0;
  h1 = rotl64(h1, 41);
  h1 += h2;
  h3 ^= h1;
  h2 = rotl64(h2, 54);
  h2 += h3;
  h0 ^= h2;
  h3 = rotl64(h3, 48);
  h3 += h0;
  h1 ^= h3;
  h0 = rotl64(h0, 38);
  h0 += h1;
  h2 ^= h0;
  h1 = rotl64(h1, 37);
  h1 += h2;
  h3 ^= h1;
  h2 = rotl64(h2, 62);
  h2 += h3;
  h0 ^= h2;
  h3 = rotl64(h3, 34);
  h3 += h0;
  h1 ^= h3;
  h0 = rotl64(h0, 5);
  h0 += h1;
  h2 ^= h0;
  h1 = rotl64(h1, 36);
  h1 += h2;
  h3 ^= h1;
}

inline void short_end(std::uint64_t& h0, std::uint64_t& h1, std::uint64_t& h2,
                      std::uint64_t& h3) {
  h3 ^= h2;
  h2 = rotl64(h2, 15);
  h3 += h2;
  h0 ^= h3;
  h3 = rotl64(h3, 52);
  h0 += h3;
  h1 ^= h0;
  h0 = rotl64(h0, 26);
  h1 += h0;
  h2 ^= h1;
  h1 = rotl64(h1, 51);
  h2 += h1;
  h3 ^= h2;
  h2 = rotl64(h2, 28);
  h3 += h2;
  h0 ^= h3;
  h3 = rotl64(h3, 9);
  h0 += h3;
  h1 ^= h0;
  h0 = rotl64(h0, 47);
  h1 += h0;
  h2 ^= h1;
  h1 = rotl64(h1, 54);
  h2 += h1;
  h3 ^= h2;
  h2 = rotl64(h2, 32);
  h3 += h2;
  h0 ^= h3;
  h3 = rotl64(h3, 25);
  h0 += h3;
  h1 ^= h0;
  h0 = rotl64(h0, 63);
  h1 += h0;
}

}  // namespace

std::uint64_t spooky_short_64(const void* data, std::size_t len, std::uint64_t seed) {
  assert(len < 192 && "short form covers messages under 192 bytes");
  const auto* p = static_cast<const std::uint8_t*>(data);

  std::size_t remainder = len % 32;
  std::uint64_t a = seed;
  std::uint64_t b = seed;
  std::uint64_t c = kSpookyConst;
  std::uint64_t d = kSpookyConst;

  if (len > 15) {
    const std::size_t blocks = len / 32;
    for (std::size_t i = 0; i < blocks; ++i, p += 32) {
      c += load_le64(p);
      d += load_le64(p + 8);
      short_mix(a, b, c, d);
      a += load_le64(p + 16);
      b += load_le64(p + 24);
    }
    if (remainder >= 16) {
      c += load_le64(p);
      d += load_le64(p + 8);
      short_mix(a, b, c, d);
      p += 16;
      remainder -= 16;
    }
  }

  d += std::uint64_t(len) << 56;
  switch (remainder) {
    case 15: d += std::uint64_t(p[14]) << 48; [[fallthrough]];
    case 14: d += std::uint64_t(p[13]) << 40; [[fallthrough]];
    case 13: d += std::uint64_t(p[12]) << 32; [[fallthrough]];
    case 12:
      d += load_le32(p + 8);
      c += load_le64(p);
      break;
    case 11: d += std::uint64_t(p[10]) << 16; [[fallthrough]];
    case 10: d += std::uint64_t(p[9]) << 8; [[fallthrough]];
    case 9: d += std::uint64_t(p[8]); [[fallthrough]];
    case 8:
      c += load_le64(p);
      break;
    case 7: c += std::uint64_t(p[6]) << 48; [[fallthrough]];
    case 6: c += std::uint64_t(p[5]) << 40; [[fallthrough]];
    case 5: c += std::uint64_t(p[4]) << 32; [[fallthrough]];
    case 4:
      c += load_le32(p);
      break;
    case 3: c += std::uint64_t(p[2]) << 16; [[fallthrough]];
    case 2: c += std::uint64_t(p[1]) << 8; [[fallthrough]];
    case 1:
      c += std::uint64_t(p[0]);
      break;
    case 0:
      c += kSpookyConst;
      d += kSpookyConst;
      break;
  }
  short_end(a, b, c, d);
  return a;
}

std::uint64_t hash_element(HashAlgo algo, std::uint32_t element, std::uint64_t seed) {
  std::uint8_t bytes[4] = {
      static_cast<std::uint8_t>(element & 0xff),
      static_cast<std::uint8_t>((element >> 8) & 0xff),
      static_cast<std::uint8_t>((element >> 16) & 0xff),
      static_cast<std::uint8_t>((element >> 24) & 0xff),
  };
  switch (algo) {
    case HashAlgo::murmur3:
      return murmur3_x64_128_low(bytes, sizeof bytes, seed);
    case HashAlgo::spooky:
      return spooky_short_64(bytes, sizeof bytes, seed);
  }
  return 0;  // unreachable
}

}  // namespace convhash
