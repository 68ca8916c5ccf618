#ifndef CONVHASH_HASHING_HPP
#define CONVHASH_HASHING_HPP

#include <cstddef>
#include <cstdint>

namespace convhash {

enum class HashAlgo : std::uint8_t { murmur3 = 0, spooky = 1 };

/// MurmurHash3 x64_128, low 64 bits of the digest. h1/h2 both start at
/// `seed`; for seeds below 2^32 this matches the reference implementation.
std::uint64_t murmur3_x64_128_low(const void* data, std::size_t len, std::uint64_t seed);

/// SpookyHash V2 short form (messages under 192 bytes), first output word.
/// Matches SpookyHash::Hash64 for such messages (both lanes seeded alike).
std::uint64_t spooky_short_64(const void* data, std::size_t len, std::uint64_t seed);

/// Digest of one effective-set element, serialized as 4 little-endian bytes.
std::uint64_t hash_element(HashAlgo algo, std::uint32_t element, std::uint64_t seed);

}  // namespace convhash

#endif  // CONVHASH_HASHING_HPP
