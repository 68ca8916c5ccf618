"""Reference MurmurHash3 x64_128, written from the published algorithm.

Used to generate golden digests for the C++ implementation. Returns the
full (h1, h2) pair; the library consumes the low word h1. Seeds are 64-bit
(h1 = h2 = seed), which coincides with the canonical 32-bit-seed routine
whenever seed < 2**32.
"""

MASK = (1 << 64) - 1
C1 = 0x87C37B91114253D5
C2 = 0x4CF5AD432745937F


def _rotl(x, r):
    return ((x << r) | (x >> (64 - r))) & MASK


def _fmix(k):
    k ^= k >> 33
    k = (k * 0xFF51AFD7ED558CCD) & MASK
    k ^= k >> 33
    k = (k * 0xC4CEB9FE1A85EC53) & MASK
    k ^= k >> 33
    return k


def murmur3_x64_128(data: bytes, seed: int):
    h1 = seed & MASK
    h2 = seed & MASK
    nblocks = len(data) // 16

    for i in range(nblocks):
        k1 = int.from_bytes(data[i * 16 : i * 16 + 8], "little")
        k2 = int.from_bytes(data[i * 16 + 8 : i * 16 + 16], "little")

        k1 = (k1 * C1) & MASK
        k1 = _rotl(k1, 31)
        k1 = (k1 * C2) & MASK
        h1 ^= k1
        h1 = _rotl(h1, 27)
        h1 = (h1 + h2) & MASK
        h1 = (h1 * 5 + 0x52DCE729) & MASK

        k2 = (k2 * C2) & MASK
        k2 = _rotl(k2, 33)
        k2 = (k2 * C1) & MASK
        h2 ^= k2
        h2 = _rotl(h2, 31)
        h2 = (h2 + h1) & MASK
        h2 = (h2 * 5 + 0x38495AB5) & MASK

    tail = data[nblocks * 16 :]
    k1 = 0
    k2 = 0
    for i in range(len(tail) - 1, 7, -1):  # bytes 8..15 fold into k2
        k2 ^= tail[i] << ((i - 8) * 8)
    for i in range(min(len(tail), 8) - 1, -1, -1):  # bytes 0..7 fold into k1
        k1 ^= tail[i] << (i * 8)
    if len(tail) > 8:
        k2 = (k2 * C2) & MASK
        k2 = _rotl(k2, 33)
        k2 = (k2 * C1) & MASK
        h2 ^= k2
    if len(tail) > 0:
        k1 = (k1 * C1) & MASK
        k1 = _rotl(k1, 31)
        k1 = (k1 * C2) & MASK
        h1 ^= k1

    h1 ^= len(data)
    h2 ^= len(data)
    h1 = (h1 + h2) & MASK
    h2 = (h2 + h1) & MASK
    h1 = _fmix(h1)
    h2 = _fmix(h2)
    h1 = (h1 + h2) & MASK
    h2 = (h2 + h1) & MASK
    return h1, h2


if __name__ == "__main__":
    assert murmur3_x64_128(b"", 0) == (0, 0)
    print("murmur3_ref self-check ok")
