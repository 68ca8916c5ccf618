#include "convhash/wav.hpp"

#include <cstring>
#include <filesystem>
#include <fstream>

#include "convhash/common.hpp"

namespace convhash {

namespace {

std::uint32_t read_u32le(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | static_cast<std::uint32_t>(p[1]) << 8 |
         static_cast<std::uint32_t>(p[2]) << 16 | static_cast<std::uint32_t>(p[3]) << 24;
}

std::uint16_t read_u16le(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | p[1] << 8);
}

void put_u32le(std::ofstream& out, std::uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                        static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
  out.write(reinterpret_cast<const char*>(b), 4);
}

void put_u16le(std::ofstream& out, std::uint16_t v) {
  unsigned char b[2] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8)};
  out.write(reinterpret_cast<const char*>(b), 2);
}

}  // namespace

AudioClip read_wav(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open audio file: " + path);

  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  if (bytes.size() < 44 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
    throw DataError("not a WAV file: " + path);
  }

  AudioClip clip;
  clip.id = std::filesystem::path(path).stem().string();

  bool have_fmt = false;
  std::uint16_t channels = 0;
  std::uint16_t bits_per_sample = 0;

  // Walk the chunk list; chunks are word-aligned.
  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const char* tag = reinterpret_cast<const char*>(bytes.data() + pos);
    const std::uint32_t chunk_size = read_u32le(bytes.data() + pos + 4);
    const std::size_t body = pos + 8;
    if (body + chunk_size > bytes.size()) throw DataError("truncated WAV file: " + path);

    if (std::memcmp(tag, "fmt ", 4) == 0) {
      if (chunk_size < 16) throw DataError("malformed fmt chunk: " + path);
      const std::uint16_t format = read_u16le(bytes.data() + body);
      channels = read_u16le(bytes.data() + body + 2);
      clip.sample_rate = read_u32le(bytes.data() + body + 4);
      bits_per_sample = read_u16le(bytes.data() + body + 14);
      if (format != 1) throw DataError("unsupported WAV encoding (PCM only): " + path);
      have_fmt = true;
    } else if (std::memcmp(tag, "data", 4) == 0) {
      if (!have_fmt) throw DataError("WAV data chunk precedes fmt chunk: " + path);
      if (channels != 1) throw DataError("unsupported channel count");
      if (bits_per_sample != 16) throw DataError("unsupported sample width (16-bit only): " + path);
      const std::size_t n = chunk_size / 2;
      clip.samples.resize(n);
      for (std::size_t i = 0; i < n; ++i) {
        const std::uint16_t u = read_u16le(bytes.data() + body + 2 * i);
        clip.samples[i] = static_cast<std::int16_t>(u);
      }
      return clip;
    }
    pos = body + chunk_size + (chunk_size & 1);
  }
  throw DataError("WAV file has no data chunk: " + path);
}

void write_wav(const std::string& path, const std::vector<std::int16_t>& samples,
               std::uint32_t sample_rate) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write audio file: " + path);

  const std::uint32_t data_bytes = static_cast<std::uint32_t>(samples.size() * 2);
  out.write("RIFF", 4);
  put_u32le(out, 36 + data_bytes);
  out.write("WAVE", 4);
  out.write("fmt ", 4);
  put_u32le(out, 16);
  put_u16le(out, 1);  // PCM
  put_u16le(out, 1);  // mono
  put_u32le(out, sample_rate);
  put_u32le(out, sample_rate * 2);
  put_u16le(out, 2);
  put_u16le(out, 16);
  out.write("data", 4);
  put_u32le(out, data_bytes);
  for (std::int16_t s : samples) put_u16le(out, static_cast<std::uint16_t>(s));
  if (!out) throw DataError("failed writing audio file: " + path);
}

}  // namespace convhash
