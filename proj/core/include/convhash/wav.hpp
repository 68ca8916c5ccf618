#ifndef CONVHASH_WAV_HPP
#define CONVHASH_WAV_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace convhash {

/// One mono recording, 16-bit PCM samples.
struct AudioClip {
  std::vector<std::int16_t> samples;
  std::uint32_t sample_rate = 0;
  std::string id;

  double duration_s() const {
    return sample_rate ? static_cast<double>(samples.size()) / sample_rate : 0.0;
  }
};

/// Reads a RIFF/WAVE file holding 16-bit PCM. The clip id is the file stem.
/// Throws DataError for missing files, non-PCM encodings, or multi-channel
/// audio ("unsupported channel count").
AudioClip read_wav(const std::string& path);

/// Writes samples as a canonical 16-bit mono PCM WAV.
void write_wav(const std::string& path, const std::vector<std::int16_t>& samples,
               std::uint32_t sample_rate);

}  // namespace convhash

#endif  // CONVHASH_WAV_HPP
