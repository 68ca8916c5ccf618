#ifndef CONVHASH_SYNTH_HPP
#define CONVHASH_SYNTH_HPP

#include <cstdint>
#include <string>

namespace convhash {

struct SynthConfig {
  std::uint32_t classes = 10;
  std::uint32_t vocs_per_class = 40;
  std::uint64_t seed = 0;
  std::string out_dir;
  std::uint32_t sample_rate = 44100;
  std::uint32_t vocs_per_recording = 5;
};

/// Disjoint per-class carrier band inside [1500, 21000] Hz (lower 80% of
/// each class's slice; the rest is guard band).
struct Band {
  double lo_hz = 0.0;
  double hi_hz = 0.0;
};
Band carrier_band(std::uint32_t cls, std::uint32_t class_count);

/// Writes WAV recordings of frequency-modulated tone complexes over a noise
/// floor, one annotations CSV per recording, and a manifest; classes are
/// separable by construction (disjoint carrier bands). Deterministic given
/// the seed. Returns the manifest path.
std::string generate_corpus(const SynthConfig& cfg);

}  // namespace convhash

#endif  // CONVHASH_SYNTH_HPP
