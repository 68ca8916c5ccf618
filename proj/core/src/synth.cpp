#include "convhash/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <stdexcept>
#include <vector>

#include "convhash/common.hpp"
#include "convhash/wav.hpp"

namespace convhash {
namespace {

constexpr double kSpectrumLo = 1500.0;
constexpr double kSpectrumHi = 21000.0;
constexpr double kTwoPi = 6.283185307179586476925286766559;

struct Tone {
  double base_hz = 0.0;
  double amp = 0.0;
  double phase = 0.0;
};

}  // namespace

Band carrier_band(std::uint32_t cls, std::uint32_t class_count) {
  if (class_count < 2) throw std::invalid_argument("need at least 2 classes");
  if (cls >= class_count) throw std::invalid_argument("class index out of range");
  const double slice = (kSpectrumHi - kSpectrumLo) / class_count;
  const double lo = kSpectrumLo + cls * slice;
  return {lo, lo + 0.8 * slice};
}

std::string generate_corpus(const SynthConfig& cfg) {
  if (cfg.classes < 2) throw std::invalid_argument("need at least 2 classes");
  if (cfg.vocs_per_class == 0) throw std::invalid_argument("need at least one vocalization");
  if (cfg.vocs_per_recording == 0) throw std::invalid_argument("need vocalizations per recording");
  if (cfg.out_dir.empty()) throw std::invalid_argument("output directory required");

  namespace fs = std::filesystem;
  fs::create_directories(cfg.out_dir);
  std::mt19937_64 rng(derive_seed(cfg.seed, "synth"));

  const double sr = cfg.sample_rate;
  const double slot_s = 1.25;
  const double lead_s = 0.35;

  std::ofstream manifest(fs::path(cfg.out_dir) / "manifest.csv");
  if (!manifest) throw DataError("cannot write manifest in " + cfg.out_dir);
  manifest << "path,label,annotations_path\n";

  for (std::uint32_t cls = 0; cls < cfg.classes; ++cls) {
    char label[32];
    std::snprintf(label, sizeof label, "species_%03u", cls);
    const Band band = carrier_band(cls, cfg.classes);
    const double width = band.hi_hz - band.lo_hz;
    // Class-specific vibrato; depth stays well inside the guard band.
    const double fm_rate = 3.0 + 5.0 * cls / std::max(1u, cfg.classes - 1);
    const double fm_depth = 0.04 * width;

    std::uint32_t voc_done = 0;
    std::uint32_t rec_idx = 0;
    while (voc_done < cfg.vocs_per_class) {
      const std::uint32_t in_rec =
          std::min(cfg.vocs_per_recording, cfg.vocs_per_class - voc_done);
      const double duration = lead_s + cfg.vocs_per_recording * slot_s + 0.25;
      std::vector<std::int16_t> samples(static_cast<std::size_t>(duration * sr));
      for (auto& s : samples) {
        const double noise = 0.006 * (2.0 * uniform_unit(rng) - 1.0);
        s = static_cast<std::int16_t>(std::lround(noise * 32767.0));
      }

      char stem[64];
      std::snprintf(stem, sizeof stem, "%s_rec_%03u", label, rec_idx);
      std::ofstream ann(fs::path(cfg.out_dir) / (std::string(stem) + ".csv"));
      if (!ann) throw DataError("cannot write annotations in " + cfg.out_dir);
      ann << "recording_id,onset_s,offset_s\n";

      for (std::uint32_t v = 0; v < in_rec; ++v) {
        const double onset = lead_s + v * slot_s;
        const double dur = 0.6 + 0.3 * uniform_unit(rng);
        Tone tones[3];
        const double rel[3] = {0.15, 0.45, 0.75};
        const double amp[3] = {0.28, 0.20, 0.14};
        for (int t = 0; t < 3; ++t) {
          const double jitter = 0.05 * (2.0 * uniform_unit(rng) - 1.0);
          tones[t].base_hz = band.lo_hz + (rel[t] + jitter) * width;
          tones[t].amp = amp[t];
          tones[t].phase = kTwoPi * uniform_unit(rng);
        }
        const double fm_phase = kTwoPi * uniform_unit(rng);

        const auto first = static_cast<std::size_t>(onset * sr);
        const auto count = static_cast<std::size_t>(dur * sr);
        const double ramp_s = 0.04;
        for (std::size_t k = 0; k < count && first + k < samples.size(); ++k) {
          const double t = k / sr;
          double env = 1.0;
          if (t < ramp_s) env = 0.5 - 0.5 * std::cos(kTwoPi * 0.5 * t / ramp_s);
          const double tail = dur - t;
          if (tail < ramp_s) env = std::min(env, 0.5 - 0.5 * std::cos(kTwoPi * 0.5 * tail / ramp_s));
          double val = 0.0;
          for (const Tone& tone : tones) {
            // Phase of an FM tone: integral of base + depth*sin(rate).
            const double inst = tone.base_hz * t -
                                fm_depth / (kTwoPi * fm_rate) *
                                    (std::cos(kTwoPi * fm_rate * t + fm_phase) - std::cos(fm_phase));
            val += tone.amp * std::sin(kTwoPi * inst + tone.phase);
          }
          const double mixed = samples[first + k] / 32767.0 + env * val;
          samples[first + k] =
              static_cast<std::int16_t>(std::lround(std::clamp(mixed, -1.0, 1.0) * 32767.0));
        }

        char row[128];
        std::snprintf(row, sizeof row, "%s,%.6f,%.6f\n", stem, onset, onset + dur);
        ann << row;
      }
      ann.close();

      write_wav((fs::path(cfg.out_dir) / (std::string(stem) + ".wav")).string(), samples,
                cfg.sample_rate);
      manifest << stem << ".wav," << label << ',' << stem << ".csv\n";
      voc_done += in_rec;
      ++rec_idx;
    }
  }
  manifest.close();
  return (fs::path(cfg.out_dir) / "manifest.csv").string();
}

}  // namespace convhash
