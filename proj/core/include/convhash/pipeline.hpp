#ifndef CONVHASH_PIPELINE_HPP
#define CONVHASH_PIPELINE_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "convhash/archetypes.hpp"
#include "convhash/dataset.hpp"
#include "convhash/frontend.hpp"
#include "convhash/index.hpp"
#include "convhash/model.hpp"

namespace convhash {

/// Full parameter set for training; one master seed feeds every stage
/// through tagged derivation, so a config is reproducible by value.
struct TrainConfig {
  std::uint32_t sample_rate = 44100;
  std::uint32_t fft_size = 512;
  double frame_s = 0.020;
  double overlap = 0.5;
  bool log_compress = false;
  std::uint32_t W = 5;
  std::uint32_t K = 500;
  std::uint32_t d = 25;
  std::uint32_t Z = 4;
  std::uint32_t bits = 1024;
  std::uint32_t T = 10;
  std::uint32_t aa_max_iters = 100;
  double aa_tol = 1e-6;
  std::uint64_t seed = 0;
  double energy_threshold = 2.0;  // fallback segmenter, x median frame energy
  double energy_min_dur_s = 0.05;
};

enum class Mode { full, minhash };

Mode parse_mode(const std::string& name);
const char* mode_name(Mode mode);

/// One annotated vocalization with its extracted CSF columns.
struct Vocalization {
  std::string recording_id;
  Segment span{};
  std::uint16_t label = 0;
  CsfMatrix csfs;
};

/// A manifest, ingested: every vocalization's CSFs plus the label table.
struct Corpus {
  std::vector<std::string> labels;  // sorted lexicographically
  std::vector<Vocalization> vocalizations;
  std::size_t dropped_empty = 0;  // annotated segments yielding no CSFs
};

ProjectionMatrix projection_for(const TrainConfig& cfg);
Corpus load_corpus(const std::string& manifest_path, const TrainConfig& cfg);

struct ClassSummary {
  std::string label;
  std::size_t csf_count = 0;
  std::size_t iterations = 0;
  double initial_objective = 0.0;
  double final_objective = 0.0;
};
struct TrainReport {
  std::vector<ClassSummary> classes;
  double seconds = 0.0;
};

/// Trains on the selected vocalizations (all of them in the two-argument
/// form): frontend features are taken from the corpus, then per-class AA,
/// batch encoding, Bloom codes, K-medoids table, and the direct table.
ModelFile train_model(const Corpus& corpus, const std::vector<std::uint32_t>& voc_indices,
                      const TrainConfig& cfg, TrainReport* report = nullptr);
ModelFile train_model(const Corpus& corpus, const TrainConfig& cfg,
                      TrainReport* report = nullptr);

/// Query-side companions of a ModelFile, regenerated once and shared.
struct RuntimeModel {
  ProjectionMatrix proj;
  ConcatenatedDictionary df;
  MinHashPermutation perm;

  explicit RuntimeModel(const ModelFile& model)
      : proj(model_projection(model)),
        df(model_dictionary(model)),
        perm(model_permutation(model)) {}
};

/// Code-space classification of one vocalization, wall-clock timed from
/// ConvexCodes onward (Bloom/scan/vote or min-hash/lookup/vote); the
/// shared frontend and convex-coding stages are outside the clock.
struct VocalizationOutcome {
  VocalizationPrediction pred;
  std::uint32_t fallbacks = 0;
  double seconds = 0.0;
};
VocalizationOutcome classify_codes(const std::vector<ConvexCode>& codes, const ModelFile& model,
                                   const RuntimeModel& rt, Mode mode,
                                   ClassifyStats* stats = nullptr);

struct PredictionRow {
  std::string recording_id;
  double onset_s = 0.0;
  double offset_s = 0.0;
  std::string label;
  double vote_fraction = 0.0;
  std::string mode;
  std::uint32_t fallbacks = 0;
};

/// One row per annotated vocalization that yields at least one CSF. A clip
/// shorter than one frame yields no rows.
std::vector<PredictionRow> classify_recording(const ModelFile& model, const RuntimeModel& rt,
                                              const AudioClip& clip, const SegmentList& segments,
                                              Mode mode, ClassifyStats* stats = nullptr);

std::string format_predictions_csv(const std::vector<PredictionRow>& rows);

struct EvalReport {
  std::uint32_t folds = 0;
  std::vector<std::string> labels;
  std::vector<double> fold_accuracy_full;
  std::vector<double> fold_accuracy_minhash;
  double mean_accuracy_full = 0.0;
  double mean_accuracy_minhash = 0.0;
  std::vector<double> per_class_accuracy_full;
  std::vector<double> per_class_accuracy_minhash;
  std::vector<std::vector<std::uint32_t>> confusion_full;     // [true][predicted]
  std::vector<std::vector<std::uint32_t>> confusion_minhash;  // [true][predicted]
  double mean_latency_full_s = 0.0;     // per vocalization, classification only
  double mean_latency_minhash_s = 0.0;  // per vocalization, classification only
  std::uint64_t test_vocalizations = 0;
  std::uint64_t minhash_direct_hits = 0;
  std::uint64_t minhash_fallbacks = 0;
};

/// Vocalization-level cross validation, fold unit = vocalization. Per class,
/// a seeded shuffle is cut into `folds` equal chunks; fold i trains on chunk
/// i and tests on chunk (i+1) mod folds, so train fraction is 1/folds and
/// every vocalization lands in exactly one test fold. holdout_fraction
/// removes a seeded per-class slice entirely before folding.
EvalReport run_evaluation(const Corpus& corpus, const TrainConfig& cfg, std::uint32_t folds,
                          double holdout_fraction = 0.0);

std::string format_eval_report(const EvalReport& report);

struct BenchReport {
  std::vector<double> full_run_mean_s;     // per run, mean per-vocalization latency
  std::vector<double> minhash_run_mean_s;  // per run, mean per-vocalization latency
  double full_mean_s = 0.0;
  double minhash_mean_s = 0.0;
  double ratio = 0.0;  // minhash / full
  std::uint64_t vocalizations = 0;
  ClassifyStats full_stats;
  ClassifyStats minhash_stats;
};

/// Repeated timed classification of pre-encoded vocalizations in both modes.
BenchReport run_bench(const ModelFile& model, const RuntimeModel& rt,
                      const std::vector<std::vector<ConvexCode>>& voc_codes, std::uint32_t runs);

std::string format_bench_report(const BenchReport& report);

}  // namespace convhash

#endif  // CONVHASH_PIPELINE_HPP
