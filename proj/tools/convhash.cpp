// convhash: supervised convex-sparse audio hashing for species classification.
#include <CLI11.hpp>
#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include "convhash/common.hpp"
#include "convhash/dataset.hpp"
#include "convhash/model.hpp"
#include "convhash/pipeline.hpp"
#include "convhash/synth.hpp"
#include "convhash/wav.hpp"

namespace {

constexpr int kExitSuccess = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitModelFormat = 3;

struct CommonFlags {
  convhash::TrainConfig cfg;
  double frame_ms = 20.0;
};

void add_train_flags(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--seed", flags.cfg.seed, "Master seed");
  cmd->add_option("--fft", flags.cfg.fft_size, "FFT size (power of two >= 64)")
      ->capture_default_str();
  cmd->add_option("--frame-ms", flags.frame_ms, "Frame length in milliseconds")
      ->capture_default_str();
  cmd->add_option("--overlap", flags.cfg.overlap, "Frame overlap fraction [0,1)")
      ->capture_default_str();
  cmd->add_option("--window", flags.cfg.W, "Context window W (odd)")->capture_default_str();
  cmd->add_option("--proj-dim", flags.cfg.K, "Projected CSF dimension K")->capture_default_str();
  cmd->add_option("--atoms", flags.cfg.d, "Archetypes per class d")->capture_default_str();
  cmd->add_option("--z", flags.cfg.Z, "Effective-set size Z")->capture_default_str();
  cmd->add_option("--bits", flags.cfg.bits, "Conv-code width in bits (power of two)")
      ->capture_default_str();
  cmd->add_option("--medoids", flags.cfg.T, "Medoids per class T")->capture_default_str();
  cmd->add_flag("--log-spectrogram", flags.cfg.log_compress,
                "Use log(1+magnitude) spectrograms");
  cmd->add_option("--aa-iters", flags.cfg.aa_max_iters, "Max dictionary-learning iterations")
      ->capture_default_str();
  cmd->add_option("--aa-tol", flags.cfg.aa_tol, "Dictionary-learning relative tolerance")
      ->capture_default_str();
  cmd->add_option("--energy-threshold", flags.cfg.energy_threshold,
                  "Fallback segmenter: multiple of median frame energy")
      ->capture_default_str();
  cmd->add_option("--energy-min-dur", flags.cfg.energy_min_dur_s,
                  "Fallback segmenter: minimum segment duration (s)")
      ->capture_default_str();
}

void write_text(const std::string& path, const std::string& text) {
  if (path == "-") {
    std::fwrite(text.data(), 1, text.size(), stdout);
    return;
  }
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) throw convhash::DataError("cannot write output file: " + path);
  const std::size_t n = std::fwrite(text.data(), 1, text.size(), f);
  const bool ok = (n == text.size()) && (std::fclose(f) == 0);
  if (!ok) throw convhash::DataError("cannot write output file: " + path);
}

int cmd_train(const std::string& manifest, const CommonFlags& flags, const std::string& out) {
  convhash::TrainConfig cfg = flags.cfg;
  cfg.frame_s = flags.frame_ms / 1000.0;
  const convhash::Corpus corpus = convhash::load_corpus(manifest, cfg);
  convhash::TrainReport report;
  const convhash::ModelFile model = convhash::train_model(corpus, cfg, &report);
  convhash::save_model(model, out);

  std::printf("trained %u classes, %zu vocalizations, qd=%u, %u table entries (%.1fs)\n",
              model.q(), corpus.vocalizations.size(), model.qd(),
              static_cast<unsigned>(model.table.entries.size()), report.seconds);
  for (const auto& cls : report.classes) {
    std::printf("  %s: %zu CSFs, objective %.6g -> %.6g over %zu iterations\n",
                cls.label.c_str(), cls.csf_count, cls.initial_objective, cls.final_objective,
                cls.iterations);
  }
  std::printf("model written to %s\n", out.c_str());
  return kExitSuccess;
}

int cmd_classify(const std::string& model_path, const std::string& audio,
                 const std::string& annotations, const std::string& mode_name,
                 const std::string& out) {
  const convhash::ModelFile model = convhash::load_model(model_path);
  const convhash::RuntimeModel rt(model);
  const convhash::Mode mode = convhash::parse_mode(mode_name);

  const convhash::AudioClip clip = convhash::read_wav(audio);
  const auto frame_len = static_cast<std::size_t>(model.frame_s * model.sample_rate);
  std::vector<convhash::PredictionRow> rows;
  if (clip.samples.size() < frame_len) {
    std::fprintf(stderr, "warning: %s is shorter than one frame; no vocalizations\n",
                 audio.c_str());
  } else {
    convhash::SegmentList segs;
    if (!annotations.empty()) {
      segs = convhash::segments_for(convhash::read_annotations(annotations), clip.id);
    } else {
      const convhash::Spectrogram spec = convhash::compute_spectrogram(
          clip, model.fft_size, model.frame_s, model.overlap, model.log_compress);
      segs = convhash::segment_energy_fallback(spec, 2.0, 0.05);
      if (segs.segments.empty())
        std::fprintf(stderr, "warning: fallback segmenter found no vocalizations in %s\n",
                     audio.c_str());
    }
    rows = convhash::classify_recording(model, rt, clip, segs, mode);
    if (rows.empty())
      std::fprintf(stderr, "warning: no classifiable vocalizations in %s\n", audio.c_str());
  }
  write_text(out, convhash::format_predictions_csv(rows));
  return kExitSuccess;
}

int cmd_evaluate(const std::string& manifest, const CommonFlags& flags, std::uint32_t folds,
                 double holdout, const std::string& out) {
  convhash::TrainConfig cfg = flags.cfg;
  cfg.frame_s = flags.frame_ms / 1000.0;
  const convhash::Corpus corpus = convhash::load_corpus(manifest, cfg);
  const convhash::EvalReport report = convhash::run_evaluation(corpus, cfg, folds, holdout);
  write_text(out, convhash::format_eval_report(report));
  return kExitSuccess;
}

int cmd_synth(const std::string& out_dir, std::uint32_t classes, std::uint32_t vocs,
              std::uint64_t seed) {
  convhash::SynthConfig cfg;
  cfg.out_dir = out_dir;
  cfg.classes = classes;
  cfg.vocs_per_class = vocs;
  cfg.seed = seed;
  const std::string manifest = convhash::generate_corpus(cfg);
  std::printf("wrote %u classes x %u vocalizations\nmanifest: %s\n", classes, vocs,
              manifest.c_str());
  return kExitSuccess;
}

int cmd_bench(const std::string& model_path, const std::string& manifest, std::uint32_t runs,
              const std::string& out) {
  const convhash::ModelFile model = convhash::load_model(model_path);
  const convhash::RuntimeModel rt(model);

  convhash::TrainConfig cfg;
  cfg.sample_rate = model.sample_rate;
  cfg.fft_size = model.fft_size;
  cfg.frame_s = model.frame_s;
  cfg.overlap = model.overlap;
  cfg.log_compress = model.log_compress;
  cfg.W = model.W;
  cfg.K = model.K;
  cfg.seed = model.projection_seed;  // unused for features; projection comes from the model
  const convhash::Corpus corpus = convhash::load_corpus(manifest, cfg);
  if (corpus.vocalizations.empty()) throw convhash::DataError("invalid data: empty corpus");

  std::vector<std::vector<convhash::ConvexCode>> voc_codes;
  voc_codes.reserve(corpus.vocalizations.size());
  for (const auto& voc : corpus.vocalizations)
    voc_codes.push_back(convhash::encode_batch(voc.csfs, rt.df));

  const convhash::BenchReport report = convhash::run_bench(model, rt, voc_codes, runs);
  write_text(out, convhash::format_bench_report(report));
  return kExitSuccess;
}

int cmd_inspect(const std::string& model_path) {
  const convhash::ModelFile m = convhash::load_model(model_path);
  std::printf("format version: 1\n");
  std::printf("sample_rate: %u\nfft_size: %u\nframe_s: %.6f\noverlap: %.3f\n", m.sample_rate,
              m.fft_size, m.frame_s, m.overlap);
  std::printf("log_spectrogram: %s\n", m.log_compress ? "yes" : "no");
  std::printf("W: %u\nm: %u\nK: %u\nZ: %u\nbits: %u\nT: %u\nq: %u\nd: %u\nqd: %u\n", m.W, m.m,
              m.K, m.Z, m.bloom.bits, m.T, m.q(), m.d, m.qd());
  std::printf("projection_seed: %llu\npermutation_seed: %llu\n",
              static_cast<unsigned long long>(m.projection_seed),
              static_cast<unsigned long long>(m.permutation_seed));
  for (std::size_t i = 0; i < m.bloom.family.size(); ++i) {
    std::printf("hash[%zu]: %s seed=%llu\n", i,
                m.bloom.family[i].first == convhash::HashAlgo::murmur3 ? "murmur3" : "spooky",
                static_cast<unsigned long long>(m.bloom.family[i].second));
  }
  std::printf("table entries: %zu\ndirect slots: %zu\nlabels:", m.table.entries.size(),
              m.direct.slots.size());
  for (const auto& label : m.labels) std::printf(" %s", label.c_str());
  std::printf("\n");
  return kExitSuccess;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"convex-sparse audio hashing for bird species classification"};
  app.require_subcommand(1);

  CommonFlags train_flags;
  std::string train_manifest;
  std::string train_out = "model.cvh";
  auto* train = app.add_subcommand("train", "Train a model from a manifest");
  train->add_option("--manifest", train_manifest, "Dataset manifest CSV")->required();
  train->add_option("--out", train_out, "Model output path")->capture_default_str();
  add_train_flags(train, train_flags);

  std::string cls_model;
  std::string cls_audio;
  std::string cls_annotations;
  std::string cls_mode = "full";
  std::string cls_out = "-";
  auto* classify = app.add_subcommand("classify", "Classify a recording's vocalizations");
  classify->add_option("--model", cls_model, "Model file")->required();
  classify->add_option("--audio", cls_audio, "WAV recording")->required();
  classify->add_option("--annotations", cls_annotations, "Segment annotations CSV (optional)");
  classify->add_option("--mode", cls_mode, "Classification path")
      ->check(CLI::IsMember({"full", "minhash"}))
      ->capture_default_str();
  classify->add_option("--out", cls_out, "Predictions CSV path ('-' = stdout)")
      ->capture_default_str();

  CommonFlags eval_flags;
  std::string eval_manifest;
  std::uint32_t eval_folds = 3;
  double eval_holdout = 0.0;
  std::string eval_out = "-";
  auto* evaluate = app.add_subcommand("evaluate", "Cross-validated evaluation");
  evaluate->add_option("--manifest", eval_manifest, "Dataset manifest CSV")->required();
  evaluate->add_option("--folds", eval_folds, "Fold count (>= 2)")->capture_default_str();
  evaluate->add_option("--holdout", eval_holdout, "Validation holdout fraction, removed first")
      ->capture_default_str();
  evaluate->add_option("--out", eval_out, "Report path ('-' = stdout)")->capture_default_str();
  add_train_flags(evaluate, eval_flags);

  std::string synth_out;
  std::uint32_t synth_classes = 10;
  std::uint32_t synth_vocs = 40;
  std::uint64_t synth_seed = 0;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic annotated corpus");
  synth->add_option("--out", synth_out, "Output directory")->required();
  synth->add_option("--classes", synth_classes, "Species count (>= 2)")->capture_default_str();
  synth->add_option("--vocs", synth_vocs, "Vocalizations per species")->capture_default_str();
  synth->add_option("--seed", synth_seed, "Corpus seed");

  std::string bench_model;
  std::string bench_manifest;
  std::uint32_t bench_runs = 10;
  std::string bench_out = "-";
  auto* bench = app.add_subcommand("bench", "Measure classification latency on a corpus");
  bench->add_option("--model", bench_model, "Model file")->required();
  bench->add_option("--manifest", bench_manifest, "Corpus manifest CSV")->required();
  bench->add_option("--runs", bench_runs, "Timed repetitions")->capture_default_str();
  bench->add_option("--out", bench_out, "Report path ('-' = stdout)")->capture_default_str();

  std::string inspect_model;
  auto* inspect = app.add_subcommand("inspect", "Print a model header as text");
  inspect->add_option("--model", inspect_model, "Model file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitSuccess : kExitUsage;
  }

  try {
    if (train->parsed()) return cmd_train(train_manifest, train_flags, train_out);
    if (classify->parsed())
      return cmd_classify(cls_model, cls_audio, cls_annotations, cls_mode, cls_out);
    if (evaluate->parsed())
      return cmd_evaluate(eval_manifest, eval_flags, eval_folds, eval_holdout, eval_out);
    if (synth->parsed()) return cmd_synth(synth_out, synth_classes, synth_vocs, synth_seed);
    if (bench->parsed()) return cmd_bench(bench_model, bench_manifest, bench_runs, bench_out);
    if (inspect->parsed()) return cmd_inspect(inspect_model);
  } catch (const convhash::ModelFormatError& e) {
    std::fprintf(stderr, "model format error: %s\n", e.what());
    return kExitModelFormat;
  } catch (const convhash::DataError& e) {
    std::fprintf(stderr, "data error: %s\n", e.what());
    return kExitData;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  }
  return kExitUsage;
}
