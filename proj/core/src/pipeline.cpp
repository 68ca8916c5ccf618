#include "convhash/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <random>
#include <set>
#include <stdexcept>

#include "convhash/common.hpp"
#include "convhash/wav.hpp"

namespace convhash {
namespace {

double now_s() {
  return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

std::string fmt(const char* pattern, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, v);
  return buf;
}

// Splits a recording's CSF matrix into per-segment matrices via provenance.
std::vector<CsfMatrix> split_by_segment(const CsfMatrix& all, std::size_t segment_count) {
  std::vector<std::vector<Eigen::Index>> members(segment_count);
  for (Eigen::Index c = 0; c < all.count(); ++c)
    members[static_cast<std::size_t>(all.origins[c].segment)].push_back(c);

  std::vector<CsfMatrix> out(segment_count);
  for (std::size_t s = 0; s < segment_count; ++s) {
    CsfMatrix& mat = out[s];
    mat.columns.resize(all.dim(), static_cast<Eigen::Index>(members[s].size()));
    for (std::size_t k = 0; k < members[s].size(); ++k) {
      mat.columns.col(static_cast<Eigen::Index>(k)) = all.columns.col(members[s][k]);
      mat.origins.push_back(all.origins[members[s][k]]);
    }
  }
  return out;
}

std::vector<ConvexCode> encode_vocalization(const CsfMatrix& csfs,
                                            const ConcatenatedDictionary& df) {
  return encode_batch(csfs, df);
}

}  // namespace

Mode parse_mode(const std::string& name) {
  if (name == "full") return Mode::full;
  if (name == "minhash") return Mode::minhash;
  throw std::invalid_argument("mode must be 'full' or 'minhash'");
}

const char* mode_name(Mode mode) { return mode == Mode::full ? "full" : "minhash"; }

ProjectionMatrix projection_for(const TrainConfig& cfg) {
  return make_projection(derive_seed(cfg.seed, "projection"), cfg.K, cfg.W,
                         cfg.fft_size / 2 + 1);
}

Corpus load_corpus(const std::string& manifest_path, const TrainConfig& cfg) {
  const auto entries = read_manifest(manifest_path);
  if (entries.empty()) throw DataError("invalid data: empty manifest " + manifest_path);

  Corpus corpus;
  std::set<std::string> label_set;
  for (const auto& entry : entries) label_set.insert(entry.label);
  corpus.labels.assign(label_set.begin(), label_set.end());
  std::map<std::string, std::uint16_t> label_id;
  for (std::size_t i = 0; i < corpus.labels.size(); ++i)
    label_id[corpus.labels[i]] = static_cast<std::uint16_t>(i);

  const ProjectionMatrix proj = projection_for(cfg);
  for (const auto& entry : entries) {
    const AudioClip clip = read_wav(entry.path);
    if (clip.sample_rate != cfg.sample_rate)
      throw DataError("unsupported sample rate: " + entry.path);
    const Spectrogram spec =
        compute_spectrogram(clip, cfg.fft_size, cfg.frame_s, cfg.overlap, cfg.log_compress);
    SegmentList segs;
    if (!entry.annotations_path.empty()) {
      segs = segments_for(read_annotations(entry.annotations_path), clip.id);
    } else {
      segs = segment_energy_fallback(spec, cfg.energy_threshold, cfg.energy_min_dur_s);
    }
    segs.normalize(clip.duration_s());
    if (segs.segments.empty()) continue;

    const CsfMatrix all = build_csf(spec, segs, proj, clip.id);
    auto per_segment = split_by_segment(all, segs.segments.size());
    for (std::size_t s = 0; s < per_segment.size(); ++s) {
      if (per_segment[s].count() == 0) {
        corpus.dropped_empty += 1;
        continue;
      }
      Vocalization voc;
      voc.recording_id = clip.id;
      voc.span = segs.segments[s];
      voc.label = label_id[entry.label];
      voc.csfs = std::move(per_segment[s]);
      corpus.vocalizations.push_back(std::move(voc));
    }
  }
  return corpus;
}

ModelFile train_model(const Corpus& corpus, const std::vector<std::uint32_t>& voc_indices,
                      const TrainConfig& cfg, TrainReport* report) {
  const double t0 = now_s();
  const std::uint32_t q = static_cast<std::uint32_t>(corpus.labels.size());
  if (q == 0) throw DataError("invalid data: no classes");

  // Gather per-class training CSFs.
  std::vector<std::vector<const CsfMatrix*>> per_class(q);
  for (std::uint32_t idx : voc_indices) {
    const Vocalization& voc = corpus.vocalizations.at(idx);
    per_class[voc.label].push_back(&voc.csfs);
  }

  std::vector<ArchetypalDictionary> dicts;
  dicts.reserve(q);
  TrainReport local_report;
  for (std::uint32_t c = 0; c < q; ++c) {
    Eigen::Index total = 0;
    for (const CsfMatrix* m : per_class[c]) total += m->count();
    CsfMatrix X;
    X.columns.resize(cfg.K, total);
    Eigen::Index at = 0;
    for (const CsfMatrix* m : per_class[c]) {
      X.columns.middleCols(at, m->count()) = m->columns;
      at += m->count();
    }

    AaConfig aa;
    aa.d = cfg.d;
    aa.max_outer_iters = cfg.aa_max_iters;
    aa.tol = cfg.aa_tol;
    aa.seed = derive_seed(cfg.seed, "aa:" + corpus.labels[c]);
    ArchetypalDictionary dict;
    try {
      dict = learn_dictionary(X, aa);
    } catch (const DataError& e) {
      throw DataError(std::string(e.what()) + ": " + corpus.labels[c]);
    }
    dict.class_label = corpus.labels[c];

    ClassSummary summary;
    summary.label = corpus.labels[c];
    summary.csf_count = static_cast<std::size_t>(total);
    summary.iterations = dict.objective_curve.size();
    summary.initial_objective = dict.objective_curve.empty() ? 0.0 : dict.objective_curve.front();
    summary.final_objective = dict.objective_curve.empty() ? 0.0 : dict.objective_curve.back();
    local_report.classes.push_back(std::move(summary));
    dicts.push_back(std::move(dict));
  }

  const ConcatenatedDictionary df(dicts);
  const std::uint32_t qd = df.atom_count();

  ModelFile model;
  model.sample_rate = cfg.sample_rate;
  model.fft_size = cfg.fft_size;
  model.frame_s = cfg.frame_s;
  model.overlap = cfg.overlap;
  model.log_compress = cfg.log_compress;
  model.W = cfg.W;
  model.m = cfg.fft_size / 2 + 1;
  model.K = cfg.K;
  model.Z = cfg.Z;
  model.T = cfg.T;
  model.d = cfg.d;
  model.projection_seed = derive_seed(cfg.seed, "projection");
  model.permutation_seed = derive_seed(cfg.seed, "minhash");
  model.bloom.bits = cfg.bits;
  model.bloom.family = {{HashAlgo::murmur3, derive_seed(cfg.seed, "bloom:0")},
                        {HashAlgo::spooky, derive_seed(cfg.seed, "bloom:1")}};
  model.labels = corpus.labels;
  for (const auto& dict : dicts) model.dictionaries.push_back(dict.D);
  if (cfg.Z > qd) throw DataError("Z exceeds dictionary size");

  // Encode training CSFs vocalization by vocalization; Bloom codes feed the
  // K-medoids table, raw convex codes feed the min-hash direct table.
  std::vector<std::vector<ConvCode>> codes_by_class(q);
  std::vector<std::pair<ConvexCode, std::uint16_t>> train_pairs;
  for (std::uint32_t idx : voc_indices) {
    const Vocalization& voc = corpus.vocalizations.at(idx);
    for (auto& code : encode_vocalization(voc.csfs, df)) {
      codes_by_class[voc.label].push_back(bloom_encode(effective_set(code, cfg.Z), model.bloom));
      train_pairs.emplace_back(std::move(code), voc.label);
    }
  }

  model.table = build_hash_table(codes_by_class, corpus.labels, cfg.T,
                                 derive_seed(cfg.seed, "kmedoids"));
  const MinHashPermutation perm = make_permutation(model.permutation_seed, qd);
  model.direct = build_direct_table(train_pairs, perm, cfg.Z, qd);

  local_report.seconds = now_s() - t0;
  if (report) *report = std::move(local_report);
  return model;
}

ModelFile train_model(const Corpus& corpus, const TrainConfig& cfg, TrainReport* report) {
  std::vector<std::uint32_t> all(corpus.vocalizations.size());
  for (std::uint32_t i = 0; i < all.size(); ++i) all[i] = i;
  return train_model(corpus, all, cfg, report);
}

VocalizationOutcome classify_codes(const std::vector<ConvexCode>& codes, const ModelFile& model,
                                   const RuntimeModel& rt, Mode mode, ClassifyStats* stats) {
  VocalizationOutcome out;
  std::vector<CsfVote> votes;
  votes.reserve(codes.size());

  const double t0 = now_s();
  if (mode == Mode::full) {
    for (const auto& code : codes) {
      votes.push_back(
          classify_csf(bloom_encode(effective_set(code, model.Z), model.bloom), model.table,
                       stats));
    }
  } else {
    for (const auto& code : codes) {
      votes.push_back(classify_csf_minhash(code, model.direct, rt.perm, model.Z, model.table,
                                           model.bloom, stats));
    }
  }
  out.pred = aggregate_votes(votes);
  out.seconds = now_s() - t0;
  for (const auto& v : votes) out.fallbacks += v.fallback ? 1 : 0;
  return out;
}

std::vector<PredictionRow> classify_recording(const ModelFile& model, const RuntimeModel& rt,
                                              const AudioClip& clip, const SegmentList& segments,
                                              Mode mode, ClassifyStats* stats) {
  if (clip.sample_rate != model.sample_rate)
    throw DataError("unsupported sample rate: " + clip.id);
  const auto frame_len =
      static_cast<std::size_t>(std::lround(model.frame_s * clip.sample_rate));
  if (clip.samples.size() < frame_len || frame_len == 0) return {};

  const Spectrogram spec =
      compute_spectrogram(clip, model.fft_size, model.frame_s, model.overlap, model.log_compress);
  SegmentList segs = segments;
  segs.normalize(clip.duration_s());
  if (segs.segments.empty()) return {};

  const CsfMatrix all = build_csf(spec, segs, rt.proj, clip.id);
  const auto per_segment = split_by_segment(all, segs.segments.size());

  std::vector<PredictionRow> rows;
  for (std::size_t s = 0; s < per_segment.size(); ++s) {
    if (per_segment[s].count() == 0) continue;
    const auto codes = encode_vocalization(per_segment[s], rt.df);
    const VocalizationOutcome outcome = classify_codes(codes, model, rt, mode, stats);
    PredictionRow row;
    row.recording_id = clip.id;
    row.onset_s = segs.segments[s].onset_s;
    row.offset_s = segs.segments[s].offset_s;
    row.label = model.labels.at(outcome.pred.label);
    row.vote_fraction = outcome.pred.vote_fraction();
    row.mode = mode_name(mode);
    row.fallbacks = outcome.fallbacks;
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string format_predictions_csv(const std::vector<PredictionRow>& rows) {
  std::string out = "recording_id,onset_s,offset_s,label,vote_fraction,mode,fallbacks\n";
  for (const auto& row : rows) {
    char buf[512];
    std::snprintf(buf, sizeof buf, "%s,%.6f,%.6f,%s,%.6f,%s,%u\n", row.recording_id.c_str(),
                  row.onset_s, row.offset_s, row.label.c_str(), row.vote_fraction,
                  row.mode.c_str(), row.fallbacks);
    out += buf;
  }
  return out;
}

EvalReport run_evaluation(const Corpus& corpus, const TrainConfig& cfg, std::uint32_t folds,
                          double holdout_fraction) {
  if (folds < 2) throw std::invalid_argument("folds must be at least 2");
  if (holdout_fraction < 0.0 || holdout_fraction >= 1.0)
    throw std::invalid_argument("holdout fraction must lie in [0, 1)");
  const std::uint32_t q = static_cast<std::uint32_t>(corpus.labels.size());

  // Per-class seeded shuffle, optional holdout, then `folds` equal chunks.
  std::vector<std::vector<std::vector<std::uint32_t>>> chunks(q);
  for (std::uint32_t c = 0; c < q; ++c) {
    std::vector<std::uint32_t> idx;
    for (std::uint32_t i = 0; i < corpus.vocalizations.size(); ++i)
      if (corpus.vocalizations[i].label == c) idx.push_back(i);

    std::mt19937_64 rng(derive_seed(cfg.seed, "folds:" + corpus.labels[c]));
    for (std::size_t i = idx.size(); i > 1; --i)
      std::swap(idx[i - 1], idx[bounded_rand(rng, i)]);

    const auto held = static_cast<std::size_t>(holdout_fraction * idx.size());
    idx.erase(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(held));
    if (idx.size() < folds)
      throw DataError("class has fewer vocalizations than folds: " + corpus.labels[c]);

    chunks[c].resize(folds);
    for (std::size_t i = 0; i < idx.size(); ++i) {
      const std::size_t chunk = i * folds / idx.size();
      chunks[c][chunk].push_back(idx[i]);
    }
  }

  EvalReport report;
  report.folds = folds;
  report.labels = corpus.labels;
  report.confusion_full.assign(q, std::vector<std::uint32_t>(q, 0));
  report.confusion_minhash.assign(q, std::vector<std::uint32_t>(q, 0));

  double latency_full = 0.0;
  double latency_minhash = 0.0;
  for (std::uint32_t fold = 0; fold < folds; ++fold) {
    std::vector<std::uint32_t> train_set;
    std::vector<std::uint32_t> test_set;
    for (std::uint32_t c = 0; c < q; ++c) {
      const auto& tr = chunks[c][fold];
      const auto& te = chunks[c][(fold + 1) % folds];
      train_set.insert(train_set.end(), tr.begin(), tr.end());
      test_set.insert(test_set.end(), te.begin(), te.end());
    }

    const ModelFile model = train_model(corpus, train_set, cfg);
    const RuntimeModel rt(model);

    std::uint64_t correct_full = 0;
    std::uint64_t correct_minhash = 0;
    ClassifyStats stats;
    for (std::uint32_t idx : test_set) {
      const Vocalization& voc = corpus.vocalizations[idx];
      const auto codes = encode_vocalization(voc.csfs, rt.df);

      const VocalizationOutcome full = classify_codes(codes, model, rt, Mode::full);
      const VocalizationOutcome mh = classify_codes(codes, model, rt, Mode::minhash, &stats);
      report.confusion_full[voc.label][full.pred.label] += 1;
      report.confusion_minhash[voc.label][mh.pred.label] += 1;
      correct_full += full.pred.label == voc.label;
      correct_minhash += mh.pred.label == voc.label;
      latency_full += full.seconds;
      latency_minhash += mh.seconds;
    }
    report.minhash_direct_hits += stats.direct_hits;
    report.minhash_fallbacks += stats.fallbacks;
    report.fold_accuracy_full.push_back(static_cast<double>(correct_full) / test_set.size());
    report.fold_accuracy_minhash.push_back(static_cast<double>(correct_minhash) /
                                           test_set.size());
    report.test_vocalizations += test_set.size();
  }

  for (std::uint32_t f = 0; f < folds; ++f) {
    report.mean_accuracy_full += report.fold_accuracy_full[f] / folds;
    report.mean_accuracy_minhash += report.fold_accuracy_minhash[f] / folds;
  }
  for (std::uint32_t c = 0; c < q; ++c) {
    std::uint64_t row_full = 0;
    std::uint64_t row_minhash = 0;
    for (std::uint32_t p = 0; p < q; ++p) {
      row_full += report.confusion_full[c][p];
      row_minhash += report.confusion_minhash[c][p];
    }
    report.per_class_accuracy_full.push_back(
        row_full ? static_cast<double>(report.confusion_full[c][c]) / row_full : 0.0);
    report.per_class_accuracy_minhash.push_back(
        row_minhash ? static_cast<double>(report.confusion_minhash[c][c]) / row_minhash : 0.0);
  }
  if (report.test_vocalizations) {
    report.mean_latency_full_s = latency_full / report.test_vocalizations;
    report.mean_latency_minhash_s = latency_minhash / report.test_vocalizations;
  }
  return report;
}

std::string format_eval_report(const EvalReport& report) {
  std::string out;
  out += "folds: " + std::to_string(report.folds) + "\n";
  for (std::uint32_t f = 0; f < report.folds; ++f) {
    out += "fold " + std::to_string(f) + ": accuracy full=" +
           fmt("%.4f", report.fold_accuracy_full[f]) + " minhash=" +
           fmt("%.4f", report.fold_accuracy_minhash[f]) + "\n";
  }
  out += "mean accuracy: full=" + fmt("%.4f", report.mean_accuracy_full) +
         " minhash=" + fmt("%.4f", report.mean_accuracy_minhash) + "\n";
  out += "mean latency per vocalization: full=" + fmt("%.6f", report.mean_latency_full_s) +
         "s minhash=" + fmt("%.6f", report.mean_latency_minhash_s) + "s\n";
  out += "minhash direct hits: " + std::to_string(report.minhash_direct_hits) +
         ", fallbacks: " + std::to_string(report.minhash_fallbacks) + "\n";
  out += "per-class accuracy (full/minhash):\n";
  for (std::size_t c = 0; c < report.labels.size(); ++c) {
    out += "  " + report.labels[c] + ": " + fmt("%.4f", report.per_class_accuracy_full[c]) +
           " / " + fmt("%.4f", report.per_class_accuracy_minhash[c]) + "\n";
  }
  out += "confusion (full mode, rows=truth):\n";
  for (std::size_t c = 0; c < report.labels.size(); ++c) {
    out += "  " + report.labels[c] + ":";
    for (std::size_t p = 0; p < report.labels.size(); ++p)
      out += " " + std::to_string(report.confusion_full[c][p]);
    out += "\n";
  }
  return out;
}

BenchReport run_bench(const ModelFile& model, const RuntimeModel& rt,
                      const std::vector<std::vector<ConvexCode>>& voc_codes,
                      std::uint32_t runs) {
  if (runs == 0) throw std::invalid_argument("need at least one run");
  if (voc_codes.empty()) throw DataError("invalid data: no vocalizations to benchmark");

  BenchReport report;
  report.vocalizations = voc_codes.size();
  for (std::uint32_t run = 0; run < runs; ++run) {
    double total_full = 0.0;
    double total_minhash = 0.0;
    for (const auto& codes : voc_codes) {
      total_full += classify_codes(codes, model, rt, Mode::full, &report.full_stats).seconds;
      total_minhash +=
          classify_codes(codes, model, rt, Mode::minhash, &report.minhash_stats).seconds;
    }
    report.full_run_mean_s.push_back(total_full / voc_codes.size());
    report.minhash_run_mean_s.push_back(total_minhash / voc_codes.size());
  }
  for (std::uint32_t run = 0; run < runs; ++run) {
    report.full_mean_s += report.full_run_mean_s[run] / runs;
    report.minhash_mean_s += report.minhash_run_mean_s[run] / runs;
  }
  report.ratio = report.full_mean_s > 0.0 ? report.minhash_mean_s / report.full_mean_s : 0.0;
  return report;
}

std::string format_bench_report(const BenchReport& report) {
  std::string out = "run,mode,mean_latency_s\n";
  for (std::size_t run = 0; run < report.full_run_mean_s.size(); ++run) {
    out += std::to_string(run) + ",full," + fmt("%.9f", report.full_run_mean_s[run]) + "\n";
    out += std::to_string(run) + ",minhash," + fmt("%.9f", report.minhash_run_mean_s[run]) + "\n";
  }
  out += "mean,full," + fmt("%.9f", report.full_mean_s) + "\n";
  out += "mean,minhash," + fmt("%.9f", report.minhash_mean_s) + "\n";
  out += "ratio(minhash/full)," + fmt("%.4f", report.ratio) + "\n";
  out += "vocalizations," + std::to_string(report.vocalizations) + "\n";
  out += "minhash direct hits," + std::to_string(report.minhash_stats.direct_hits) + "\n";
  out += "minhash fallbacks," + std::to_string(report.minhash_stats.fallbacks) + "\n";
  return out;
}

}  // namespace convhash
