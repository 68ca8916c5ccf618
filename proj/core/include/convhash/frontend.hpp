#ifndef CONVHASH_FRONTEND_HPP
#define CONVHASH_FRONTEND_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "convhash/wav.hpp"

namespace convhash {

/// Magnitude spectrogram: one column per frame, rows are frequency bins.
struct Spectrogram {
  Eigen::MatrixXd magnitudes;  // m bins x f frames, all entries >= 0
  double frame_hop_s = 0.0;
  double frame_len_s = 0.0;

  Eigen::Index bins() const { return magnitudes.rows(); }
  Eigen::Index frames() const { return magnitudes.cols(); }
};

struct Segment {
  double onset_s = 0.0;
  double offset_s = 0.0;
};

/// Vocalization regions of one recording, in seconds.
/// normalize() sorts, merges overlapping regions, and clamps to a duration.
struct SegmentList {
  std::vector<Segment> segments;

  void normalize(double clip_duration_s);
};

/// Seeded Gaussian projection, K x (W*m). The dense matrix is regenerated
/// from (seed, K, W, m); only those four numbers are ever persisted.
struct ProjectionMatrix {
  Eigen::MatrixXd entries;
  std::uint64_t seed = 0;
  std::uint32_t K = 0;
  std::uint32_t W = 0;
  std::uint32_t m = 0;
};

/// Where a CSF column came from.
struct CsfOrigin {
  std::string recording_id;
  std::int32_t segment = 0;  // index into the recording's SegmentList
  std::int32_t frame = 0;    // center frame index in the spectrogram
};

/// Compressed super-frames: K-dimensional projections of W-frame
/// spectrogram contexts, one column per eligible in-segment frame.
struct CsfMatrix {
  Eigen::MatrixXd columns;  // K x l
  std::vector<CsfOrigin> origins;
  std::vector<std::string> source_labels;  // optional, per column

  Eigen::Index dim() const { return columns.rows(); }
  Eigen::Index count() const { return columns.cols(); }

  /// Appends other's columns (and provenance) after this matrix's columns.
  void append(const CsfMatrix& other);
};

/// STFT magnitude spectrogram with a Hann window.
///
/// Frame length comes from frame_s at the clip's sample rate; hop is
/// frame_len * (1 - overlap_fraction). Frames longer than fft_size are
/// folded modulo fft_size before the transform (samples the DTFT at
/// fft_size points); shorter frames are zero-padded.
///
/// When log_compress is set, magnitudes become log(1 + magnitude).
Spectrogram compute_spectrogram(const AudioClip& clip, std::uint32_t fft_size,
                                double frame_s, double overlap_fraction,
                                bool log_compress = false);

/// Fallback segmenter for unannotated audio: contiguous frame runs whose
/// energy exceeds threshold_factor times the median frame energy, merged
/// and filtered by min_dur_s.
SegmentList segment_energy_fallback(const Spectrogram& spec, double threshold_factor,
                                    double min_dur_s);

/// Gaussian projection with entries ~ N(0, 1/K), deterministic in seed.
/// Requires K < W*m; anything else does not compress.
ProjectionMatrix make_projection(std::uint64_t seed, std::uint32_t K, std::uint32_t W,
                                 std::uint32_t m);

/// Builds CSF columns for every frame whose centered W-frame context lies
/// entirely inside one segment; frames whose context would cross a segment
/// edge are dropped. A frame is in-segment when its center time falls in
/// [onset, offset).
CsfMatrix build_csf(const Spectrogram& spec, const SegmentList& segs,
                    const ProjectionMatrix& proj, const std::string& recording_id = {});

}  // namespace convhash

#endif  // CONVHASH_FRONTEND_HPP
