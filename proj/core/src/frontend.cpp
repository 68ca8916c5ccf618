#include "convhash/frontend.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include "convhash/common.hpp"
#include "convhash/fft.hpp"

namespace convhash {

void SegmentList::normalize(double clip_duration_s) {
  for (const Segment& s : segments) {
    if (!(s.onset_s < s.offset_s)) throw DataError("invalid segment: onset >= offset");
  }
  std::sort(segments.begin(), segments.end(),
            [](const Segment& a, const Segment& b) { return a.onset_s < b.onset_s; });
  std::vector<Segment> merged;
  for (Segment s : segments) {
    s.onset_s = std::max(0.0, s.onset_s);
    s.offset_s = std::min(clip_duration_s, s.offset_s);
    if (!(s.onset_s < s.offset_s)) continue;  // fell entirely outside the clip
    if (!merged.empty() && s.onset_s <= merged.back().offset_s) {
      merged.back().offset_s = std::max(merged.back().offset_s, s.offset_s);
    } else {
      merged.push_back(s);
    }
  }
  segments = std::move(merged);
}

void CsfMatrix::append(const CsfMatrix& other) {
  if (other.count() == 0) return;
  if (count() == 0) {
    *this = other;
    return;
  }
  if (other.dim() != dim()) throw std::invalid_argument("CSF dimension mismatch on append");
  Eigen::MatrixXd joined(dim(), count() + other.count());
  joined.leftCols(count()) = columns;
  joined.rightCols(other.count()) = other.columns;
  columns = std::move(joined);
  origins.insert(origins.end(), other.origins.begin(), other.origins.end());
  source_labels.insert(source_labels.end(), other.source_labels.begin(),
                       other.source_labels.end());
}

Spectrogram compute_spectrogram(const AudioClip& clip, std::uint32_t fft_size,
                                double frame_s, double overlap_fraction,
                                bool log_compress) {
  if (clip.samples.empty()) throw DataError("input too short");
  if (clip.sample_rate == 0) throw DataError("invalid sample rate");
  if (fft_size < 64 || (fft_size & (fft_size - 1)) != 0) {
    throw std::invalid_argument("fft_size must be a power of two >= 64");
  }
  if (!(overlap_fraction >= 0.0 && overlap_fraction < 1.0)) {
    throw std::invalid_argument("overlap_fraction must be in [0, 1)");
  }

  const std::size_t frame_len =
      static_cast<std::size_t>(std::lround(frame_s * clip.sample_rate));
  if (frame_len < 1 || clip.samples.size() < frame_len) throw DataError("input too short");
  const std::size_t hop = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::lround(frame_len * (1.0 - overlap_fraction))));

  const std::size_t n_frames = (clip.samples.size() - frame_len) / hop + 1;
  const std::size_t m = fft_size / 2 + 1;

  // Hann window over the frame length.
  std::vector<double> window(frame_len);
  const double two_pi = 6.283185307179586476925286766559;
  for (std::size_t i = 0; i < frame_len; ++i) {
    window[i] = 0.5 - 0.5 * std::cos(two_pi * static_cast<double>(i) /
                                     static_cast<double>(frame_len));
  }

  Spectrogram spec;
  spec.magnitudes.resize(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n_frames));
  spec.frame_hop_s = static_cast<double>(hop) / clip.sample_rate;
  spec.frame_len_s = static_cast<double>(frame_len) / clip.sample_rate;

  std::vector<std::complex<double>> buf(fft_size);
  for (std::size_t t = 0; t < n_frames; ++t) {
    std::fill(buf.begin(), buf.end(), std::complex<double>(0.0, 0.0));
    const std::int16_t* frame = clip.samples.data() + t * hop;
    // Fold the windowed frame modulo fft_size; a no-op wrap when the frame
    // fits, time-aliasing when it is longer.
    for (std::size_t i = 0; i < frame_len; ++i) {
      buf[i % fft_size] += window[i] * (static_cast<double>(frame[i]) / 32768.0);
    }
    fft_radix2(buf);
    for (std::size_t b = 0; b < m; ++b) {
      double mag = std::abs(buf[b]);
      if (log_compress) mag = std::log1p(mag);
      spec.magnitudes(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(t)) = mag;
    }
  }
  return spec;
}

SegmentList segment_energy_fallback(const Spectrogram& spec, double threshold_factor,
                                    double min_dur_s) {
  if (spec.frames() == 0) throw std::invalid_argument("empty spectrogram");

  const Eigen::Index f = spec.frames();
  Eigen::VectorXd energy(f);
  for (Eigen::Index t = 0; t < f; ++t) energy(t) = spec.magnitudes.col(t).squaredNorm();

  std::vector<double> sorted(energy.data(), energy.data() + f);
  std::nth_element(sorted.begin(), sorted.begin() + f / 2, sorted.end());
  const double median = sorted[static_cast<std::size_t>(f / 2)];
  const double threshold = threshold_factor * median;

  SegmentList out;
  Eigen::Index run_start = -1;
  for (Eigen::Index t = 0; t <= f; ++t) {
    const bool active = t < f && energy(t) > threshold;
    if (active && run_start < 0) run_start = t;
    if (!active && run_start >= 0) {
      Segment s;
      s.onset_s = run_start * spec.frame_hop_s;
      s.offset_s = (t - 1) * spec.frame_hop_s + spec.frame_len_s;
      out.segments.push_back(s);
      run_start = -1;
    }
  }

  // Adjacent runs overlap once frame spans are applied; normalize merges them.
  const double duration = (f - 1) * spec.frame_hop_s + spec.frame_len_s;
  out.normalize(duration);
  std::erase_if(out.segments,
                [&](const Segment& s) { return s.offset_s - s.onset_s < min_dur_s; });
  return out;
}

ProjectionMatrix make_projection(std::uint64_t seed, std::uint32_t K, std::uint32_t W,
                                 std::uint32_t m) {
  if (K < 1 || W < 1 || m < 1) throw std::invalid_argument("projection dims must be >= 1");
  const std::uint64_t wm = static_cast<std::uint64_t>(W) * m;
  if (K >= wm) throw std::invalid_argument("projection does not compress");

  ProjectionMatrix proj;
  proj.seed = seed;
  proj.K = K;
  proj.W = W;
  proj.m = m;
  proj.entries.resize(K, static_cast<Eigen::Index>(wm));

  GaussianSource gauss(seed);
  const double scale = 1.0 / std::sqrt(static_cast<double>(K));
  // Column-major fill order is part of the regeneration contract.
  for (Eigen::Index c = 0; c < proj.entries.cols(); ++c) {
    for (Eigen::Index r = 0; r < proj.entries.rows(); ++r) {
      proj.entries(r, c) = gauss.next() * scale;
    }
  }
  return proj;
}

CsfMatrix build_csf(const Spectrogram& spec, const SegmentList& segs,
                    const ProjectionMatrix& proj, const std::string& recording_id) {
  if (proj.W % 2 == 0) throw std::invalid_argument("context window W must be odd");
  if (proj.m != static_cast<std::uint32_t>(spec.bins()) ||
      proj.entries.cols() != static_cast<Eigen::Index>(proj.W) * proj.m) {
    throw std::invalid_argument("projection/spectrogram mismatch");
  }

  const Eigen::Index m = spec.bins();
  const Eigen::Index half = (proj.W - 1) / 2;

  // Collect eligible center frames first so the output can be sized once.
  std::vector<std::pair<Eigen::Index, std::int32_t>> centers;  // (frame, segment idx)
  for (std::size_t si = 0; si < segs.segments.size(); ++si) {
    const Segment& s = segs.segments[si];
    // Frame t is in-segment when its center lies in [onset, offset).
    // center(t) = t*hop + frame_len/2.
    Eigen::Index first = spec.frames(), last = 0;
    for (Eigen::Index t = 0; t < spec.frames(); ++t) {
      const double center = t * spec.frame_hop_s + 0.5 * spec.frame_len_s;
      if (center >= s.onset_s && center < s.offset_s) {
        first = std::min(first, t);
        last = std::max(last, t + 1);
      }
    }
    if (first >= last) continue;
    for (Eigen::Index t = first + half; t + half < last; ++t) {
      centers.emplace_back(t, static_cast<std::int32_t>(si));
    }
  }

  CsfMatrix csf;
  csf.columns.resize(proj.K, static_cast<Eigen::Index>(centers.size()));
  csf.origins.reserve(centers.size());

  Eigen::VectorXd stacked(static_cast<Eigen::Index>(proj.W) * m);
  for (std::size_t i = 0; i < centers.size(); ++i) {
    const Eigen::Index t = centers[i].first;
    for (Eigen::Index w = 0; w < static_cast<Eigen::Index>(proj.W); ++w) {
      stacked.segment(w * m, m) = spec.magnitudes.col(t - half + w);
    }
    csf.columns.col(static_cast<Eigen::Index>(i)).noalias() = proj.entries * stacked;
    csf.origins.push_back({recording_id, centers[i].second, static_cast<std::int32_t>(t)});
  }
  return csf;
}

}  // namespace convhash
