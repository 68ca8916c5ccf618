#ifndef CONVHASH_DATASET_HPP
#define CONVHASH_DATASET_HPP

#include <string>
#include <vector>

#include "convhash/frontend.hpp"

namespace convhash {

/// One manifest row. Paths are resolved against the manifest's directory;
/// an empty annotations_path selects the energy-fallback segmenter.
struct ManifestEntry {
  std::string path;
  std::string label;
  std::string annotations_path;
};

struct AnnotationRow {
  std::string recording_id;
  double onset_s = 0.0;
  double offset_s = 0.0;
};

/// Parses `path,label,annotations_path` (header required). Every recording
/// path must exist; labels must be non-empty.
std::vector<ManifestEntry> read_manifest(const std::string& path);

/// Parses `recording_id,onset_s,offset_s` (header required).
std::vector<AnnotationRow> read_annotations(const std::string& path);

/// Segments of one recording, in file order (normalize before use).
SegmentList segments_for(const std::vector<AnnotationRow>& rows, const std::string& recording_id);

}  // namespace convhash

#endif  // CONVHASH_DATASET_HPP
