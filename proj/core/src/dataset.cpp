#include "convhash/dataset.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>

#include "convhash/common.hpp"

namespace convhash {
namespace {

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open file: " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

double parse_seconds(const std::string& field, const std::string& path, std::size_t lineno) {
  double value = 0.0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last)
    throw DataError("invalid data: bad number '" + field + "' in " + path + " line " +
                    std::to_string(lineno));
  return value;
}

std::string resolve(const std::filesystem::path& base, const std::string& raw) {
  const std::filesystem::path p(raw);
  if (p.is_absolute()) return p.string();
  return (base / p).lexically_normal().string();
}

}  // namespace

std::vector<ManifestEntry> read_manifest(const std::string& path) {
  const auto lines = read_lines(path);
  if (lines.empty() || lines[0] != "path,label,annotations_path")
    throw DataError("invalid data: expected manifest header 'path,label,annotations_path' in " +
                    path);
  const auto base = std::filesystem::path(path).parent_path();

  std::vector<ManifestEntry> entries;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const auto fields = split_csv(lines[i]);
    if (fields.size() != 3)
      throw DataError("invalid data: expected 3 fields in " + path + " line " +
                      std::to_string(i + 1));
    ManifestEntry entry;
    entry.path = resolve(base, fields[0]);
    entry.label = fields[1];
    entry.annotations_path = fields[2].empty() ? std::string{} : resolve(base, fields[2]);
    if (entry.label.empty())
      throw DataError("invalid data: empty label in " + path + " line " + std::to_string(i + 1));
    if (!std::filesystem::exists(entry.path))
      throw DataError("missing recording: " + entry.path);
    if (!entry.annotations_path.empty() && !std::filesystem::exists(entry.annotations_path))
      throw DataError("missing annotations: " + entry.annotations_path);
    entries.push_back(std::move(entry));
  }
  return entries;
}

std::vector<AnnotationRow> read_annotations(const std::string& path) {
  const auto lines = read_lines(path);
  if (lines.empty() || lines[0] != "recording_id,onset_s,offset_s")
    throw DataError("invalid data: expected header 'recording_id,onset_s,offset_s' in " + path);

  std::vector<AnnotationRow> rows;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const auto fields = split_csv(lines[i]);
    if (fields.size() != 3)
      throw DataError("invalid data: expected 3 fields in " + path + " line " +
                      std::to_string(i + 1));
    AnnotationRow row;
    row.recording_id = fields[0];
    row.onset_s = parse_seconds(fields[1], path, i + 1);
    row.offset_s = parse_seconds(fields[2], path, i + 1);
    rows.push_back(std::move(row));
  }
  return rows;
}

SegmentList segments_for(const std::vector<AnnotationRow>& rows,
                         const std::string& recording_id) {
  SegmentList list;
  for (const auto& row : rows) {
    if (row.recording_id == recording_id) list.segments.push_back({row.onset_s, row.offset_s});
  }
  return list;
}

}  // namespace convhash
