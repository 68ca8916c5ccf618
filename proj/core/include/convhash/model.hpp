#ifndef CONVHASH_MODEL_HPP
#define CONVHASH_MODEL_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "convhash/archetypes.hpp"
#include "convhash/codes.hpp"
#include "convhash/frontend.hpp"
#include "convhash/index.hpp"

namespace convhash {

/// Everything a classifier needs, as persisted. Single little-endian binary
/// container, versioned magic; dictionaries as 64-bit floats. Projection and
/// permutation are stored as seeds only and regenerated bit-exactly on load.
struct ModelFile {
  std::uint32_t sample_rate = 44100;
  std::uint32_t fft_size = 512;
  double frame_s = 0.020;
  double overlap = 0.5;
  bool log_compress = false;
  std::uint32_t W = 5;
  std::uint32_t m = 257;  // fft_size/2 + 1
  std::uint32_t K = 500;
  std::uint32_t Z = 4;
  std::uint32_t T = 10;
  std::uint32_t d = 25;
  std::uint64_t projection_seed = 0;
  std::uint64_t permutation_seed = 0;
  BloomConfig bloom;
  std::vector<std::string> labels;            // lexicographic order; q = size
  std::vector<Eigen::MatrixXd> dictionaries;  // per class, K x d
  HashTable table;
  DirectAddressTable direct;

  std::uint32_t q() const { return static_cast<std::uint32_t>(labels.size()); }
  std::uint32_t qd() const { return q() * d; }
};

void save_model(const ModelFile& model, const std::string& path);

/// Parses and re-validates every module-level invariant; unknown versions,
/// bad magic, truncation, and inconsistent sections raise ModelFormatError.
ModelFile load_model(const std::string& path);

/// Runtime companions regenerated from the stored seeds/dictionaries.
ProjectionMatrix model_projection(const ModelFile& model);
MinHashPermutation model_permutation(const ModelFile& model);
ConcatenatedDictionary model_dictionary(const ModelFile& model);

}  // namespace convhash

#endif  // CONVHASH_MODEL_HPP
