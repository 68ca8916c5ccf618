#ifndef CONVHASH_ARCHETYPES_HPP
#define CONVHASH_ARCHETYPES_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "convhash/frontend.hpp"

namespace convhash {

struct AaConfig {
  std::uint32_t d = 25;             // archetypes per class
  std::uint32_t max_outer_iters = 100;
  double tol = 1e-6;                // relative objective-change threshold
  std::uint64_t seed = 0;
};

/// One class's archetypal dictionary. Archetypes are convex combinations
/// of the training columns: D = X B, with every column of B on the simplex.
struct ArchetypalDictionary {
  Eigen::MatrixXd D;  // K x d
  Eigen::MatrixXd B;  // l x d, simplex columns
  std::string class_label;
  std::uint32_t d = 0;
  std::vector<double> objective_curve;  // ||X - D A||_F^2 after each outer iteration
};

/// All class dictionaries side by side, plus the Gram matrix the coder
/// reuses across calls. Immutable once built, safe to share across threads.
class ConcatenatedDictionary {
 public:
  explicit ConcatenatedDictionary(const std::vector<ArchetypalDictionary>& dicts);

  const Eigen::MatrixXd& atoms() const { return df_; }
  const Eigen::MatrixXd& gram() const { return gram_; }
  std::uint32_t class_count() const { return static_cast<std::uint32_t>(offsets_.size()); }
  std::uint32_t atom_count() const { return static_cast<std::uint32_t>(df_.cols()); }
  std::uint32_t feature_dim() const { return static_cast<std::uint32_t>(df_.rows()); }

  /// Half-open archetype index range owned by a class.
  std::pair<std::uint32_t, std::uint32_t> class_range(std::uint32_t cls) const {
    return offsets_[cls];
  }
  /// Class owning an archetype index.
  std::uint32_t class_of(std::uint32_t atom) const;

  const std::vector<std::string>& labels() const { return labels_; }

 private:
  Eigen::MatrixXd df_;    // K x qd
  Eigen::MatrixXd gram_;  // qd x qd
  std::vector<std::pair<std::uint32_t, std::uint32_t>> offsets_;
  std::vector<std::string> labels_;
};

/// Simplex-constrained coefficients of one CSF against the concatenated
/// dictionary. Stored sparse: only the (few) positive coefficients.
struct ConvexCode {
  std::vector<std::pair<std::uint32_t, double>> support;  // ascending index, value > 0
  std::uint32_t dim = 0;

  double l1() const {
    double s = 0.0;
    for (const auto& [idx, v] : support) s += v;
    return s;
  }
  Eigen::VectorXd dense() const {
    Eigen::VectorXd y = Eigen::VectorXd::Zero(dim);
    for (const auto& [idx, v] : support) y(idx) = v;
    return y;
  }
};

/// Learns (D, B) approximately minimizing ||X - XBA||_F^2 with simplex
/// columns in both A and B, by block-coordinate descent: per-column
/// active-set solves for A, then per-archetype solves for B. The recorded
/// objective sequence is non-increasing.
ArchetypalDictionary learn_dictionary(const CsfMatrix& X, const AaConfig& cfg);

/// Projects x onto the simplex of the concatenated dictionary (least
/// squares over convex combinations of all archetypes). Deterministic.
ConvexCode encode(const Eigen::VectorXd& x, const ConcatenatedDictionary& df);

/// Column-wise encode; exactly equivalent to mapping encode over columns.
std::vector<ConvexCode> encode_batch(const CsfMatrix& X, const ConcatenatedDictionary& df);

}  // namespace convhash

#endif  // CONVHASH_ARCHETYPES_HPP
