#include "convhash/archetypes.hpp"

#include <algorithm>
#include <limits>
#include <random>
#include <stdexcept>

#include "convhash/common.hpp"
#include "convhash/simplex.hpp"

namespace convhash {
namespace {

// Furthest-sum seeding over the Gram matrix: seeded first pick, then
// repeatedly the column maximizing its distance to the closest pick so far.
std::vector<std::uint32_t> seed_archetypes(const Eigen::MatrixXd& gxx, std::uint32_t d,
                                           std::uint64_t seed) {
  const auto l = static_cast<std::uint32_t>(gxx.rows());
  std::mt19937_64 rng(seed);
  std::vector<std::uint32_t> picks;
  picks.reserve(d);
  picks.push_back(static_cast<std::uint32_t>(bounded_rand(rng, l)));

  Eigen::VectorXd min_dist(l);
  auto sq_dist = [&](std::uint32_t i, std::uint32_t j) {
    return gxx(i, i) + gxx(j, j) - 2.0 * gxx(i, j);
  };
  for (std::uint32_t i = 0; i < l; ++i) min_dist(i) = sq_dist(i, picks[0]);
  min_dist(picks[0]) = -1.0;

  while (picks.size() < d) {
    std::uint32_t best = 0;
    double best_dist = -1.0;
    for (std::uint32_t i = 0; i < l; ++i) {
      if (min_dist(i) > best_dist) {
        best_dist = min_dist(i);
        best = i;
      }
    }
    picks.push_back(best);
    min_dist(best) = -1.0;
    for (std::uint32_t i = 0; i < l; ++i) {
      if (min_dist(i) < 0.0) continue;
      min_dist(i) = std::min(min_dist(i), sq_dist(i, best));
    }
  }
  return picks;
}

void scatter_fit(const SimplexFit& fit, Eigen::Ref<Eigen::VectorXd> out) {
  out.setZero();
  for (std::size_t k = 0; k < fit.support.size(); ++k) out(fit.support[k]) = fit.coeffs(k);
}

}  // namespace

ArchetypalDictionary learn_dictionary(const CsfMatrix& X, const AaConfig& cfg) {
  if (cfg.d < 2) throw std::invalid_argument("archetype count must be at least 2");
  if (cfg.tol <= 0.0) throw std::invalid_argument("tolerance must be positive");
  const auto l = static_cast<Eigen::Index>(X.count());
  if (l < static_cast<Eigen::Index>(cfg.d)) throw DataError("insufficient data for d archetypes");
  if (!X.columns.allFinite()) throw DataError("invalid data");

  const Eigen::MatrixXd& data = X.columns;
  const Eigen::MatrixXd gxx = data.transpose() * data;
  const std::uint32_t d = cfg.d;

  ArchetypalDictionary dict;
  dict.d = d;
  dict.B = Eigen::MatrixXd::Zero(l, d);
  const auto picks = seed_archetypes(gxx, d, cfg.seed);
  for (std::uint32_t j = 0; j < d; ++j) dict.B(picks[j], j) = 1.0;
  dict.D = data * dict.B;

  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(d, l);
  SimplexOptions opt;
  double prev_obj = std::numeric_limits<double>::infinity();

  for (std::uint32_t outer = 0; outer < cfg.max_outer_iters; ++outer) {
    // A-step: exact simplex projection of every column onto the current atoms.
    const Eigen::MatrixXd gdd = dict.D.transpose() * dict.D;
    const Eigen::MatrixXd cdx = dict.D.transpose() * data;
    for (Eigen::Index i = 0; i < l; ++i) {
      scatter_fit(simplex_ls(gdd, cdx.col(i), opt), A.col(i));
    }

    // B-step: per-archetype exact resolve against the residual, with rank-one
    // residual maintenance. Unused archetypes are reseeded to the column the
    // model currently explains worst (objective-neutral: their A-row is zero).
    Eigen::MatrixXd R = data - dict.D * A;
    for (std::uint32_t j = 0; j < d; ++j) {
      const Eigen::RowVectorXd a_row = A.row(j);
      const double nrm = a_row.squaredNorm();
      if (nrm <= 1e-24) {
        Eigen::Index worst = 0;
        R.colwise().squaredNorm().maxCoeff(&worst);
        dict.B.col(j).setZero();
        dict.B(worst, j) = 1.0;
        dict.D.col(j) = data.col(worst);
        continue;
      }
      const Eigen::VectorXd v = R * a_row.transpose() / nrm + dict.D.col(j);
      const SimplexFit fit = simplex_ls(gxx, data.transpose() * v, opt);
      scatter_fit(fit, dict.B.col(j));
      const Eigen::VectorXd d_new = data * dict.B.col(j);
      R.noalias() += (dict.D.col(j) - d_new) * a_row;
      dict.D.col(j) = d_new;
    }

    const double obj = R.squaredNorm();
    dict.objective_curve.push_back(obj);
    if (prev_obj - obj <= cfg.tol * std::max(1.0, prev_obj) && outer > 0) break;
    prev_obj = obj;
  }
  return dict;
}

ConcatenatedDictionary::ConcatenatedDictionary(const std::vector<ArchetypalDictionary>& dicts) {
  if (dicts.empty()) throw std::invalid_argument("no dictionaries to concatenate");
  const Eigen::Index K = dicts.front().D.rows();
  Eigen::Index total = 0;
  for (const auto& dict : dicts) {
    if (dict.D.rows() != K)
      throw std::invalid_argument("dictionaries disagree on feature dimension");
    if (dict.D.cols() == 0) throw std::invalid_argument("empty dictionary");
    total += dict.D.cols();
  }
  df_.resize(K, total);
  Eigen::Index at = 0;
  for (const auto& dict : dicts) {
    df_.middleCols(at, dict.D.cols()) = dict.D;
    offsets_.emplace_back(static_cast<std::uint32_t>(at),
                          static_cast<std::uint32_t>(at + dict.D.cols()));
    labels_.push_back(dict.class_label);
    at += dict.D.cols();
  }
  gram_ = df_.transpose() * df_;
}

std::uint32_t ConcatenatedDictionary::class_of(std::uint32_t atom) const {
  for (std::uint32_t c = 0; c < offsets_.size(); ++c) {
    if (atom >= offsets_[c].first && atom < offsets_[c].second) return c;
  }
  throw std::out_of_range("archetype index outside dictionary");
}

namespace {

ConvexCode code_from_fit(const SimplexFit& fit, std::uint32_t dim) {
  ConvexCode code;
  code.dim = dim;
  code.support.reserve(fit.support.size());
  for (std::size_t k = 0; k < fit.support.size(); ++k) {
    if (fit.coeffs(k) > 0.0) code.support.emplace_back(fit.support[k], fit.coeffs(k));
  }
  return code;
}

SimplexOptions encode_options(const ConcatenatedDictionary& df) {
  SimplexOptions opt;
  opt.max_support = std::min(df.atom_count(), df.feature_dim() + 1);
  return opt;
}

}  // namespace

ConvexCode encode(const Eigen::VectorXd& x, const ConcatenatedDictionary& df) {
  if (x.size() != static_cast<Eigen::Index>(df.feature_dim()))
    throw DataError("dictionary/input mismatch");
  const SimplexFit fit = simplex_ls(df.gram(), df.atoms().transpose() * x, encode_options(df));
  return code_from_fit(fit, df.atom_count());
}

std::vector<ConvexCode> encode_batch(const CsfMatrix& X, const ConcatenatedDictionary& df) {
  if (X.dim() != df.feature_dim()) throw DataError("dictionary/input mismatch");
  // Per-column delegation keeps batch results bitwise identical to encode();
  // a batched correlation GEMM rounds differently and would break that.
  std::vector<ConvexCode> codes;
  codes.reserve(X.count());
  for (Eigen::Index i = 0; i < X.columns.cols(); ++i) {
    codes.push_back(encode(X.columns.col(i), df));
  }
  return codes;
}

}  // namespace convhash
