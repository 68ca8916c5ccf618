#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "convhash/archetypes.hpp"
#include "convhash/common.hpp"
#include "support.hpp"

using namespace convhash;

namespace {

CsfMatrix matrix_of(const Eigen::MatrixXd& columns) {
  CsfMatrix X;
  X.columns = columns;
  return X;
}

/// Gaussian mixture columns around `centers`, for synthetic "classes".
Eigen::MatrixXd blob_data(std::uint64_t seed, Eigen::Index dim, Eigen::Index count) {
  GaussianSource gauss(seed);
  Eigen::MatrixXd centers(dim, 4);
  for (Eigen::Index j = 0; j < centers.cols(); ++j)
    for (Eigen::Index i = 0; i < dim; ++i) centers(i, j) = 3.0 * gauss.next();
  Eigen::MatrixXd X(dim, count);
  for (Eigen::Index j = 0; j < count; ++j) {
    const Eigen::Index c = j % centers.cols();
    for (Eigen::Index i = 0; i < dim; ++i) X(i, j) = centers(i, c) + 0.3 * gauss.next();
  }
  return X;
}

double best_match_error(const Eigen::MatrixXd& learned, const Eigen::MatrixXd& truth) {
  // Greedy column matching is enough at these sizes.
  double worst = 0.0;
  std::vector<bool> used(static_cast<std::size_t>(truth.cols()), false);
  for (Eigen::Index i = 0; i < learned.cols(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    Eigen::Index arg = -1;
    for (Eigen::Index j = 0; j < truth.cols(); ++j) {
      if (used[static_cast<std::size_t>(j)]) continue;
      const double e = (learned.col(i) - truth.col(j)).norm();
      if (e < best) {
        best = e;
        arg = j;
      }
    }
    used[static_cast<std::size_t>(arg)] = true;
    worst = std::max(worst, best);
  }
  return worst;
}

ConcatenatedDictionary dictionary_from(const Eigen::MatrixXd& atoms) {
  ArchetypalDictionary dict;
  dict.D = atoms;
  dict.d = static_cast<std::uint32_t>(atoms.cols());
  dict.class_label = "only";
  return ConcatenatedDictionary({dict});
}

}  // namespace

TEST_CASE("triangle vertices are their own archetypes") {
  Eigen::MatrixXd X(2, 3);
  X.col(0) << 0.0, 0.0;
  X.col(1) << 2.0, 0.0;
  X.col(2) << 1.0, 1.5;

  AaConfig cfg;
  cfg.d = 3;
  cfg.seed = 7;
  const ArchetypalDictionary dict = learn_dictionary(matrix_of(X), cfg);

  CHECK(dict.objective_curve.back() < 1e-6);
  CHECK(best_match_error(dict.D, X) < 1e-3);
}

TEST_CASE("as many archetypes as distinct columns reaches zero objective") {
  GaussianSource gauss(11);
  Eigen::MatrixXd X(5, 6);
  for (Eigen::Index j = 0; j < X.cols(); ++j)
    for (Eigen::Index i = 0; i < X.rows(); ++i) X(i, j) = gauss.next();

  AaConfig cfg;
  cfg.d = 6;
  cfg.seed = 3;
  const ArchetypalDictionary dict = learn_dictionary(matrix_of(X), cfg);
  CHECK(dict.objective_curve.back() < 1e-6);
}

TEST_CASE("objective decreases monotonically and factors stay feasible") {
  for (std::uint64_t seed : {1ull, 2ull, 3ull, 4ull, 5ull}) {
    const Eigen::MatrixXd X = blob_data(seed, 12, 80);
    AaConfig cfg;
    cfg.d = 6;
    cfg.seed = seed * 101;
    const ArchetypalDictionary dict = learn_dictionary(matrix_of(X), cfg);

    REQUIRE(!dict.objective_curve.empty());
    for (std::size_t i = 1; i < dict.objective_curve.size(); ++i) {
      CHECK(dict.objective_curve[i] <=
            dict.objective_curve[i - 1] + 1e-8 * std::max(1.0, dict.objective_curve[i - 1]));
    }

    // B columns on the simplex and D = X B as stored.
    REQUIRE(dict.B.rows() == X.cols());
    REQUIRE(dict.B.cols() == 6);
    for (Eigen::Index j = 0; j < dict.B.cols(); ++j) {
      CHECK(dict.B.col(j).minCoeff() >= -1e-12);
      CHECK(std::abs(dict.B.col(j).sum() - 1.0) <= 1e-6);
    }
    CHECK((dict.D - X * dict.B).lpNorm<Eigen::Infinity>() <= 1e-12);
  }
}

TEST_CASE("training input validation") {
  const Eigen::MatrixXd X = blob_data(9, 4, 10);
  AaConfig cfg;
  cfg.d = 11;  // more archetypes than columns
  CHECK_THROWS_WITH_AS(learn_dictionary(matrix_of(X), cfg), "insufficient data for d archetypes",
                       DataError);

  cfg.d = 3;
  Eigen::MatrixXd bad = X;
  bad(2, 5) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_WITH_AS(learn_dictionary(matrix_of(bad), cfg), "invalid data", DataError);

  cfg.d = 1;
  CHECK_THROWS_AS(learn_dictionary(matrix_of(X), cfg), std::invalid_argument);

  cfg.d = 3;
  cfg.tol = 0.0;
  CHECK_THROWS_AS(learn_dictionary(matrix_of(X), cfg), std::invalid_argument);
}

TEST_CASE("learning is deterministic in the seed") {
  const Eigen::MatrixXd X = blob_data(15, 10, 60);
  AaConfig cfg;
  cfg.d = 5;
  cfg.seed = 99;
  const ArchetypalDictionary a = learn_dictionary(matrix_of(X), cfg);
  const ArchetypalDictionary b = learn_dictionary(matrix_of(X), cfg);
  CHECK(a.D == b.D);
  CHECK(a.B == b.B);
  CHECK(a.objective_curve == b.objective_curve);
}

TEST_CASE("concatenation lays out class blocks in order") {
  GaussianSource gauss(31);
  std::vector<ArchetypalDictionary> dicts;
  for (int c = 0; c < 50; ++c) {
    ArchetypalDictionary dict;
    dict.D.resize(20, 25);
    for (Eigen::Index j = 0; j < 25; ++j)
      for (Eigen::Index i = 0; i < 20; ++i) dict.D(i, j) = gauss.next();
    dict.d = 25;
    dict.class_label = "species_" + std::to_string(c);
    dicts.push_back(std::move(dict));
  }
  const ConcatenatedDictionary df(dicts);
  CHECK(df.atom_count() == 1250);
  CHECK(df.class_count() == 50);
  CHECK(df.feature_dim() == 20);

  std::uint32_t covered = 0;
  for (std::uint32_t c = 0; c < 50; ++c) {
    const auto [lo, hi] = df.class_range(c);
    CHECK(lo == covered);
    CHECK(hi == lo + 25);
    covered = hi;
    CHECK(df.class_of(lo) == c);
    CHECK(df.class_of(hi - 1) == c);
  }
  CHECK(covered == 1250);
  CHECK(df.atoms().col(27) == dicts[1].D.col(2));
}

TEST_CASE("encode recovers an archetype exactly") {
  GaussianSource gauss(41);
  Eigen::MatrixXd atoms(9, 7);
  for (Eigen::Index j = 0; j < 7; ++j)
    for (Eigen::Index i = 0; i < 9; ++i) atoms(i, j) = gauss.next();
  const ConcatenatedDictionary df = dictionary_from(atoms);

  for (Eigen::Index j = 0; j < 7; ++j) {
    const ConvexCode y = encode(atoms.col(j), df);
    const Eigen::VectorXd dense = y.dense();
    Eigen::VectorXd expected = Eigen::VectorXd::Zero(7);
    expected(j) = 1.0;
    CHECK((dense - expected).lpNorm<Eigen::Infinity>() <= 1e-4);
  }
}

TEST_CASE("encode matches barycentric coordinates for interior points") {
  std::mt19937_64 rng(51);
  GaussianSource gauss(53);
  Eigen::MatrixXd atoms(6, 3);
  for (Eigen::Index j = 0; j < 3; ++j)
    for (Eigen::Index i = 0; i < 6; ++i) atoms(i, j) = gauss.next();
  const ConcatenatedDictionary df = dictionary_from(atoms);

  for (int trial = 0; trial < 40; ++trial) {
    const Eigen::VectorXd w = test_support::random_simplex_point(rng, 3);
    const ConvexCode y = encode(atoms * w, df);
    const Eigen::Vector3d oracle = test_support::barycentric_coordinates(atoms * w, atoms);
    CHECK((y.dense() - oracle).lpNorm<Eigen::Infinity>() <= 1e-4);
  }
}

TEST_CASE("encode is never worse than a fine simplex grid") {
  GaussianSource gauss(61);
  Eigen::MatrixXd atoms(6, 5);
  for (Eigen::Index j = 0; j < 5; ++j)
    for (Eigen::Index i = 0; i < 6; ++i) atoms(i, j) = gauss.next();
  const ConcatenatedDictionary df = dictionary_from(atoms);
  const auto grid = test_support::simplex_grid(5, 50);

  for (int trial = 0; trial < 25; ++trial) {
    Eigen::VectorXd x(6);
    for (Eigen::Index i = 0; i < 6; ++i) x(i) = gauss.next();
    const double got = (x - atoms * encode(x, df).dense()).squaredNorm();
    double best = std::numeric_limits<double>::infinity();
    for (const auto& y : grid) best = std::min(best, (x - atoms * y).squaredNorm());
    CHECK(got <= best + 1e-9);
  }
}

TEST_CASE("codes are simplex-feasible with bounded support") {
  GaussianSource gauss(71);
  Eigen::MatrixXd atoms(8, 60);
  for (Eigen::Index j = 0; j < 60; ++j)
    for (Eigen::Index i = 0; i < 8; ++i) atoms(i, j) = gauss.next();
  const ConcatenatedDictionary df = dictionary_from(atoms);

  for (int trial = 0; trial < 100; ++trial) {
    Eigen::VectorXd x(8);
    for (Eigen::Index i = 0; i < 8; ++i) x(i) = gauss.next();
    const ConvexCode y = encode(x, df);
    CHECK(std::abs(y.l1() - 1.0) <= 1e-6);
    CHECK(y.support.size() <= 9);  // feature_dim + 1
    for (const auto& [idx, v] : y.support) {
      CHECK(v > 0.0);
      CHECK(idx < 60);
    }
    for (std::size_t i = 1; i < y.support.size(); ++i)
      CHECK(y.support[i - 1].first < y.support[i].first);
  }
}

TEST_CASE("encode rejects mismatched dimensions") {
  GaussianSource gauss(81);
  Eigen::MatrixXd atoms(6, 4);
  for (Eigen::Index j = 0; j < 4; ++j)
    for (Eigen::Index i = 0; i < 6; ++i) atoms(i, j) = gauss.next();
  const ConcatenatedDictionary df = dictionary_from(atoms);
  CHECK_THROWS_WITH_AS(encode(Eigen::VectorXd::Zero(5), df), "dictionary/input mismatch",
                       DataError);
}

TEST_CASE("batched encoding equals repeated single encoding") {
  GaussianSource gauss(91);
  Eigen::MatrixXd atoms(7, 12);
  for (Eigen::Index j = 0; j < 12; ++j)
    for (Eigen::Index i = 0; i < 7; ++i) atoms(i, j) = gauss.next();
  const ConcatenatedDictionary df = dictionary_from(atoms);

  SUBCASE("batch of one") {
    Eigen::MatrixXd X(7, 1);
    for (Eigen::Index i = 0; i < 7; ++i) X(i, 0) = gauss.next();
    const auto batch = encode_batch(matrix_of(X), df);
    REQUIRE(batch.size() == 1);
    const ConvexCode single = encode(X.col(0), df);
    CHECK(batch[0].support == single.support);
  }
  SUBCASE("batch of one hundred") {
    Eigen::MatrixXd X(7, 100);
    for (Eigen::Index j = 0; j < 100; ++j)
      for (Eigen::Index i = 0; i < 7; ++i) X(i, j) = gauss.next();
    const auto batch = encode_batch(matrix_of(X), df);
    REQUIRE(batch.size() == 100);
    for (Eigen::Index j = 0; j < 100; ++j) {
      const ConvexCode single = encode(X.col(j), df);
      CHECK(batch[static_cast<std::size_t>(j)].support == single.support);
    }
  }
  SUBCASE("empty batch") {
    CsfMatrix X;
    X.columns.resize(7, 0);
    CHECK(encode_batch(X, df).empty());
  }
}
