// Shared helpers for the unit tests: independent oracles (direct DFT,
// barycentric solve, simplex-grid enumeration, exhaustive medoid search)
// and small input factories. Oracles here deliberately avoid the library's
// own FFT/solver code paths.
#ifndef CONVHASH_TESTS_SUPPORT_HPP
#define CONVHASH_TESTS_SUPPORT_HPP

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "convhash/codes.hpp"
#include "convhash/common.hpp"

namespace test_support {

/// Magnitude of the length-n DFT of `frame` at bin b, by direct summation.
inline double direct_dft_magnitude(const std::vector<double>& frame, std::size_t n,
                                   std::size_t b) {
  std::complex<double> acc(0.0, 0.0);
  for (std::size_t t = 0; t < frame.size(); ++t) {
    const double angle = -2.0 * M_PI * static_cast<double>(b) * static_cast<double>(t) /
                         static_cast<double>(n);
    acc += frame[t] * std::complex<double>(std::cos(angle), std::sin(angle));
  }
  return std::abs(acc);
}

/// Barycentric coordinates of x w.r.t. the columns of V (K x 3), assuming x
/// lies in their affine span: solve [V; 1^T] w = [x; 1] by least squares.
inline Eigen::Vector3d barycentric_coordinates(const Eigen::VectorXd& x,
                                               const Eigen::MatrixXd& V) {
  Eigen::MatrixXd A(V.rows() + 1, 3);
  A.topRows(V.rows()) = V;
  A.row(V.rows()).setOnes();
  Eigen::VectorXd rhs(x.size() + 1);
  rhs.head(x.size()) = x;
  rhs(x.size()) = 1.0;
  return A.colPivHouseholderQr().solve(rhs);
}

/// All points of the simplex grid { y in Delta_dim : y_i = k_i * step } for
/// step = 1/steps, enumerated by composition of `steps` into dim parts.
inline std::vector<Eigen::VectorXd> simplex_grid(int dim, int steps) {
  std::vector<Eigen::VectorXd> points;
  Eigen::VectorXd current = Eigen::VectorXd::Zero(dim);
  const double step = 1.0 / steps;
  // Recursive composition enumeration without recursion: odometer over the
  // first dim-1 coordinates, last coordinate absorbs the remainder.
  std::vector<int> counts(static_cast<std::size_t>(dim) - 1, 0);
  while (true) {
    int used = 0;
    for (int c : counts) used += c;
    if (used <= steps) {
      for (int i = 0; i + 1 < dim; ++i) current(i) = counts[static_cast<std::size_t>(i)] * step;
      current(dim - 1) = (steps - used) * step;
      points.push_back(current);
    }
    // Odometer increment, skipping states whose prefix already exceeds steps.
    int pos = 0;
    while (pos + 1 < dim) {
      ++counts[static_cast<std::size_t>(pos)];
      int total = 0;
      for (int c : counts) total += c;
      if (total <= steps) break;
      counts[static_cast<std::size_t>(pos)] = 0;
      ++pos;
    }
    if (pos + 1 >= dim) break;
  }
  return points;
}

/// Exhaustive-best medoid pair for n codes at T=2 under 1 - jaccard_bits:
/// returns indices (i, j) minimizing total assignment distance.
inline std::pair<std::size_t, std::size_t> exhaustive_medoid_pair(
    const std::vector<convhash::ConvCode>& codes, double* best_cost = nullptr) {
  const std::size_t n = codes.size();
  Eigen::MatrixXd dist(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      dist(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          1.0 - convhash::jaccard_bits(codes[i], codes[j]);
  double best = std::numeric_limits<double>::infinity();
  std::pair<std::size_t, std::size_t> arg{0, 0};
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      double total = 0.0;
      for (std::size_t k = 0; k < n; ++k)
        total += std::min(dist(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(i)),
                          dist(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j)));
      if (total < best) {
        best = total;
        arg = {i, j};
      }
    }
  }
  if (best_cost) *best_cost = best;
  return arg;
}

/// Uniform random point on the simplex (exponential trick).
inline Eigen::VectorXd random_simplex_point(std::mt19937_64& rng, int dim) {
  Eigen::VectorXd y(dim);
  double total = 0.0;
  for (int i = 0; i < dim; ++i) {
    y(i) = -std::log(convhash::uniform_unit(rng));
    total += y(i);
  }
  return y / total;
}

/// ConvCode with exactly the given bit indices set.
inline convhash::ConvCode code_with_bits(std::uint32_t width,
                                         const std::vector<std::uint32_t>& ones) {
  convhash::ConvCode code;
  code.bits = width;
  code.words.assign((width + 63) / 64, 0);
  for (std::uint32_t b : ones) code.set_bit(b);
  return code;
}

/// Fresh scratch directory under the system temp dir, unique per tag.
inline std::filesystem::path scratch_dir(const std::string& tag) {
  const auto dir = std::filesystem::temp_directory_path() / ("convhash_test_" + tag);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace test_support

#endif  // CONVHASH_TESTS_SUPPORT_HPP
