#ifndef CONVHASH_SIMPLEX_HPP
#define CONVHASH_SIMPLEX_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

namespace convhash {

struct SimplexFit {
  std::vector<std::uint32_t> support;  // ascending indices with positive weight
  Eigen::VectorXd coeffs;              // same order as support
  double multiplier = 0.0;             // equality-constraint multiplier at the solution
  int iterations = 0;
};

struct SimplexOptions {
  double tol = 1e-9;          // relative KKT violation tolerance
  int max_support = 0;        // 0 = unbounded; encode passes K+1
  int max_iterations = 0;     // 0 = default 10*n
};

/// Active-set solve of   min_y  1/2 y'Gy - c'y   s.t.  y >= 0, sum(y) = 1.
///
/// With G = D'D and c = D'x this minimizes 1/2 ||x - Dy||^2 up to the
/// constant 1/2 ||x||^2, i.e. least squares over the probability simplex.
///
/// Starts from the best-correlated atom (argmax c, ties to the lower
/// index), alternates equality-constrained solves on the active set with
/// boundary line searches that drop atoms pinned at zero, and admits the
/// most violating atom until the KKT residual gap closes. Deterministic.
SimplexFit simplex_ls(const Eigen::MatrixXd& G, const Eigen::VectorXd& c,
                      const SimplexOptions& opt = {});

/// Convenience form building the Gram pair from D and x.
SimplexFit simplex_ls_dense(const Eigen::MatrixXd& D, const Eigen::VectorXd& x,
                            const SimplexOptions& opt = {});

}  // namespace convhash

#endif  // CONVHASH_SIMPLEX_HPP
