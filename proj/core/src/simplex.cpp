#include "convhash/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace convhash {

namespace {

// Equality-constrained solve on the active set:
//   min 1/2 y'G_AA y - c_A'y   s.t. 1'y = 1
// Solved by eliminating the multiplier through two SPD solves.
// Returns false when the Cholesky factorization fails even with ridge.
bool solve_on_active(const Eigen::MatrixXd& G, const Eigen::VectorXd& c,
                     const std::vector<std::uint32_t>& active, Eigen::VectorXd& y_out,
                     double& mu_out) {
  const Eigen::Index k = static_cast<Eigen::Index>(active.size());
  Eigen::MatrixXd gaa(k, k);
  Eigen::VectorXd ca(k);
  for (Eigen::Index i = 0; i < k; ++i) {
    ca(i) = c(active[static_cast<std::size_t>(i)]);
    for (Eigen::Index j = 0; j < k; ++j) {
      gaa(i, j) = G(active[static_cast<std::size_t>(i)], active[static_cast<std::size_t>(j)]);
    }
  }

  double ridge = 1e-12 * std::max(1.0, gaa.diagonal().maxCoeff());
  for (int attempt = 0; attempt < 4; ++attempt) {
    Eigen::MatrixXd reg = gaa;
    reg.diagonal().array() += ridge;
    Eigen::LLT<Eigen::MatrixXd> llt(reg);
    if (llt.info() == Eigen::Success) {
      const Eigen::VectorXd u = llt.solve(ca);
      const Eigen::VectorXd v = llt.solve(Eigen::VectorXd::Ones(k));
      const double denom = v.sum();
      if (std::abs(denom) > 1e-300) {
        mu_out = (u.sum() - 1.0) / denom;
        y_out = u - mu_out * v;
        return true;
      }
    }
    ridge *= 1e4;
  }
  return false;
}

}  // namespace

SimplexFit simplex_ls(const Eigen::MatrixXd& G, const Eigen::VectorXd& c,
                      const SimplexOptions& opt) {
  const Eigen::Index n = G.rows();
  if (G.cols() != n || c.size() != n) throw std::invalid_argument("gram/linear term mismatch");
  if (n == 0) throw std::invalid_argument("empty dictionary");

  const int max_iter =
      opt.max_iterations > 0 ? opt.max_iterations : static_cast<int>(10 * n) + 50;
  const double tol = opt.tol * std::max(1.0, c.cwiseAbs().maxCoeff());

  // Best-correlated atom, ties to the lower index.
  Eigen::Index start = 0;
  for (Eigen::Index j = 1; j < n; ++j) {
    if (c(j) > c(start)) start = j;
  }

  std::vector<std::uint32_t> active{static_cast<std::uint32_t>(start)};
  Eigen::VectorXd y = Eigen::VectorXd::Ones(1);
  double mu = 0.0;

  SimplexFit fit;
  for (fit.iterations = 0; fit.iterations < max_iter; ++fit.iterations) {
    Eigen::VectorXd y_star;
    if (!solve_on_active(G, c, active, y_star, mu)) break;

    if (y_star.minCoeff() >= 0.0) {
      y = y_star;

      // KKT check: on the support g = mu exactly; a zero coefficient with
      // g_j > mu can still improve the fit.
      Eigen::VectorXd g = c;
      for (std::size_t i = 0; i < active.size(); ++i) {
        g.noalias() -= y(static_cast<Eigen::Index>(i)) * G.col(active[i]);
      }
      Eigen::Index best = -1;
      double best_gap = tol;
      std::size_t cursor = 0;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (cursor < active.size() && active[cursor] == static_cast<std::uint32_t>(j)) {
          ++cursor;
          continue;
        }
        const double gap = g(j) - mu;
        if (gap > best_gap) {
          best_gap = gap;
          best = j;
        }
      }
      if (best < 0) break;
      if (opt.max_support > 0 &&
          active.size() >= static_cast<std::size_t>(opt.max_support)) {
        break;
      }

      const auto pos = std::lower_bound(active.begin(), active.end(),
                                        static_cast<std::uint32_t>(best));
      const Eigen::Index ins = pos - active.begin();
      active.insert(pos, static_cast<std::uint32_t>(best));
      Eigen::VectorXd grown(active.size());
      for (Eigen::Index i = 0; i < ins; ++i) grown(i) = y(i);
      grown(ins) = 0.0;
      for (Eigen::Index i = ins; i < y.size(); ++i) grown(i + 1) = y(i);
      y = std::move(grown);
    } else {
      // Walk from y toward y_star until the first coefficient pins at zero.
      double alpha = 1.0;
      std::size_t blocker = active.size();
      for (Eigen::Index i = 0; i < y_star.size(); ++i) {
        if (y_star(i) < 0.0) {
          const double step = y(i) / (y(i) - y_star(i));
          if (step < alpha) {
            alpha = step;
            blocker = static_cast<std::size_t>(i);
          }
        }
      }
      y += alpha * (y_star - y);

      std::vector<std::uint32_t> kept;
      Eigen::VectorXd kept_y(y.size());
      Eigen::Index kn = 0;
      for (std::size_t i = 0; i < active.size(); ++i) {
        if (i == blocker || y(static_cast<Eigen::Index>(i)) <= 1e-15) continue;
        kept.push_back(active[i]);
        kept_y(kn++) = y(static_cast<Eigen::Index>(i));
      }
      if (kept.empty()) {
        // Degenerate collapse; keep the blocker alone at weight one.
        kept.push_back(active[blocker]);
        kept_y(0) = 1.0;
        kn = 1;
      }
      active = std::move(kept);
      y = kept_y.head(kn);
    }
  }

  fit.support = std::move(active);
  fit.coeffs = std::move(y);
  fit.multiplier = mu;
  return fit;
}

SimplexFit simplex_ls_dense(const Eigen::MatrixXd& D, const Eigen::VectorXd& x,
                            const SimplexOptions& opt) {
  if (D.rows() != x.size()) throw std::invalid_argument("dictionary/input mismatch");
  Eigen::MatrixXd G(D.cols(), D.cols());
  G.setZero();
  G.selfadjointView<Eigen::Lower>().rankUpdate(D.transpose());
  G.triangularView<Eigen::StrictlyUpper>() = G.transpose();
  return simplex_ls(G, D.transpose() * x, opt);
}

}  // namespace convhash
