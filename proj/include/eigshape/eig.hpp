#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>

#include "eigshape/fem.hpp"

namespace eigshape {

struct EigenPair {
  double lambda = 0.0;
  Vector coeffs;
  /// ||A u - lambda M u||_2 / lambda, or ||A u||_2 for a zero mode.
  double residual = 0.0;
  /// Neumann constant mode (lambda ~ 0).
  bool zero_mode = false;
};

/// Group of numerically equal eigenvalues with an M-orthonormal basis.
struct EigenCluster {
  std::vector<double> lambdas;
  std::vector<Vector> basis;
  /// Index of the first member in the sorted pair list.
  int first_index = 0;

  int multiplicity() const { return static_cast<int>(lambdas.size()); }
  double mean_lambda() const {
    double s = 0.0;
    for (double l : lambdas) s += l;
    return lambdas.empty() ? 0.0 : s / static_cast<double>(lambdas.size());
  }
};

class NonConvergence : public std::runtime_error {
 public:
  NonConvergence(const std::string& what, double best_residual)
      : std::runtime_error(what), best_residual_(best_residual) {}
  double best_residual() const { return best_residual_; }

 private:
  double best_residual_;
};

class FactorizationFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class SolverMethod { Auto, ShiftInvert, Dense };

struct SolverOptions {
  double tol = 1e-10;
  SolverMethod method = SolverMethod::Auto;
  /// Auto uses the dense solver up to this many dofs.
  int dense_limit = 0;
  /// Krylov basis size per Lanczos run.
  int max_basis = 300;
  int max_runs = 40;
  std::uint64_t seed = 20190817;
  /// Shift; NaN selects 0 (Dirichlet) or -1 (Neumann).
  double sigma = std::numeric_limits<double>::quiet_NaN();
};

namespace detail {

inline double relative_residual(const SparseSymMatrix& A, const SparseSymMatrix& M,
                                const Vector& u, double lambda, bool zero_mode) {
  const Vector r = A * u - lambda * (M * u);
  return zero_mode ? r.norm() : r.norm() / std::abs(lambda);
}

inline void flag_zero_modes(std::vector<EigenPair>& pairs, BoundaryCondition bc) {
  if (bc != BoundaryCondition::Neumann || pairs.empty()) return;
  double scale = 1.0;
  for (const auto& p : pairs) scale = std::max(scale, std::abs(p.lambda));
  for (auto& p : pairs) p.zero_mode = std::abs(p.lambda) < 1e-8 * scale;
}

struct RitzPair {
  double theta;
  Vector vec;
  double estimate;
};

// Shift-invert Lanczos on OP = (A - sigma M)^{-1} M, self-adjoint in the
// M inner product. Every new Krylov vector is orthogonalised (classical
// Gram-Schmidt, two passes) against `locked` and the current basis.
// Returns the leading Ritz pairs that satisfy the residual estimate, at
// most `want` of them, ordered by decreasing theta.
template <class Solver>
std::vector<RitzPair> lanczos_run(const Solver& solver, const SparseSymMatrix& M,
                                  const std::vector<Vector>& locked, int want, int max_basis,
                                  double tol, std::mt19937_64& rng, double& best_estimate) {
  const Eigen::Index n = M.rows();
  const int m_max = static_cast<int>(std::min<Eigen::Index>(max_basis, n - locked.size()));
  if (m_max <= 0) return {};
  std::uniform_real_distribution<double> uni(-1.0, 1.0);

  const auto orthogonalize = [&](Vector& w, const std::vector<Vector>& Q) {
    for (int pass = 0; pass < 2; ++pass) {
      const Vector mw = M * w;
      for (const auto& y : locked) w -= y.dot(mw) * y;
      for (const auto& q : Q) w -= q.dot(mw) * q;
    }
  };

  std::vector<Vector> Q;
  Q.reserve(m_max);
  Vector q(n);
  for (Eigen::Index i = 0; i < n; ++i) q[i] = uni(rng);
  orthogonalize(q, Q);
  q /= std::sqrt(q.dot(M * q));

  std::vector<double> alpha, beta;
  best_estimate = std::numeric_limits<double>::infinity();
  std::vector<RitzPair> result;
  for (int j = 0; j < m_max; ++j) {
    Q.push_back(q);
    const Vector mq = M * q;
    Vector w = solver.solve(mq);
    const double a = w.dot(mq);
    alpha.push_back(a);
    w -= a * q;
    if (j > 0) w -= beta.back() * Q[j - 1];
    orthogonalize(w, Q);
    const double b = std::sqrt(std::max(0.0, w.dot(M * w)));
    const bool exhausted = (j + 1 == m_max) || b <= 1e-14 * std::abs(a);

    const int m = j + 1;
    if (m >= want && (m % 4 == 0 || exhausted || m < 8)) {
      Eigen::VectorXd diag(m), sub(std::max(m - 1, 1));
      for (int i = 0; i < m; ++i) diag[i] = alpha[i];
      for (int i = 0; i + 1 < m; ++i) sub[i] = beta[i];
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri;
      if (m == 1) {
        Eigen::MatrixXd t(1, 1);
        t(0, 0) = diag[0];
        tri.compute(t);
      } else {
        tri.computeFromTridiagonal(diag, sub.head(m - 1));
      }
      const auto& theta = tri.eigenvalues();  // ascending
      const auto& S = tri.eigenvectors();
      int converged = 0;
      for (int i = m - 1; i >= 0 && converged < want; --i) {
        const double est = b * std::abs(S(m - 1, i));
        if (converged == 0) best_estimate = std::min(best_estimate, est / std::abs(theta[i]));
        if (est <= tol * std::abs(theta[i]) || (exhausted && b <= 1e-14 * std::abs(a))) {
          ++converged;
        } else {
          break;
        }
      }
      if (converged >= want || exhausted) {
        for (int c = 0; c < converged; ++c) {
          const int i = m - 1 - c;
          Vector u = Vector::Zero(n);
          for (int l = 0; l < m; ++l) u += S(l, i) * Q[l];
          u /= std::sqrt(u.dot(M * u));
          result.push_back({theta[i], std::move(u), b * std::abs(S(m - 1, i))});
        }
        return result;
      }
    }
    beta.push_back(b);
    q = w / b;
  }
  return result;
}

inline std::vector<EigenPair> solve_dense(const SparseSymMatrix& A, const SparseSymMatrix& M,
                                          int k) {
  const Eigen::MatrixXd a = Eigen::MatrixXd(A);
  const Eigen::MatrixXd m = Eigen::MatrixXd(M);
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(a, m);
  if (es.info() != Eigen::Success)
    throw FactorizationFailure("dense generalized eigensolver failed");
  std::vector<EigenPair> out;
  for (int i = 0; i < k; ++i) {
    EigenPair p;
    p.lambda = es.eigenvalues()[i];
    p.coeffs = es.eigenvectors().col(i);
    p.coeffs /= std::sqrt(p.coeffs.dot(M * p.coeffs));
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace detail

/// The k smallest eigenpairs of A u = lambda M u in nondecreasing order,
/// M-orthonormal. For Neumann problems the constant mode is part of the
/// ordering and carries `zero_mode = true`.
inline std::vector<EigenPair> solve_lowest(const SparseSymMatrix& A, const SparseSymMatrix& M,
                                           int k, BoundaryCondition bc,
                                           const SolverOptions& opts = {}) {
  if (A.rows() != A.cols() || M.rows() != M.cols() || A.rows() != M.rows())
    throw std::invalid_argument("solve_lowest: dimension mismatch");
  if (k < 1) throw std::invalid_argument("solve_lowest: k must be >= 1");
  if (k > A.rows()) throw std::invalid_argument("solve_lowest: k exceeds dimension");
  if (!(opts.tol > 0.0)) throw std::invalid_argument("solve_lowest: tol must be positive");

  const bool dense = opts.method == SolverMethod::Dense ||
                     (opts.method == SolverMethod::Auto && A.rows() <= opts.dense_limit);
  std::vector<EigenPair> pairs;
  if (dense) {
    pairs = detail::solve_dense(A, M, k);
  } else {
    const double sigma = std::isnan(opts.sigma)
                             ? (bc == BoundaryCondition::Dirichlet ? 0.0 : -1.0)
                             : opts.sigma;
    const SparseSymMatrix shifted = A - sigma * M;
    Eigen::SimplicialLDLT<SparseSymMatrix> solver(shifted);
    if (solver.info() != Eigen::Success)
      throw FactorizationFailure("sparse LDLT factorization of A - sigma M failed");
    const Vector d = solver.vectorD().cwiseAbs();
    if (!(d.minCoeff() > 1e-13 * d.maxCoeff()))
      throw FactorizationFailure("A - sigma M is numerically singular; choose another shift");

    std::mt19937_64 rng(opts.seed);
    std::vector<detail::RitzPair> locked;
    const double inner_tol = opts.tol * 1e-3;
    double best = std::numeric_limits<double>::infinity();
    bool done = false;
    for (int run = 0; run < opts.max_runs && !done; ++run) {
      std::vector<Vector> basis;
      for (const auto& l : locked) basis.push_back(l.vec);
      if (static_cast<Eigen::Index>(basis.size()) >= A.rows()) {
        // whole spectrum locked
        done = static_cast<int>(locked.size()) >= k;
        break;
      }
      const int have = static_cast<int>(locked.size());
      const int want = std::max(1, k - have);
      double est = 0.0;
      auto found = detail::lanczos_run(solver, M, basis, want, opts.max_basis, inner_tol, rng, est);
      best = std::min(best, est);
      if (found.empty())
        throw NonConvergence("shift-invert Lanczos: iteration budget exhausted", best);
      if (have >= k) {
        // every eigenvalue below lambda_k is locked once the complement's
        // top Ritz value lies at or beyond the k-th locked one
        if (found.front().theta <= locked[k - 1].theta) done = true;
      }
      for (auto& f : found) locked.push_back(std::move(f));
      std::stable_sort(locked.begin(), locked.end(),
                       [](const auto& l, const auto& r) { return l.theta > r.theta; });
    }
    if (!done) throw NonConvergence("shift-invert Lanczos: restart budget exhausted", best);
    for (int i = 0; i < k; ++i) {
      EigenPair p;
      p.lambda = sigma + 1.0 / locked[i].theta;
      p.coeffs = std::move(locked[i].vec);
      pairs.push_back(std::move(p));
    }
  }
  detail::flag_zero_modes(pairs, bc);
  for (auto& p : pairs) p.residual = detail::relative_residual(A, M, p.coeffs, p.lambda, p.zero_mode);
  return pairs;
}

/// M-orthonormalise `vs` in place (modified Gram-Schmidt, two passes).
inline void m_orthonormalize(std::vector<Vector>& vs, const SparseSymMatrix& M) {
  for (std::size_t i = 0; i < vs.size(); ++i) {
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t j = 0; j < i; ++j) vs[i] -= vs[j].dot(M * vs[i]) * vs[j];
    }
    const double nrm = std::sqrt(vs[i].dot(M * vs[i]));
    if (!(nrm > 0.0)) throw std::invalid_argument("m_orthonormalize: linearly dependent vectors");
    vs[i] /= nrm;
  }
}

/// Greedy grouping of sorted eigenpairs: lambda_{j+1} joins the current
/// cluster when |lambda_{j+1} - lambda_j| <= rel_gap * |lambda_j|.
inline std::vector<EigenCluster> cluster(const std::vector<EigenPair>& pairs, double rel_gap,
                                         const SparseSymMatrix& M) {
  std::vector<EigenCluster> out;
  for (std::size_t j = 0; j < pairs.size(); ++j) {
    const bool join = j > 0 && !pairs[j].zero_mode && !pairs[j - 1].zero_mode &&
                      std::abs(pairs[j].lambda - pairs[j - 1].lambda) <=
                          rel_gap * std::abs(pairs[j - 1].lambda);
    if (!join) {
      out.emplace_back();
      out.back().first_index = static_cast<int>(j);
    }
    out.back().lambdas.push_back(pairs[j].lambda);
    out.back().basis.push_back(pairs[j].coeffs);
  }
  for (auto& c : out) m_orthonormalize(c.basis, M);
  return out;
}

/// Flip the sign of `pair` so that its M-inner product with `reference`
/// (dof coefficients) is nonnegative.
inline EigenPair align_sign(EigenPair pair, const Vector& reference, const SparseSymMatrix& M) {
  if (reference.size() != pair.coeffs.size())
    throw std::invalid_argument("align_sign: reference has wrong size");
  if (pair.coeffs.dot(M * reference) < 0.0) pair.coeffs = -pair.coeffs;
  return pair;
}

}  // namespace eigshape
