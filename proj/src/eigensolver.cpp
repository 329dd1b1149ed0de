#include "spatspec/eigensolver.hpp"

#include <lapacke.h>

#include <algorithm>
#include <random>
#include <string>
#include <vector>

#include "spatspec/geometry.hpp"

namespace spatspec {

EigenPairs dense_top_eigenpairs(const Eigen::MatrixXd& a, int count, double min_value) {
  const lapack_int n = static_cast<lapack_int>(a.rows());
  if (n == 0 || a.cols() != a.rows()) throw NumericalError("eigensolver: matrix must be square");
  std::vector<double> work(a.data(), a.data() + a.size());
  std::vector<double> w(static_cast<std::size_t>(n));
  std::vector<lapack_int> isuppz(2 * static_cast<std::size_t>(n));
  lapack_int m = 0;
  Eigen::MatrixXd z;
  lapack_int info;
  if (count > 0) {
    const lapack_int k = std::min<lapack_int>(count, n);
    z.resize(n, k);
    info = LAPACKE_dsyevr(LAPACK_COL_MAJOR, 'V', 'I', 'L', n, work.data(), n, 0.0, 0.0, n - k + 1, n,
                          0.0, &m, w.data(), z.data(), n, isuppz.data());
  } else {
    z.resize(n, n);
    const double upper = 1e300;
    info = LAPACKE_dsyevr(LAPACK_COL_MAJOR, 'V', 'V', 'L', n, work.data(), n, min_value, upper, 0, 0,
                          0.0, &m, w.data(), z.data(), n, isuppz.data());
  }
  if (info != 0) throw NumericalError("LAPACKE_dsyevr failed with info " + std::to_string(info));
  EigenPairs out;
  out.values.resize(m);
  out.vectors.resize(n, m);
  // dsyevr returns ascending order.
  for (lapack_int j = 0; j < m; ++j) {
    out.values[j] = w[static_cast<std::size_t>(m - 1 - j)];
    out.vectors.col(j) = z.col(m - 1 - j);
  }
  return out;
}

EigenPairs lanczos_top_eigenpairs(int n, const MatVec& op, int nev, double scale,
                                  const LanczosOptions& opt) {
  if (nev <= 0 || nev > n) throw NumericalError("lanczos: invalid number of eigenpairs");
  const int basis = std::min(n, opt.basis > 0 ? opt.basis : 2 * nev + 20);
  if (basis <= nev || n <= basis) {
    // Small problems: assemble the matrix column by column.
    Eigen::MatrixXd a(n, n);
    Eigen::VectorXd e = Eigen::VectorXd::Zero(n), y(n);
    for (int j = 0; j < n; ++j) {
      e[j] = 1.0;
      op(e, y);
      a.col(j) = y;
      e[j] = 0.0;
    }
    a = 0.5 * (a + a.transpose()).eval();
    return dense_top_eigenpairs(a, nev);
  }

  Eigen::MatrixXd v(n, basis), av(n, basis);
  std::mt19937_64 rng(opt.seed);
  std::normal_distribution<double> nd;
  Eigen::VectorXd w(n);
  for (int i = 0; i < n; ++i) w[i] = nd(rng);

  auto orthonormalize = [&](Eigen::VectorXd& x, int cols) -> bool {
    const double before = x.norm();
    for (int pass = 0; pass < 2; ++pass)
      if (cols > 0) x -= v.leftCols(cols) * (v.leftCols(cols).transpose() * x);
    const double after = x.norm();
    if (!(after > 1e-10 * before) || after == 0.0) return false;
    x /= after;
    return true;
  };

  int k = 0;  // vectors currently held
  Eigen::VectorXd y(n);
  for (int restart = 0; restart <= opt.max_restarts; ++restart) {
    while (k < basis) {
      if (!orthonormalize(w, k)) {
        for (int i = 0; i < n; ++i) w[i] = nd(rng);
        if (!orthonormalize(w, k)) throw NumericalError("lanczos: basis breakdown");
      }
      v.col(k) = w;
      op(w, y);
      av.col(k) = y;
      w = y;
      ++k;
    }
    Eigen::MatrixXd h = v.transpose() * av;
    h = 0.5 * (h + h.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
    // Keep the largest `keep` Ritz pairs for the restart.
    const int keep = std::min(basis - 1, std::max(nev + (basis - nev) / 2, nev + 1));
    Eigen::MatrixXd s(basis, keep);
    Eigen::VectorXd theta(keep);
    for (int j = 0; j < keep; ++j) {
      s.col(j) = es.eigenvectors().col(basis - 1 - j);
      theta[j] = es.eigenvalues()[basis - 1 - j];
    }
    Eigen::MatrixXd ritz = v * s;
    Eigen::MatrixXd aritz = av * s;
    Eigen::MatrixXd resid = aritz - ritz * theta.asDiagonal();
    int first_bad = -1;
    for (int j = 0; j < nev; ++j)
      if (resid.col(j).norm() > opt.tol * scale) {
        first_bad = j;
        break;
      }
    if (first_bad < 0) {
      EigenPairs out;
      out.values = theta.head(nev);
      out.vectors = ritz.leftCols(nev);
      return out;
    }
    v.leftCols(keep) = ritz;
    av.leftCols(keep) = aritz;
    k = keep;
    w = resid.col(first_bad);
  }
  throw NumericalError("lanczos: no convergence after " + std::to_string(opt.max_restarts) +
                       " restarts");
}

}  // namespace spatspec
