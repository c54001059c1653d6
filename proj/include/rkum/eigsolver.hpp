#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include <Eigen/Dense>

#include "rkum/error.hpp"
#include "rkum/kernels.hpp"

namespace rkum {

/// Leading eigenpairs of a symmetric-definite pencil A v = lambda B v.
struct GenEigResult {
  Eigen::VectorXd values;   // descending
  Eigen::MatrixXd vectors;  // columns, v^T B v = 1
  bool b_normalized = true;
  bool jittered = false;    // B needed the one-off diagonal jitter
};

namespace detail {
/// Flips v so that its first nonzero coordinate is positive.
inline void fix_sign(Eigen::Ref<Eigen::VectorXd> v) {
  const double cutoff = 1e-14 * v.cwiseAbs().maxCoeff();
  for (Index k = 0; k < v.size(); ++k) {
    if (std::abs(v(k)) > cutoff) {
      if (v(k) < 0.0) v = -v;
      return;
    }
  }
}
}  // namespace detail

/// Solves A v = lambda B v by Cholesky reduction B = L L^T, so that
/// L^{-1} A L^{-T} u = lambda u and v = L^{-T} u. If B is not numerically
/// positive definite, a single jitter of 1e-6 * trace(B) / n is added.
inline GenEigResult sym_gen_eig(const Eigen::MatrixXd& a_in, const Eigen::MatrixXd& b_in,
                                Index ncomp) {
  const Index n = a_in.rows();
  if (a_in.cols() != n || b_in.rows() != n || b_in.cols() != n)
    throw DimensionError("pencil matrices must be square and of equal size");
  if (ncomp < 1 || ncomp > n) throw DimensionError("ncomp must be in [1, n]");

  const Eigen::MatrixXd a = 0.5 * (a_in + a_in.transpose());
  Eigen::MatrixXd b = 0.5 * (b_in + b_in.transpose());

  GenEigResult out;
  Eigen::LLT<Eigen::MatrixXd> llt(b);
  if (llt.info() != Eigen::Success) {
    const double jitter = 1e-6 * b.trace() / static_cast<double>(n);
    b.diagonal().array() += jitter;
    llt.compute(b);
    out.jittered = true;
    if (llt.info() != Eigen::Success || !(jitter > 0.0))
      throw NumericalError("constraint matrix singular");
  }
  const auto l = llt.matrixL();

  // C = L^{-1} A L^{-T}
  Eigen::MatrixXd c = l.solve(a);
  c = l.solve(c.transpose()).eval();
  c = (0.5 * (c + c.transpose())).eval();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(c);
  if (es.info() != Eigen::Success) throw NumericalError("symmetric eigensolver failed");

  // Eigen returns ascending order.
  out.values.resize(ncomp);
  Eigen::MatrixXd u(n, ncomp);
  for (Index k = 0; k < ncomp; ++k) {
    out.values(k) = es.eigenvalues()(n - 1 - k);
    u.col(k) = es.eigenvectors().col(n - 1 - k);
  }
  out.vectors = llt.matrixU().solve(u);
  for (Index k = 0; k < ncomp; ++k) detail::fix_sign(out.vectors.col(k));
  return out;
}

}  // namespace rkum
