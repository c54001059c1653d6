#pragma once

// Empirical influence functions of kernel canonical correlations and
// canonical variates, and influence-based outlier ranking.
//
// For the j-th component with correlation rho and unit-variance variates
// x = f~_jX(X'), y = f~_jY(Y'), the influence of a point mass at (X', Y') on
// rho^2 is
//   IF = -rho^2 x^2 + 2 rho x y - rho^2 y^2,
// evaluated at every training sample to give the empirical profile.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rkum/error.hpp"
#include "rkum/kcca.hpp"
#include "rkum/kernels.hpp"

namespace rkum {

enum class InfluenceMethod { linear_cca, kernel_cca, robust_kernel_cca, multiple_kernel_cca };

inline std::string to_string(InfluenceMethod m) {
  switch (m) {
    case InfluenceMethod::linear_cca: return "linear-cca";
    case InfluenceMethod::kernel_cca: return "kernel-cca";
    case InfluenceMethod::robust_kernel_cca: return "robust-kernel-cca";
    case InfluenceMethod::multiple_kernel_cca: return "multiple-kernel-cca";
  }
  return "?";
}

struct InfluenceProfile {
  Index component = 0;  // 0-based
  Eigen::VectorXd values;
  InfluenceMethod method = InfluenceMethod::kernel_cca;
};

/// Influence of the point (X_i, Y_i) on the j-th canonical functions, as
/// functions in the span of the centered training features. `x_alpha` gives
/// the X-side function as G_X * x_alpha; `x_values` is that product.
struct CvInfluence {
  Index component = 0;
  Index sample = 0;
  Eigen::VectorXd x_alpha, y_alpha;
  Eigen::VectorXd x_values, y_values;
};

namespace detail {

inline double corr_influence(double rho, double x, double y) {
  const double r2 = rho * rho;
  return -r2 * x * x + 2.0 * rho * x * y - r2 * y * y;
}

inline void check_component(Index j, Index ncomp) {
  if (j < 0 || j >= ncomp) throw DimensionError("component index out of range");
}

/// Orthonormal coordinates of the centered features: G = U diag(lambda) U^T
/// restricted to lambda > 1e-10 * max(lambda), with feature matrix
/// F = diag(sqrt(lambda)) U^T (so F^T F = G).
struct FeatureBasis {
  Eigen::MatrixXd u;
  Eigen::VectorXd sqrt_lambda;
  Eigen::MatrixXd f;  // r x n

  explicit FeatureBasis(const GramMatrix& g) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g);
    if (es.info() != Eigen::Success) throw NumericalError("eigen-decomposition of Gram failed");
    const Eigen::VectorXd& lam = es.eigenvalues();
    const double cutoff = 1e-10 * std::max(lam.maxCoeff(), 0.0);
    std::vector<Index> keep;
    for (Index k = lam.size() - 1; k >= 0; --k)
      if (lam(k) > cutoff) keep.push_back(k);
    if (keep.empty()) throw NumericalError("centered Gram matrix is zero");
    const auto r = static_cast<Index>(keep.size());
    u.resize(g.rows(), r);
    sqrt_lambda.resize(r);
    for (Index k = 0; k < r; ++k) {
      u.col(k) = es.eigenvectors().col(keep[k]);
      sqrt_lambda(k) = std::sqrt(lam(keep[k]));
    }
    f = sqrt_lambda.asDiagonal() * u.transpose();
  }

  /// Feature coordinates of the function whose training evaluations are `values`.
  Eigen::VectorXd coords_of(const Eigen::VectorXd& values) const {
    return sqrt_lambda.cwiseInverse().asDiagonal() * (u.transpose() * values);
  }

  /// Dual coefficients alpha with G alpha = F^T coords.
  Eigen::VectorXd alpha_of(const Eigen::VectorXd& coords) const {
    return u * (sqrt_lambda.cwiseInverse().asDiagonal() * coords);
  }
};

inline Eigen::MatrixXd regularized_cov(const Eigen::MatrixXd& fa, const Eigen::MatrixXd& fb,
                                       const Eigen::VectorXd& w) {
  return fa * w.asDiagonal() * fb.transpose();
}

/// L = S^{-1/2} (M - mu_j I)^+ S^{-1/2}, with M = S^{-1/2} C T^{-1} C^T S^{-1/2},
/// the pseudo-inverse taken on the complement of the j-th eigenvector.
/// Also returns C T^{-1} for the cross term.
struct SideOperators {
  Eigen::MatrixXd l;
  Eigen::MatrixXd cross_times_inv;
};

inline SideOperators side_operators(const Eigen::MatrixXd& s_own, const Eigen::MatrixXd& s_other,
                                    const Eigen::MatrixXd& cross, Index j) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s_own);
  if (es.info() != Eigen::Success || es.eigenvalues().minCoeff() <= 0.0)
    throw NumericalError("singular regularized covariance");
  const Eigen::MatrixXd s_inv_sqrt = es.operatorInverseSqrt();

  Eigen::LLT<Eigen::MatrixXd> other(s_other);
  if (other.info() != Eigen::Success) throw NumericalError("singular regularized covariance");
  SideOperators out;
  out.cross_times_inv = other.solve(cross.transpose()).transpose();

  Eigen::MatrixXd m = s_inv_sqrt * out.cross_times_inv * cross.transpose() * s_inv_sqrt;
  m = (0.5 * (m + m.transpose())).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ms(m);
  const Index r = m.rows();
  if (j >= r) throw DimensionError("component exceeds the feature-space rank");
  const Eigen::VectorXd mu = ms.eigenvalues().reverse();
  const Eigen::MatrixXd q = ms.eigenvectors().rowwise().reverse();
  const double mu_j = mu(j);
  const double tie = 1e-12 * std::max(1.0, std::abs(mu_j));
  Eigen::MatrixXd pinv = Eigen::MatrixXd::Zero(r, r);
  for (Index k = 0; k < r; ++k) {
    const double gap = mu(k) - mu_j;
    // Directions tied with mu_j belong to its eigenspace.
    if (k == j || std::abs(gap) <= tie) continue;
    pinv.noalias() += q.col(k) * q.col(k).transpose() / gap;
  }
  out.l = s_inv_sqrt * pinv * s_inv_sqrt;
  return out;
}

}  // namespace detail

/// EIF of the j-th squared canonical correlation at every training sample.
inline InfluenceProfile eif_kernel_corr(const CcaSolution& sol, Index j) {
  detail::check_component(j, sol.ncomp());
  const double rho = sol.kcor(j);
  InfluenceProfile p;
  p.component = j;
  p.method = sol.robust() ? InfluenceMethod::robust_kernel_cca : InfluenceMethod::kernel_cca;
  p.values.resize(sol.n());
  for (Index i = 0; i < sol.n(); ++i)
    p.values(i) = detail::corr_influence(rho, sol.cv_x()(i, j), sol.cv_y()(i, j));
  return p;
}

/// EIF of the j-th canonical functions f_jX, f_jY at the training sample i.
/// Operator inverses are replaced by their kappa-regularized counterparts and
/// (M - rho_j^2 I)^{-1} by the pseudo-inverse off the j-th eigenspace; the
/// X and Y formulas are mirror images of each other.
inline CvInfluence eif_canonical_variates(const CcaSolution& sol, Index j, Index i) {
  detail::check_component(j, sol.ncomp());
  if (i < 0 || i >= sol.n()) throw DimensionError("sample index out of range");

  const detail::FeatureBasis bx(sol.x.centered_gram);
  const detail::FeatureBasis by(sol.y.centered_gram);
  const Eigen::VectorXd& w = sol.joint.w;
  const double kappa = sol.config.kappa;

  Eigen::MatrixXd sxx = detail::regularized_cov(bx.f, bx.f, w);
  Eigen::MatrixXd syy = detail::regularized_cov(by.f, by.f, w);
  sxx.diagonal().array() += kappa;
  syy.diagonal().array() += kappa;
  const Eigen::MatrixXd sxy = detail::regularized_cov(bx.f, by.f, w);

  const auto ox = detail::side_operators(sxx, syy, sxy, j);
  const auto oy = detail::side_operators(syy, sxx, sxy.transpose(), j);

  const double rho = sol.kcor(j);
  const double x = sol.cv_x()(i, j);
  const double y = sol.cv_y()(i, j);

  const Eigen::VectorXd fx = bx.coords_of(sol.cv_x().col(j));
  const Eigen::VectorXd fy = by.coords_of(sol.cv_y().col(j));

  const Eigen::VectorXd if_x = -rho * (y - rho * x) * (ox.l * bx.f.col(i)) -
                               (x - rho * y) * (ox.l * (ox.cross_times_inv * by.f.col(i))) +
                               0.5 * (1.0 - x * x) * fx;
  const Eigen::VectorXd if_y = -rho * (x - rho * y) * (oy.l * by.f.col(i)) -
                               (y - rho * x) * (oy.l * (oy.cross_times_inv * bx.f.col(i))) +
                               0.5 * (1.0 - y * y) * fy;

  CvInfluence out;
  out.component = j;
  out.sample = i;
  out.x_alpha = bx.alpha_of(if_x);
  out.y_alpha = by.alpha_of(if_y);
  out.x_values = bx.f.transpose() * if_x;
  out.y_values = by.f.transpose() * if_y;
  return out;
}

/// EIF profile of classical (linear-kernel, square-loss) CCA.
inline InfluenceProfile eif_linear_cca(const DataMatrix& x, const DataMatrix& y,
                                       const CcaConfig& cfg, Index j) {
  const CcaSolution sol = kernel_cca(x, y, LossSpec::square(), KernelSpec::linear(), cfg);
  InfluenceProfile p = eif_kernel_corr(sol, j);
  p.method = InfluenceMethod::linear_cca;
  return p;
}

/// Multi-view EIF: the pairwise formula averaged over all view pairs, using
/// the (m - 1)-normalized correlation.
inline InfluenceProfile eif_multiple_kernel_corr(const MkccaSolution& sol, Index j) {
  detail::check_component(j, sol.ncomp());
  const double rho = sol.kcor(j);
  const auto m = sol.views.size();
  const double pairs = static_cast<double>(m * (m - 1) / 2);
  InfluenceProfile p;
  p.component = j;
  p.method = InfluenceMethod::multiple_kernel_cca;
  p.values = Eigen::VectorXd::Zero(sol.n());
  for (Index i = 0; i < sol.n(); ++i) {
    double acc = 0.0;
    for (std::size_t u = 0; u < m; ++u)
      for (std::size_t v = u + 1; v < m; ++v)
        acc += detail::corr_influence(rho, sol.views[u].variates(i, j),
                                      sol.views[v].variates(i, j));
    p.values(i) = acc / pairs;
  }
  return p;
}

/// Indices of the top_k largest |values|, descending; ties go to the lower index.
inline std::vector<Index> rank_outliers(const InfluenceProfile& profile, Index top_k) {
  const Index n = profile.values.size();
  if (n == 0) throw DimensionError("empty influence profile");
  if (top_k < 0 || top_k > n) throw DimensionError("top_k exceeds profile length");
  std::vector<Index> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), Index{0});
  std::stable_sort(idx.begin(), idx.end(), [&](Index a, Index b) {
    return std::abs(profile.values(a)) > std::abs(profile.values(b));
  });
  idx.resize(static_cast<std::size_t>(top_k));
  return idx;
}

}  // namespace rkum
