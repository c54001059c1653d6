#pragma once

// Independent reference computations used only by the tests. None of these
// call into the library's numerical routines; they recompute the quantity
// of interest by a different route (input space instead of kernel space,
// eigen-decomposition instead of Cholesky, covariance matrices instead of
// Gram matrices).

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using Eigen::MatrixXd;
using Eigen::VectorXd;

inline MatrixXd random_normal(int rows, int cols, std::mt19937_64& gen) {
  std::normal_distribution<double> nd;
  MatrixXd m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = nd(gen);
  return m;
}

inline MatrixXd inverse_sqrt(const MatrixXd& s) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(0.5 * (s + s.transpose()));
  return es.eigenvectors() * es.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
         es.eigenvectors().transpose();
}

/// Eigenvalues (descending) of A v = lambda B v via B^{-1/2} A B^{-1/2}.
inline VectorXd pencil_eigenvalues(const MatrixXd& a, const MatrixXd& b) {
  const MatrixXd r = inverse_sqrt(b);
  MatrixXd c = r * a * r;
  c = (0.5 * (c + c.transpose())).eval();
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(c, Eigen::EigenvaluesOnly);
  return es.eigenvalues().reverse();
}

/// Doubly centered Gram matrix by explicit centering matrix.
inline MatrixXd uniform_centered(const MatrixXd& k) {
  const int n = static_cast<int>(k.rows());
  const MatrixXd h = MatrixXd::Identity(n, n) - MatrixXd::Constant(n, n, 1.0 / n);
  return h * k * h;
}

inline double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

inline double huber_phi(double t, double c) { return t <= c ? 1.0 : c / t; }
inline double huber_rho(double t, double c) { return t <= c ? 0.5 * t * t : c * t - 0.5 * c * c; }

struct RobustMean {
  VectorXd weights;
  VectorXd mean;
  int iterations = 0;
};

/// Huber robust mean of the rows of X by IRLS on the raw vectors, with c set
/// to the median of the current distances and the relative-objective stopping
/// rule of the kernel algorithm.
inline RobustMean huber_mean_irls(const MatrixXd& x, int max_iter = 100, double tol = 1e-8) {
  const int n = static_cast<int>(x.rows());
  RobustMean out;
  out.weights = VectorXd::Constant(n, 1.0 / n);
  auto distances = [&](const VectorXd& w) {
    const VectorXd mu = x.transpose() * w;
    std::vector<double> d(n);
    for (int i = 0; i < n; ++i) d[i] = (x.row(i).transpose() - mu).norm();
    return d;
  };
  auto obj = [&](const std::vector<double>& d) {
    const double c = median(d);
    double s = 0.0;
    for (double t : d) s += huber_rho(t, c);
    return s / n;
  };
  std::vector<double> d = distances(out.weights);
  for (int k = 1; k <= max_iter; ++k) {
    const double before = obj(d);
    const double c = median(d);
    VectorXd w(n);
    for (int i = 0; i < n; ++i) w(i) = huber_phi(d[i], c);
    out.weights = w / w.sum();
    d = distances(out.weights);
    const double after = obj(d);
    out.iterations = k;
    if (std::abs(before - after) == 0.0 || std::abs(before - after) / before < tol) break;
  }
  out.mean = x.transpose() * out.weights;
  return out;
}

/// Leading canonical correlation of two data matrices from their sample
/// covariance matrices.
inline double linear_cca_rho(const MatrixXd& x, const MatrixXd& y) {
  const MatrixXd xc = x.rowwise() - x.colwise().mean();
  const MatrixXd yc = y.rowwise() - y.colwise().mean();
  const double n = static_cast<double>(x.rows());
  const MatrixXd sxx = xc.transpose() * xc / n;
  const MatrixXd syy = yc.transpose() * yc / n;
  const MatrixXd sxy = xc.transpose() * yc / n;
  const MatrixXd m = inverse_sqrt(sxx) * sxy * syy.inverse() * sxy.transpose() * inverse_sqrt(sxx);
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(0.5 * (m + m.transpose()), Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(es.eigenvalues().maxCoeff(), 0.0));
}

/// Squared leading correlation of the two-view kernel CCA objective on fixed
/// centered Grams with sample weights w, from the reduced operator
/// S_x^{-1/2} C S_y^{-1} C^T S_x^{-1/2}, where S_v = G_v W G_v + kappa G_v + 1e-6 I
/// and C = G_x W G_y.
inline double weighted_kcca_rho2(const MatrixXd& gx, const MatrixXd& gy, const VectorXd& w,
                                 double kappa) {
  const MatrixXd wd = w.asDiagonal();
  MatrixXd sx = gx * wd * gx + kappa * gx;
  MatrixXd sy = gy * wd * gy + kappa * gy;
  sx.diagonal().array() += 1e-6;
  sy.diagonal().array() += 1e-6;
  const MatrixXd c = gx * wd * gy;
  const MatrixXd rx = inverse_sqrt(sx);
  const MatrixXd m = rx * c * sy.llt().solve(c.transpose()) * rx;
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(0.5 * (m + m.transpose()), Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

/// Training-point values of the j-th X-side canonical function for the same
/// objective, scaled to unit w-weighted second moment, sign fixed so that its
/// w-weighted inner product with `reference` is nonnegative (when given).
inline VectorXd weighted_kcca_variate_x(const MatrixXd& gx, const MatrixXd& gy, const VectorXd& w,
                                        double kappa, int j, const VectorXd& reference = {}) {
  const MatrixXd wd = w.asDiagonal();
  MatrixXd sx = gx * wd * gx + kappa * gx;
  MatrixXd sy = gy * wd * gy + kappa * gy;
  sx.diagonal().array() += 1e-6;
  sy.diagonal().array() += 1e-6;
  const MatrixXd c = gx * wd * gy;
  const MatrixXd rx = inverse_sqrt(sx);
  const MatrixXd m = rx * c * sy.llt().solve(c.transpose()) * rx;
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(0.5 * (m + m.transpose()));
  const int n = static_cast<int>(gx.rows());
  const VectorXd a = rx * es.eigenvectors().col(n - 1 - j);
  VectorXd f = gx * a;
  f /= std::sqrt((w.array() * f.array().square()).sum());
  if (reference.size() == f.size() && (w.array() * f.array() * reference.array()).sum() < 0.0) f = -f;
  return f;
}

/// Finite-difference influence of putting extra mass eps on each sample:
/// (rho^2(W_eps) - rho^2(W)) / eps with W_eps = (1 - eps) W + eps e_i.
inline VectorXd contamination_influence(const MatrixXd& gx, const MatrixXd& gy, const VectorXd& w,
                                        double kappa, double eps) {
  const int n = static_cast<int>(gx.rows());
  const double base = weighted_kcca_rho2(gx, gy, w, kappa);
  VectorXd out(n);
  for (int i = 0; i < n; ++i) {
    VectorXd we = (1.0 - eps) * w;
    we(i) += eps;
    out(i) = (weighted_kcca_rho2(gx, gy, we, kappa) - base) / eps;
  }
  return out;
}

inline double pearson(const VectorXd& a, const VectorXd& b) {
  const VectorXd ac = a.array() - a.mean();
  const VectorXd bc = b.array() - b.mean();
  return ac.dot(bc) / std::sqrt(ac.squaredNorm() * bc.squaredNorm());
}

}  // namespace oracle
