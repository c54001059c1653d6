#pragma once

// Kernelized iteratively reweighted least squares (KIRWLS).
//
// The robust mean element f = sum_i w_i Phi(X_i) minimizes sum_i zeta(||Phi(X_i) - f||).
// Each step computes the feature-space errors from the Gram matrix alone,
//   e_i = sqrt(K_ii - 2 (K w)_i + w^T K w),
// and renormalizes w_i <- phi(e_i) / sum_b phi(e_b). The same iteration on the
// Hadamard product of centered Gram matrices gives the robust second-moment
// (cross-covariance) weights, since <a (x) b, c (x) d> = <a, c><b, d>.

#include <cassert>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rkum/error.hpp"
#include "rkum/kernels.hpp"
#include "rkum/robust_loss.hpp"

namespace rkum {

struct KirwlsConfig {
  int max_iter = 100;
  double rel_tol = 1e-8;

  void validate() const {
    if (max_iter < 1) throw DomainError("max_iter must be at least 1");
    if (!(rel_tol > 0.0)) throw DomainError("rel_tol must be positive");
  }
};

/// Sample weights on the probability simplex plus convergence metadata.
struct WeightVector {
  Eigen::VectorXd w;
  int iterations = 0;
  bool converged = false;
  double final_objective = 0.0;
  /// Objective after each weight update.
  std::vector<double> objective_trace;
};

namespace detail {

enum class ErrorClamp { max_zero, absolute };

inline Eigen::VectorXd feature_errors(const Eigen::MatrixXd& m, const Eigen::VectorXd& w,
                                      ErrorClamp clamp) {
  const Eigen::VectorXd mw = m * w;
  const double wmw = w.dot(mw);
  Eigen::VectorXd e(m.rows());
  for (Index i = 0; i < m.rows(); ++i) {
    const double sq = m(i, i) - 2.0 * mw(i) + wmw;
    e(i) = std::sqrt(clamp == ErrorClamp::absolute ? std::abs(sq) : std::max(sq, 0.0));
  }
  return e;
}

/// Tunes the loss on `errors`; a degenerate tuning falls back to the square
/// loss (warned once per run).
inline LossSpec resolve_or_square(const LossSpec& loss, const Eigen::VectorXd& errors,
                                  bool& warned) {
  try {
    return resolve_loss(loss, errors);
  } catch (const DomainError&) {
    if (!warned) warn("loss tuning degenerate on current errors; using square loss");
    warned = true;
    return LossSpec::square();
  }
}

inline WeightVector kirwls(const Eigen::MatrixXd& m, const LossSpec& loss,
                           const KirwlsConfig& cfg, ErrorClamp clamp) {
  cfg.validate();
  loss.validate();
  if (m.rows() != m.cols()) throw DimensionError("KIRWLS needs a square Gram matrix");
  const Index n = m.rows();
  if (n == 0) throw DimensionError("KIRWLS needs at least one sample");

  WeightVector out;
  out.w = uniform_weights(n);
  if (n == 1) {
    out.converged = true;
    return out;
  }

  bool warned = false;
  Eigen::VectorXd e = feature_errors(m, out.w, clamp);
  for (int k = 1; k <= cfg.max_iter; ++k) {
    const LossSpec current = resolve_or_square(loss, e, warned);
    const double obj_old = objective(current, e);

    Eigen::VectorXd phi(n);
    for (Index i = 0; i < n; ++i) phi(i) = weight_ratio(current, e(i));
    const double total = phi.sum();
    if (!(total > 0.0) || !std::isfinite(total))
      throw NumericalError("total weight collapsed");
    out.w = phi / total;
    assert(out.w.minCoeff() >= 0.0 && std::abs(out.w.sum() - 1.0) < 1e-12);

    e = feature_errors(m, out.w, clamp);
    const double obj_new = objective(resolve_or_square(loss, e, warned), e);
    out.objective_trace.push_back(obj_new);
    out.iterations = k;
    out.final_objective = obj_new;

    const double change = std::abs(obj_old - obj_new);
    if (change == 0.0 || (obj_old != 0.0 && change / obj_old < cfg.rel_tol)) {
      out.converged = true;
      break;
    }
  }
  return out;
}

}  // namespace detail

/// Weights of the robust kernel mean element of the samples behind `k`.
inline WeightVector robust_mean_weights(const GramMatrix& k, const LossSpec& loss,
                                        const KirwlsConfig& cfg = {}) {
  return detail::kirwls(k, loss, cfg, detail::ErrorClamp::max_zero);
}

/// A Gram matrix centered at its robust mean element.
struct RobustGram {
  GramMatrix centered;
  GramMatrix raw;
  WeightVector weights;
  KernelSpec kernel;  // resolved (rbf bandwidth filled in)
};

inline RobustGram robust_centered_gram(const DataMatrix& data, const LossSpec& loss,
                                       const KernelSpec& kernel,
                                       const KirwlsConfig& cfg = {}) {
  RobustGram out;
  out.kernel = resolve_kernel(kernel, data);
  out.raw = gram(data, out.kernel);
  out.weights = robust_mean_weights(out.raw, loss, cfg);
  out.centered = center(out.raw, out.weights.w);
  return out;
}

/// Robust weights for the joint second moment of several centered views:
/// KIRWLS on the Hadamard product of their Gram matrices.
inline WeightVector robust_joint_weights(std::span<const GramMatrix> grams,
                                         const LossSpec& loss, const KirwlsConfig& cfg = {}) {
  if (grams.size() < 2) throw DimensionError("joint weights need at least two views");
  Eigen::MatrixXd m = grams[0];
  for (std::size_t v = 1; v < grams.size(); ++v) {
    if (grams[v].rows() != m.rows() || grams[v].cols() != m.cols())
      throw DimensionError("views have different sample counts");
    m = m.cwiseProduct(grams[v]);
  }
  return detail::kirwls(m, loss, cfg, detail::ErrorClamp::absolute);
}

/// Robust kernel cross-covariance weights for two centered views.
inline WeightVector robust_cco_weights(const GramMatrix& gx, const GramMatrix& gy,
                                       const LossSpec& loss, const KirwlsConfig& cfg = {}) {
  const GramMatrix views[] = {gx, gy};
  return robust_joint_weights(views, loss, cfg);
}

}  // namespace rkum
