#pragma once

// Standard, robust and multi-view kernel CCA on (robust-)centered Gram
// matrices.
//
// With centered Grams G_u, diagonal sample weights W and coefficient vectors
// a_u (f_u = sum_i a_ui k~_u(., X_ui)), the covariance and variance terms are
//   Cov(f_u, f_v) = a_u^T G_u W G_v a_v,   Var(f_u) = a_u^T G_u W G_u a_u,
// and the canonical directions solve the symmetric-definite pencil
//   [0 G_1 W G_2 ...; G_2 W G_1 0 ...] a = lambda blockdiag(S_1, S_2, ...) a.
// For two views lambda is the regularized canonical correlation; for m views
// it is the sum of correlations with the other views, so it is reported
// divided by (m - 1).

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "rkum/eigsolver.hpp"
#include "rkum/error.hpp"
#include "rkum/kernels.hpp"
#include "rkum/kirwls.hpp"
#include "rkum/robust_loss.hpp"

namespace rkum {

enum class ConstraintMode {
  /// S = G W G + kappa G + 1e-6 I: weighted variance plus kappa ||f||^2.
  weighted,
  /// S = G + (kappa + 1e-6) I: plain ridge on the Gram matrix.
  ridge,
};

inline std::string to_string(ConstraintMode m) {
  return m == ConstraintMode::weighted ? "weighted" : "ridge";
}

inline ConstraintMode parse_constraint_mode(const std::string& s) {
  if (s == "weighted") return ConstraintMode::weighted;
  if (s == "ridge") return ConstraintMode::ridge;
  throw DomainError("unknown constraint mode '" + s + "'");
}

struct CcaConfig {
  double kappa = 1e-5;
  Index ncomp = 10;
  ConstraintMode constraint_mode = ConstraintMode::weighted;
  KirwlsConfig kirwls{};

  void validate() const {
    if (!(kappa >= 0.0) || !std::isfinite(kappa)) throw DomainError("kappa must be >= 0");
    if (ncomp < 1) throw DomainError("ncomp must be at least 1");
    kirwls.validate();
  }
};

/// Everything fitted for one view.
struct CcaView {
  DataMatrix data;
  KernelSpec kernel;           // resolved
  GramMatrix raw_gram;
  GramMatrix centered_gram;
  WeightVector centering;      // robust mean-element weights
  Eigen::MatrixXd coef;        // n x ncomp eigen-directions
  Eigen::VectorXd scale;       // variate normalization per component
  Eigen::MatrixXd variates;    // centered_gram * coef * diag(scale)
};

/// Multi-view solution; `views.size()` is the number of views.
struct MkccaSolution {
  std::vector<CcaView> views;
  Eigen::VectorXd kcor;         // correlations in [0, 1], nonincreasing
  Eigen::VectorXd eigenvalues;  // raw pencil eigenvalues
  WeightVector joint;           // weights W shared by all covariance terms
  LossSpec loss;
  CcaConfig config;
  bool jittered = false;

  Index n() const { return views.front().data.rows(); }
  Index ncomp() const { return kcor.size(); }
  bool robust() const { return loss.kind != LossKind::square; }
};

/// Two-view solution.
struct CcaSolution {
  CcaView x, y;
  Eigen::VectorXd kcor;
  Eigen::VectorXd eigenvalues;
  WeightVector joint;
  LossSpec loss;
  CcaConfig config;
  bool jittered = false;

  Index n() const { return x.data.rows(); }
  Index ncomp() const { return kcor.size(); }
  bool robust() const { return loss.kind != LossKind::square; }
  const Eigen::MatrixXd& cv_x() const { return x.variates; }
  const Eigen::MatrixXd& cv_y() const { return y.variates; }
};

namespace detail {

inline Eigen::MatrixXd constraint_block(const GramMatrix& g, const Eigen::VectorXd& w,
                                        const CcaConfig& cfg) {
  Eigen::MatrixXd s;
  if (cfg.constraint_mode == ConstraintMode::weighted) {
    s = g * w.asDiagonal() * g + cfg.kappa * g;
    s.diagonal().array() += 1e-6;
  } else {
    s = g;
    s.diagonal().array() += cfg.kappa + 1e-6;
  }
  return s;
}

struct PencilFit {
  Eigen::VectorXd eigenvalues;
  std::vector<Eigen::MatrixXd> coef;
  std::vector<Eigen::VectorXd> scale;
  std::vector<Eigen::MatrixXd> variates;
  bool jittered = false;
};

/// Solves the multi-view pencil for fixed centered Grams and weights, then
/// normalizes variates to unit W-weighted second moment and fixes signs:
/// the first view's first nonzero coefficient is positive, every other view
/// correlates nonnegatively with the first.
inline PencilFit fit_pencil(const std::vector<GramMatrix>& grams, const Eigen::VectorXd& w,
                            const CcaConfig& cfg) {
  const auto m = static_cast<Index>(grams.size());
  const Index n = grams.front().rows();
  if (cfg.ncomp > n) throw DimensionError("ncomp exceeds the number of samples");

  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(m * n, m * n);
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(m * n, m * n);
  for (Index u = 0; u < m; ++u) {
    b.block(u * n, u * n, n, n) = constraint_block(grams[u], w, cfg);
    const Eigen::MatrixXd gw = grams[u] * w.asDiagonal();
    for (Index v = u + 1; v < m; ++v) {
      const Eigen::MatrixXd cross = gw * grams[v];
      a.block(u * n, v * n, n, n) = cross;
      a.block(v * n, u * n, n, n) = cross.transpose();
    }
  }

  const GenEigResult eig = sym_gen_eig(a, b, cfg.ncomp);
  PencilFit out;
  out.eigenvalues = eig.values;
  out.jittered = eig.jittered;
  for (Index u = 0; u < m; ++u) {
    out.coef.push_back(eig.vectors.middleRows(u * n, n));
    out.variates.push_back(grams[u] * out.coef.back());
    out.scale.emplace_back(cfg.ncomp);
  }

  for (Index j = 0; j < cfg.ncomp; ++j) {
    for (Index u = 0; u < m; ++u) {
      auto cv = out.variates[u].col(j);
      const double second_moment = (w.array() * cv.array().square()).sum();
      const double s = second_moment > 1e-300 ? 1.0 / std::sqrt(second_moment) : 0.0;
      out.scale[u](j) = s;
      cv *= s;
    }
    for (Index u = 1; u < m; ++u) {
      const double c = (w.array() * out.variates[0].col(j).array() *
                        out.variates[u].col(j).array()).sum();
      if (c < 0.0) {
        out.coef[u].col(j) *= -1.0;
        out.variates[u].col(j) *= -1.0;
      }
    }
  }
  return out;
}

inline CcaView make_view(const DataMatrix& data, RobustGram&& rg, const PencilFit& fit,
                         std::size_t u) {
  CcaView v;
  v.data = data;
  v.kernel = rg.kernel;
  v.raw_gram = std::move(rg.raw);
  v.centered_gram = std::move(rg.centered);
  v.centering = std::move(rg.weights);
  v.coef = fit.coef[u];
  v.scale = fit.scale[u];
  v.variates = fit.variates[u];
  return v;
}

inline Eigen::VectorXd correlations(const Eigen::VectorXd& eigenvalues, Index views) {
  const double denom = static_cast<double>(views - 1);
  return (eigenvalues.cwiseAbs() / denom).cwiseMin(1.0).cwiseMax(0.0);
}

inline MkccaSolution fit_views(const std::vector<DataMatrix>& views, const LossSpec& loss,
                               const KernelSpec& kernel, const CcaConfig& cfg) {
  cfg.validate();
  loss.validate();
  if (views.size() < 2) throw DimensionError("kernel CCA needs at least two views");
  const Index n = views.front().rows();
  for (const auto& v : views)
    if (v.rows() != n) throw DimensionError("views have different sample counts");

  std::vector<RobustGram> robust;
  std::vector<GramMatrix> grams;
  for (const auto& v : views) {
    robust.push_back(robust_centered_gram(v, loss, kernel, cfg.kirwls));
    grams.push_back(robust.back().centered);
  }
  MkccaSolution sol;
  sol.joint = robust_joint_weights(grams, loss, cfg.kirwls);
  const PencilFit fit = fit_pencil(grams, sol.joint.w, cfg);
  for (std::size_t u = 0; u < views.size(); ++u)
    sol.views.push_back(make_view(views[u], std::move(robust[u]), fit, u));
  sol.eigenvalues = fit.eigenvalues;
  sol.kcor = correlations(fit.eigenvalues, static_cast<Index>(views.size()));
  sol.loss = loss;
  sol.config = cfg;
  sol.jittered = fit.jittered;
  return sol;
}

}  // namespace detail

/// Kernel CCA of two views. Square loss gives standard kernel CCA (uniform
/// centering and W = I / n); robust losses center each view at its robust
/// mean element and weight the covariance terms with robust cross-covariance
/// weights.
inline CcaSolution kernel_cca(const DataMatrix& x, const DataMatrix& y, const LossSpec& loss,
                              const KernelSpec& kernel, const CcaConfig& cfg = {}) {
  if (x.rows() != y.rows()) throw DimensionError("X and Y have different sample counts");
  MkccaSolution m = detail::fit_views({x, y}, loss, kernel, cfg);
  CcaSolution s;
  s.x = std::move(m.views[0]);
  s.y = std::move(m.views[1]);
  s.kcor = std::move(m.kcor);
  s.eigenvalues = std::move(m.eigenvalues);
  s.joint = std::move(m.joint);
  s.loss = m.loss;
  s.config = m.config;
  s.jittered = m.jittered;
  return s;
}

/// Sum-of-correlations multi-view kernel CCA.
inline MkccaSolution multiple_kernel_cca(const std::vector<DataMatrix>& views,
                                         const LossSpec& loss, const KernelSpec& kernel,
                                         const CcaConfig& cfg = {}) {
  return detail::fit_views(views, loss, kernel, cfg);
}

/// Canonical variates of new samples for one fitted view.
inline Eigen::MatrixXd view_variates_at(const CcaView& view, const Eigen::MatrixXd& x_new) {
  if (x_new.cols() != view.data.cols())
    throw DimensionError("new samples do not match the training feature count");
  if (x_new.rows() < 1) throw DimensionError("no new samples");
  const Eigen::MatrixXd k_test = cross_gram(x_new, view.data.values(), view.kernel);
  const Eigen::MatrixXd centered = center_test(k_test, view.raw_gram, view.centering.w);
  return centered * view.coef * view.scale.asDiagonal();
}

inline std::pair<Eigen::MatrixXd, Eigen::MatrixXd> canonical_variates_at(
    const CcaSolution& sol, const Eigen::MatrixXd& x_new, const Eigen::MatrixXd& y_new) {
  if (x_new.rows() != y_new.rows())
    throw DimensionError("new X and Y have different sample counts");
  return {view_variates_at(sol.x, x_new), view_variates_at(sol.y, y_new)};
}

inline std::vector<Eigen::MatrixXd> canonical_variates_at(
    const MkccaSolution& sol, const std::vector<Eigen::MatrixXd>& views_new) {
  if (views_new.size() != sol.views.size())
    throw DimensionError("number of new views does not match the fit");
  std::vector<Eigen::MatrixXd> out;
  for (std::size_t u = 0; u < views_new.size(); ++u) {
    if (views_new[u].rows() != views_new.front().rows())
      throw DimensionError("new views have different sample counts");
    out.push_back(view_variates_at(sol.views[u], views_new[u]));
  }
  return out;
}

}  // namespace rkum
