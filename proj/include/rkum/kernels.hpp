#pragma once

// Kernel evaluation, Gram matrices, median-heuristic bandwidth and
// (weighted) centering of Gram matrices in feature space.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "rkum/error.hpp"

namespace rkum {

using Index = Eigen::Index;
using GramMatrix = Eigen::MatrixXd;

/// Samples in rows, features in columns. At least two samples, one feature,
/// all entries finite.
class DataMatrix {
 public:
  DataMatrix() = default;

  explicit DataMatrix(Eigen::MatrixXd values) : values_(std::move(values)) {
    if (values_.rows() < 2) throw DataError("data matrix needs at least 2 rows");
    if (values_.cols() < 1) throw DataError("data matrix needs at least 1 column");
    if (!values_.allFinite()) throw DataError("data matrix has non-finite entries");
  }

  Index rows() const noexcept { return values_.rows(); }
  Index cols() const noexcept { return values_.cols(); }
  const Eigen::MatrixXd& values() const noexcept { return values_; }
  double operator()(Index i, Index j) const { return values_(i, j); }

 private:
  Eigen::MatrixXd values_;
};

enum class KernelKind { linear, rbf, ibs };

inline std::string to_string(KernelKind k) {
  switch (k) {
    case KernelKind::linear: return "linear";
    case KernelKind::rbf: return "rbf";
    case KernelKind::ibs: return "ibs";
  }
  return "?";
}

inline KernelKind parse_kernel_kind(const std::string& s) {
  if (s == "linear") return KernelKind::linear;
  if (s == "rbf" || s == "rbfdot") return KernelKind::rbf;
  if (s == "ibs") return KernelKind::ibs;
  throw DomainError("unknown kernel '" + s + "'");
}

/// Kernel family plus, for rbf, an explicit bandwidth. An rbf spec without a
/// bandwidth means "use the median heuristic on the training data".
struct KernelSpec {
  KernelKind kind = KernelKind::rbf;
  std::optional<double> bandwidth;

  static KernelSpec linear() { return {KernelKind::linear, std::nullopt}; }
  static KernelSpec ibs() { return {KernelKind::ibs, std::nullopt}; }
  static KernelSpec rbf(std::optional<double> s = std::nullopt) {
    if (s && !(*s > 0.0)) throw DomainError("rbf bandwidth must be positive");
    return {KernelKind::rbf, s};
  }

  bool operator==(const KernelSpec&) const = default;
};

namespace detail {

/// Pairwise squared Euclidean distances between rows of a and rows of b.
/// Computed from explicit differences so duplicated rows give exactly 0.
inline Eigen::MatrixXd squared_distances(const Eigen::MatrixXd& a,
                                         const Eigen::MatrixXd& b) {
  Eigen::MatrixXd d(a.rows(), b.rows());
  for (Index j = 0; j < b.rows(); ++j)
    for (Index i = 0; i < a.rows(); ++i)
      d(i, j) = (a.row(i) - b.row(j)).squaredNorm();
  return d.cwiseMax(0.0);
}

inline void check_genotypes(const Eigen::MatrixXd& x) {
  for (Index j = 0; j < x.cols(); ++j)
    for (Index i = 0; i < x.rows(); ++i) {
      const double v = x(i, j);
      if (v != 0.0 && v != 1.0 && v != 2.0)
        throw DomainError("ibs kernel requires genotype entries in {0,1,2}");
    }
}

/// R's median: mean of the two middle order statistics for even counts.
inline double median_of(std::vector<double> v) {
  if (v.empty()) throw DomainError("median of empty set");
  const auto mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + mid, v.end());
  const double hi = v[mid];
  if (v.size() % 2 == 1) return hi;
  const double lo = *std::max_element(v.begin(), v.begin() + mid);
  return 0.5 * (lo + hi);
}

inline Eigen::MatrixXd symmetrized(const Eigen::MatrixXd& k) {
  return 0.5 * (k + k.transpose());
}

}  // namespace detail

/// Median heuristic: square root of the median nonzero squared pairwise
/// distance. Each ordered off-diagonal pair contributes once.
inline double median_bandwidth(const DataMatrix& data) {
  const Eigen::MatrixXd d = detail::squared_distances(data.values(), data.values());
  const Index n = d.rows();
  std::vector<double> nonzero;
  nonzero.reserve(static_cast<std::size_t>(n * (n - 1)));
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < n; ++i)
      if (i != j && d(i, j) != 0.0) nonzero.push_back(d(i, j));
  if (nonzero.empty()) throw DataError("degenerate data: zero median distance");
  const double s = std::sqrt(detail::median_of(std::move(nonzero)));
  if (!(s > 0.0)) throw DataError("degenerate data: zero median distance");
  return s;
}

/// Fills in the rbf bandwidth from the data when it was left to the heuristic.
inline KernelSpec resolve_kernel(const KernelSpec& spec, const DataMatrix& data) {
  if (spec.bandwidth && !(*spec.bandwidth > 0.0 && std::isfinite(*spec.bandwidth)))
    throw DomainError("rbf bandwidth must be positive");
  if (spec.kind == KernelKind::rbf && !spec.bandwidth)
    return KernelSpec::rbf(median_bandwidth(data));
  return spec;
}

/// Kernel matrix between the rows of `a` and the rows of `b` for a resolved
/// spec (rbf bandwidth present).
inline Eigen::MatrixXd cross_gram(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                                  const KernelSpec& spec) {
  if (a.cols() != b.cols())
    throw DimensionError("kernel arguments have different feature counts");
  switch (spec.kind) {
    case KernelKind::linear:
      return a * b.transpose();
    case KernelKind::rbf: {
      if (!spec.bandwidth) throw DomainError("rbf kernel bandwidth unresolved");
      const double s2 = 2.0 * (*spec.bandwidth) * (*spec.bandwidth);
      return (-detail::squared_distances(a, b) / s2).array().exp().matrix();
    }
    case KernelKind::ibs: {
      detail::check_genotypes(a);
      detail::check_genotypes(b);
      const double p = static_cast<double>(a.cols());
      Eigen::MatrixXd k(a.rows(), b.rows());
      for (Index j = 0; j < b.rows(); ++j)
        for (Index i = 0; i < a.rows(); ++i)
          k(i, j) = (2.0 - (a.row(i) - b.row(j)).array().abs()).sum() / (2.0 * p);
      return k;
    }
  }
  throw DomainError("unknown kernel kind");
}

/// Gram matrix of the rows of `data`, symmetrized as (K + K^T) / 2.
inline GramMatrix gram(const DataMatrix& data, const KernelSpec& spec) {
  const KernelSpec resolved = resolve_kernel(spec, data);
  return detail::symmetrized(cross_gram(data.values(), data.values(), resolved));
}

namespace detail {
inline void check_weights(const Eigen::VectorXd& w, Index n) {
  if (w.size() != n) throw DimensionError("weight vector length does not match Gram matrix");
}
}  // namespace detail

/// C K C^T with C = I - 1 w^T: Gram matrix of features centered at the
/// w-weighted mean element. Uniform w gives the usual double centering.
inline GramMatrix center(const GramMatrix& k, const Eigen::VectorXd& w) {
  if (k.rows() != k.cols()) throw DimensionError("Gram matrix must be square");
  detail::check_weights(w, k.rows());
  const Eigen::VectorXd kw = k * w;        // K w
  const Eigen::RowVectorXd wk = w.transpose() * k;  // w^T K
  const double wkw = w.dot(kw);
  Eigen::MatrixXd g = k;
  g.rowwise() -= wk;
  g.colwise() -= kw;
  g.array() += wkw;
  return detail::symmetrized(g);
}

/// Centers a T x n test-vs-train kernel block at the weighted training mean:
/// K_t - 1 w^T K - K_t w 1^T + (w^T K w) 1 1^T.
inline Eigen::MatrixXd center_test(const Eigen::MatrixXd& k_test, const GramMatrix& k,
                                   const Eigen::VectorXd& w) {
  if (k.rows() != k.cols()) throw DimensionError("Gram matrix must be square");
  if (k_test.cols() != k.rows())
    throw DimensionError("test kernel block column count must equal training size");
  detail::check_weights(w, k.rows());
  const Eigen::RowVectorXd wk = w.transpose() * k;
  const Eigen::VectorXd ktw = k_test * w;
  const double wkw = w.dot(k * w);
  Eigen::MatrixXd g = k_test;
  g.rowwise() -= wk;
  g.colwise() -= ktw;
  g.array() += wkw;
  return g;
}

inline Eigen::VectorXd uniform_weights(Index n) {
  return Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
}

/// True when the smallest eigenvalue is at least -tol * max diagonal entry.
inline bool is_psd(const GramMatrix& k, double tol = 1e-8) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(k, Eigen::EigenvaluesOnly);
  const double scale = std::max(k.diagonal().maxCoeff(), 0.0);
  return es.eigenvalues().minCoeff() >= -tol * scale;
}

}  // namespace rkum
