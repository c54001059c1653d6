#pragma once

// Synthetic imaging-genetics style data: a continuous "imaging" view with a
// rank-one latent signal, a genotype view linked to the same latent through
// a logistic allele model, and optionally a clustered methylation view.
//
// Every random quantity comes from its own sub-stream of the seed, so the
// output of one component does not depend on how many draws another made.
// Within a stream draws are taken in this order:
//   loadings   p1 uniforms on (0, 1)
//   maf        pt uniforms on [maf_lo, maf_hi)
//   latent     n normals
//   x noise    n x pt normals, row by row
//   genotype   per marker: n allele-1 uniforms, then one shared allele-2
//              uniform (or n of them in per-entry mode)
//   selection  partial Fisher-Yates over sample indices
//   redraws    contaminated latents; their x noise rows; their genotypes
//   dmp        per cluster, p3 Bernoulli indicators
//   methyl     n x p3 normals row by row, then n x p3 noise normals

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rkum/error.hpp"
#include "rkum/kernels.hpp"
#include "rkum/rng.hpp"

namespace rkum {

/// How the second allele of each genotype is drawn.
enum class AlleleMode {
  /// One uniform per marker shared by all samples.
  shared_marker_uniform,
  /// An independent uniform per entry.
  per_entry,
};

enum class ContaminationMode {
  /// Regenerate the imaging row from a freshly drawn latent, and the genotype
  /// row from the original latent with fresh draws, breaking the pairing.
  decouple,
  /// Replace the noise level of the selected rows of the noisy view.
  noise_scale,
};

inline std::string to_string(ContaminationMode m) {
  return m == ContaminationMode::decouple ? "decouple" : "noise_scale";
}

struct TwoViewParams {
  Index n = 300;
  Index pt = 100;
  Index p1 = 100;  // imaging features carrying the latent signal
  Index p2 = 100;  // markers linked to the latent
  double sig1 = 0.5;
  double sig2 = 1.0;
  double maf_lo = 0.2;
  double maf_hi = 0.4;
  double contamination_rate = 0.05;
  std::uint64_t seed = 1;
  AlleleMode allele_mode = AlleleMode::shared_marker_uniform;
  /// Append contaminated rows after the clean ones instead of replacing in place.
  bool reorder = false;

  void validate() const {
    if (n < 2) throw DomainError("n must be at least 2");
    if (pt < 1 || p1 < 1 || p1 > pt || p2 < 0 || p2 > pt)
      throw DomainError("feature counts must satisfy 1 <= p1 <= pt, 0 <= p2 <= pt");
    if (!(sig1 >= 0.0) || !(sig2 >= 0.0)) throw DomainError("noise levels must be >= 0");
    if (!(maf_lo > 0.0 && maf_lo <= maf_hi && maf_hi <= 0.5))
      throw DomainError("maf range must lie within (0, 0.5]");
    if (!(contamination_rate >= 0.0 && contamination_rate < 1.0))
      throw DomainError("contamination rate must be in [0, 1)");
  }
};

struct ThreeViewParams {
  TwoViewParams base{};
  Index p3 = 100;
  double sig3 = 0.1;
  std::vector<double> cluster_props{0.30, 0.30, 0.40};
  double p_dmp = 0.2;
  double delta_methyl = 2.5;
  double contaminated_noise_scale = 3.0;

  void validate() const {
    base.validate();
    if (p3 < 1) throw DomainError("p3 must be at least 1");
    if (!(sig3 >= 0.0)) throw DomainError("sig3 must be >= 0");
    if (cluster_props.empty()) throw DomainError("need at least one cluster");
    double total = 0.0;
    for (double p : cluster_props) {
      if (!(p > 0.0)) throw DomainError("cluster proportions must be positive");
      total += p;
    }
    if (std::abs(total - 1.0) > 1e-9) throw DomainError("cluster proportions must sum to 1");
    if (!(p_dmp >= 0.0 && p_dmp <= 1.0)) throw DomainError("p_dmp must be in [0, 1]");
    if (!(contaminated_noise_scale >= 0.0))
      throw DomainError("contaminated noise scale must be >= 0");
  }
};

/// The generative state behind a dataset, kept so rows can be regenerated.
struct SynthModel {
  TwoViewParams params;
  Eigen::VectorXd loadings;  // pt, zero beyond p1
  Eigen::VectorXd maf;       // pt
  Eigen::VectorXd latent;    // n
  Eigen::MatrixXd x_noise;   // n x pt standard normals
  Eigen::MatrixXd x, y;

  bool has_methylation = false;
  double sig3 = 0.0;
  Eigen::MatrixXd methyl_core;   // inverse-logit of the cluster normals
  Eigen::MatrixXd methyl_noise;  // standard normals
  Eigen::MatrixXd z;
  Eigen::MatrixXi dmp;           // p3 x clusters
  std::vector<int> cluster_labels;

  std::vector<Eigen::MatrixXd> views() const {
    if (has_methylation) return {x, y, z};
    return {x, y};
  }
};

struct SynthDataset {
  std::vector<DataMatrix> views;
  std::vector<DataMatrix> clean_views;
  std::vector<Index> contaminated_indices;  // ascending
  std::uint64_t seed = 0;
  std::vector<int> cluster_labels;
};

namespace detail {

enum Stream : std::uint64_t {
  loadings_stream = 1,
  maf_stream,
  latent_stream,
  x_noise_stream,
  genotype_stream,
  selection_stream,
  redraw_latent_stream,
  redraw_x_noise_stream,
  redraw_genotype_stream,
  dmp_stream,
  methyl_stream,
  methyl_noise_stream,
};

inline double logistic(double t) { return 1.0 / (1.0 + std::exp(-t)); }

inline double draw_latent(Rng& rng, double sig1) {
  const double z = rng.normal();
  const double sign = z > 0.0 ? 1.0 : (z < 0.0 ? -1.0 : 0.0);
  return sign * (std::abs(z) + 0.1) * sig1;
}

inline Eigen::MatrixXd draw_normals(Rng& rng, Index rows, Index cols) {
  Eigen::MatrixXd m(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) m(i, j) = rng.normal();
  return m;
}

/// Genotypes in {0, 1, 2} for the given latents. Linked markers use allele
/// probability logistic(mu - bias), the others logistic(-bias) = maf, with
/// bias = log(1 / maf - 1).
inline Eigen::MatrixXd draw_genotypes(Rng& rng, const Eigen::VectorXd& latent,
                                      const Eigen::VectorXd& maf, Index p2, AlleleMode mode) {
  const Index k = latent.size();
  Eigen::MatrixXd y(k, maf.size());
  Eigen::VectorXd g(k);
  for (Index m = 0; m < maf.size(); ++m) {
    const double bias = std::log(1.0 / maf(m) - 1.0);
    for (Index i = 0; i < k; ++i)
      g(i) = m < p2 ? logistic(latent(i) - bias) : logistic(-bias);
    for (Index i = 0; i < k; ++i) y(i, m) = g(i) > rng.uniform() ? 1.0 : 0.0;
    if (mode == AlleleMode::shared_marker_uniform) {
      const double u = rng.uniform();
      for (Index i = 0; i < k; ++i) y(i, m) += g(i) > u ? 1.0 : 0.0;
    } else {
      for (Index i = 0; i < k; ++i) y(i, m) += g(i) > rng.uniform() ? 1.0 : 0.0;
    }
  }
  return y;
}

inline std::vector<Index> select_rows(Index n, double rate, std::uint64_t seed) {
  if (!(rate >= 0.0 && rate < 1.0)) throw DomainError("contamination rate must be in [0, 1)");
  if (rate == 0.0) return {};
  const double expected = rate * static_cast<double>(n);
  if (expected < 1.0) {
    warn("contamination rate * n < 1; no rows contaminated");
    return {};
  }
  const auto k = static_cast<Index>(std::llround(expected));
  Rng rng = Rng(seed).split(selection_stream);
  std::vector<Index> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), Index{0});
  for (Index i = 0; i < k; ++i) {
    const auto j = i + static_cast<Index>(rng.below(static_cast<std::uint64_t>(n - i)));
    std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
  }
  idx.resize(static_cast<std::size_t>(k));
  std::sort(idx.begin(), idx.end());
  return idx;
}

inline Eigen::MatrixXd permute_rows(const Eigen::MatrixXd& m, const std::vector<Index>& order) {
  Eigen::MatrixXd out(m.rows(), m.cols());
  for (std::size_t r = 0; r < order.size(); ++r) out.row(static_cast<Index>(r)) = m.row(order[r]);
  return out;
}

struct Contamination {
  bool decouple = false;
  bool noise_scale = false;
  double scale = 3.0;
};

inline SynthDataset apply_contamination(const SynthModel& model, const std::vector<Index>& rows,
                                        const Contamination& how, std::uint64_t seed,
                                        bool reorder) {
  std::vector<Eigen::MatrixXd> clean = model.views();
  std::vector<Eigen::MatrixXd> dirty = clean;
  const auto k = static_cast<Index>(rows.size());
  const TwoViewParams& p = model.params;

  if (how.decouple && k > 0) {
    const Rng root(seed);
    Rng latent_rng = root.split(redraw_latent_stream);
    Rng noise_rng = root.split(redraw_x_noise_stream);
    Rng geno_rng = root.split(redraw_genotype_stream);
    Eigen::VectorXd fresh(k), original(k);
    for (Index r = 0; r < k; ++r) {
      fresh(r) = draw_latent(latent_rng, p.sig1);
      original(r) = model.latent(rows[static_cast<std::size_t>(r)]);
    }
    const Eigen::MatrixXd noise = draw_normals(noise_rng, k, p.pt);
    const Eigen::MatrixXd geno = draw_genotypes(geno_rng, original, model.maf, p.p2, p.allele_mode);
    for (Index r = 0; r < k; ++r) {
      const Index i = rows[static_cast<std::size_t>(r)];
      dirty[0].row(i) = fresh(r) * model.loadings.transpose() + p.sig2 * noise.row(r);
      dirty[1].row(i) = geno.row(r);
    }
  }
  if (how.noise_scale && k > 0) {
    for (Index i : rows) {
      if (model.has_methylation)
        dirty[2].row(i) = model.methyl_core.row(i) + how.scale * model.methyl_noise.row(i);
      else
        dirty[0].row(i) = model.latent(i) * model.loadings.transpose() + how.scale * model.x_noise.row(i);
    }
  }

  SynthDataset out;
  out.seed = seed;
  out.contaminated_indices = rows;
  out.cluster_labels = model.cluster_labels;
  if (reorder && k > 0) {
    std::vector<Index> order;
    std::vector<bool> chosen(static_cast<std::size_t>(p.n), false);
    for (Index i : rows) chosen[static_cast<std::size_t>(i)] = true;
    for (Index i = 0; i < p.n; ++i)
      if (!chosen[static_cast<std::size_t>(i)]) order.push_back(i);
    for (Index i : rows) order.push_back(i);
    for (auto& m : clean) m = permute_rows(m, order);
    for (auto& m : dirty) m = permute_rows(m, order);
    if (!out.cluster_labels.empty()) {
      std::vector<int> labels;
      for (Index i : order) labels.push_back(model.cluster_labels[static_cast<std::size_t>(i)]);
      out.cluster_labels = std::move(labels);
    }
    out.contaminated_indices.clear();
    for (Index r = 0; r < k; ++r) out.contaminated_indices.push_back(p.n - k + r);
  }
  for (auto& m : clean) out.clean_views.emplace_back(std::move(m));
  for (auto& m : dirty) out.views.emplace_back(std::move(m));
  return out;
}

}  // namespace detail

/// Clean two-view model: imaging X = mu a^T + sig2 E, genotypes Y from mu.
inline SynthModel build_two_view_model(const TwoViewParams& params) {
  params.validate();
  const Rng root(params.seed);
  SynthModel m;
  m.params = params;

  Rng lr = root.split(detail::loadings_stream);
  m.loadings = Eigen::VectorXd::Zero(params.pt);
  for (Index j = 0; j < params.p1; ++j) m.loadings(j) = lr.uniform();

  Rng mr = root.split(detail::maf_stream);
  m.maf.resize(params.pt);
  for (Index j = 0; j < params.pt; ++j) m.maf(j) = mr.uniform(params.maf_lo, params.maf_hi);

  Rng zr = root.split(detail::latent_stream);
  m.latent.resize(params.n);
  for (Index i = 0; i < params.n; ++i) m.latent(i) = detail::draw_latent(zr, params.sig1);

  Rng nr = root.split(detail::x_noise_stream);
  m.x_noise = detail::draw_normals(nr, params.n, params.pt);
  m.x = m.latent * m.loadings.transpose() + params.sig2 * m.x_noise;

  Rng gr = root.split(detail::genotype_stream);
  m.y = detail::draw_genotypes(gr, m.latent, m.maf, params.p2, params.allele_mode);
  return m;
}

/// Two-view model plus a methylation view: clusters of sizes
/// props * n (the last cluster takes the remainder), per-cluster
/// differentially methylated positions with mean shift delta_methyl,
/// Z = logistic(N(shift, I)) + sig3 * noise.
inline SynthModel build_three_view_model(const ThreeViewParams& params) {
  params.validate();
  SynthModel m = build_two_view_model(params.base);
  const Index n = params.base.n;
  const auto clusters = static_cast<Index>(params.cluster_props.size());
  const Rng root(params.base.seed);

  Index assigned = 0;
  for (Index c = 0; c < clusters; ++c) {
    Index size = c + 1 == clusters
                     ? n - assigned
                     : static_cast<Index>(std::llround(params.cluster_props[c] * static_cast<double>(n)));
    size = std::clamp<Index>(size, 0, n - assigned);
    for (Index i = 0; i < size; ++i) m.cluster_labels.push_back(static_cast<int>(c));
    assigned += size;
  }

  Rng dr = root.split(detail::dmp_stream);
  m.dmp.resize(params.p3, clusters);
  for (Index c = 0; c < clusters; ++c)
    for (Index f = 0; f < params.p3; ++f) m.dmp(f, c) = dr.bernoulli(params.p_dmp) ? 1 : 0;

  Rng sr = root.split(detail::methyl_stream);
  m.methyl_core = detail::draw_normals(sr, n, params.p3);
  for (Index i = 0; i < n; ++i) {
    const int c = m.cluster_labels[static_cast<std::size_t>(i)];
    for (Index f = 0; f < params.p3; ++f)
      m.methyl_core(i, f) = detail::logistic(m.methyl_core(i, f) + m.dmp(f, c) * params.delta_methyl);
  }
  Rng er = root.split(detail::methyl_noise_stream);
  m.methyl_noise = detail::draw_normals(er, n, params.p3);
  m.sig3 = params.sig3;
  m.z = m.methyl_core + params.sig3 * m.methyl_noise;
  m.has_methylation = true;
  return m;
}

/// Contaminates round(rate * n) rows chosen from `seed`. In noise-scale mode
/// the affected view is the methylation view when present, else the imaging
/// view; `noise_scale` replaces that view's noise level on those rows.
inline SynthDataset contaminate(const SynthModel& model, double rate, ContaminationMode mode,
                                std::uint64_t seed, double noise_scale = 3.0,
                                bool reorder = false) {
  const auto rows = detail::select_rows(model.params.n, rate, seed);
  detail::Contamination how;
  how.decouple = mode == ContaminationMode::decouple;
  how.noise_scale = mode == ContaminationMode::noise_scale;
  how.scale = noise_scale;
  return detail::apply_contamination(model, rows, how, seed, reorder);
}

inline SynthDataset gen_two_view(const TwoViewParams& params) {
  const SynthModel model = build_two_view_model(params);
  return contaminate(model, params.contamination_rate, ContaminationMode::decouple, params.seed,
                     3.0, params.reorder);
}

/// Three views; the contaminated rows are decoupled in the first two views
/// and get the inflated noise level in the methylation view.
inline SynthDataset gen_three_view(const ThreeViewParams& params) {
  const SynthModel model = build_three_view_model(params);
  const auto rows = detail::select_rows(params.base.n, params.base.contamination_rate, params.base.seed);
  detail::Contamination how;
  how.decouple = true;
  how.noise_scale = true;
  how.scale = params.contaminated_noise_scale;
  return detail::apply_contamination(model, rows, how, params.base.seed, params.base.reorder);
}

}  // namespace rkum
