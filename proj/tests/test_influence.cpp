#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "rkum/influence.hpp"

using namespace rkum;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

struct Pair {
  MatrixXd x, y;
};

Pair correlated(int n, int p, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  const MatrixXd z = oracle::random_normal(n, 1, gen);
  Pair out;
  out.x = oracle::random_normal(n, p, gen);
  out.y = oracle::random_normal(n, p, gen);
  out.x.col(0) += 1.5 * z;
  out.y.col(0) += 1.5 * z;
  return out;
}

CcaConfig cfg_with(double kappa, Index ncomp) {
  CcaConfig c;
  c.kappa = kappa;
  c.ncomp = ncomp;
  return c;
}

InfluenceProfile profile_of(std::initializer_list<double> v) {
  InfluenceProfile p;
  p.values.resize(static_cast<Index>(v.size()));
  Index i = 0;
  for (double x : v) p.values(i++) = x;
  return p;
}

double max_rel_diff(const VectorXd& a, const VectorXd& ref) {
  return (a - ref).cwiseAbs().maxCoeff() / ref.cwiseAbs().maxCoeff();
}

}  // namespace

TEST(CorrInfluence, PerfectCorrelationIsFlat) {
  std::mt19937_64 gen(1);
  const DataMatrix x(oracle::random_normal(30, 2, gen));
  const CcaSolution s = kernel_cca(x, x, LossSpec::square(), KernelSpec::linear(), cfg_with(0.0, 1));
  EXPECT_LT(eif_kernel_corr(s, 0).values.cwiseAbs().maxCoeff(), 1e-5);
}

TEST(CorrInfluence, FormulaAtTrainingPoints) {
  const Pair p = correlated(25, 2, 2);
  const CcaSolution s = kernel_cca(DataMatrix(p.x), DataMatrix(p.y), LossSpec::square(),
                                   KernelSpec::rbf(), cfg_with(1e-5, 2));
  const InfluenceProfile prof = eif_kernel_corr(s, 1);
  EXPECT_EQ(prof.component, 1);
  EXPECT_EQ(prof.method, InfluenceMethod::kernel_cca);
  const double r = s.kcor(1);
  for (Index i = 0; i < 25; ++i) {
    const double a = s.cv_x()(i, 1), b = s.cv_y()(i, 1);
    EXPECT_NEAR(prof.values(i), -r * r * (a - b) * (a - b) - 2.0 * r * (r - 1.0) * a * b, 1e-12);
  }
}

TEST(CorrInfluence, MatchesReweightingDerivative) {
  for (const auto& kernel : {KernelSpec::linear(), KernelSpec::rbf()}) {
    const Pair p = correlated(20, 2, 3);
    const CcaSolution s = kernel_cca(DataMatrix(p.x), DataMatrix(p.y), LossSpec::square(),
                                     kernel, cfg_with(1e-5, 1));
    const VectorXd ref = oracle::contamination_influence(s.x.centered_gram, s.y.centered_gram,
                                                         s.joint.w, 1e-5, 1e-5);
    const VectorXd got = eif_kernel_corr(s, 0).values;
    // The closed form ignores the ridge term, which rescales the rbf profile slightly.
    if (kernel.kind == KernelKind::linear) {
      EXPECT_LT(max_rel_diff(got, ref), 1e-2);
    }
    EXPECT_GT(oracle::pearson(got, ref), 0.9999) << to_string(kernel.kind);
  }
}

TEST(CorrInfluence, InvariantToFlippingAView) {
  const Pair p = correlated(30, 2, 4);
  const CcaSolution a = kernel_cca(DataMatrix(p.x), DataMatrix(p.y), LossSpec::square(),
                                   KernelSpec::linear(), cfg_with(1e-5, 1));
  const CcaSolution b = kernel_cca(DataMatrix(p.x), DataMatrix(-p.y), LossSpec::square(),
                                   KernelSpec::linear(), cfg_with(1e-5, 1));
  EXPECT_LT((eif_kernel_corr(a, 0).values - eif_kernel_corr(b, 0).values).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(CorrInfluence, RobustMethodIsTagged) {
  const Pair p = correlated(20, 2, 5);
  const CcaSolution s = kernel_cca(DataMatrix(p.x), DataMatrix(p.y),
                                   LossSpec::data_driven_of(LossKind::huber), KernelSpec::rbf(),
                                   cfg_with(1e-5, 1));
  EXPECT_EQ(eif_kernel_corr(s, 0).method, InfluenceMethod::robust_kernel_cca);
  EXPECT_EQ(to_string(InfluenceMethod::robust_kernel_cca), "robust-kernel-cca");
}

TEST(CorrInfluence, ComponentOutOfRange) {
  const Pair p = correlated(15, 2, 6);
  const CcaSolution s = kernel_cca(DataMatrix(p.x), DataMatrix(p.y), LossSpec::square(),
                                   KernelSpec::linear(), cfg_with(1e-5, 2));
  EXPECT_THROW(eif_kernel_corr(s, 2), DimensionError);
  EXPECT_THROW(eif_kernel_corr(s, -1), DimensionError);
  EXPECT_THROW(eif_canonical_variates(s, 0, 15), DimensionError);
}

TEST(LinearCcaInfluence, EqualsLinearKernelSquareLoss) {
  const Pair p = correlated(30, 3, 7);
  const CcaSolution s = kernel_cca(DataMatrix(p.x), DataMatrix(p.y), LossSpec::square(),
                                   KernelSpec::linear(), cfg_with(1e-5, 1));
  const InfluenceProfile a = eif_linear_cca(DataMatrix(p.x), DataMatrix(p.y), cfg_with(1e-5, 1), 0);
  EXPECT_EQ(a.method, InfluenceMethod::linear_cca);
  EXPECT_EQ(a.values, eif_kernel_corr(s, 0).values);
}

TEST(MultiInfluence, TwoViewsMatchPairwiseProfile) {
  const Pair p = correlated(25, 2, 8);
  const LossSpec loss = LossSpec::data_driven_of(LossKind::huber);
  const CcaSolution a = kernel_cca(DataMatrix(p.x), DataMatrix(p.y), loss, KernelSpec::rbf(),
                                   cfg_with(1e-5, 1));
  const MkccaSolution b = multiple_kernel_cca({DataMatrix(p.x), DataMatrix(p.y)}, loss,
                                              KernelSpec::rbf(), cfg_with(1e-5, 1));
  EXPECT_EQ(eif_kernel_corr(a, 0).values, eif_multiple_kernel_corr(b, 0).values);
}

TEST(VariateInfluence, MatchesReweightingDerivative) {
  const Pair p = correlated(15, 2, 9);
  const double kappa = 1e-3;
  const CcaSolution s = kernel_cca(DataMatrix(p.x), DataMatrix(p.y), LossSpec::square(),
                                   KernelSpec::linear(), cfg_with(kappa, 2));
  const double eps = 1e-5;
  for (Index i : {Index{0}, Index{6}, Index{11}}) {
    const CvInfluence inf = eif_canonical_variates(s, 0, i);
    VectorXd we = (1.0 - eps) * s.joint.w;
    we(i) += eps;
    const VectorXd base = oracle::weighted_kcca_variate_x(s.x.centered_gram, s.y.centered_gram,
                                                          s.joint.w, kappa, 0, s.cv_x().col(0));
    const VectorXd moved = oracle::weighted_kcca_variate_x(s.x.centered_gram, s.y.centered_gram,
                                                           we, kappa, 0, base);
    const VectorXd ref = (moved - base) / eps;
    EXPECT_LT(max_rel_diff(inf.x_values, ref), 5e-2) << "sample " << i;
    EXPECT_LT((s.x.centered_gram * inf.x_alpha - inf.x_values).cwiseAbs().maxCoeff(), 1e-8);
  }
}

TEST(RankOutliers, OrdersByMagnitude) {
  const auto idx = rank_outliers(profile_of({0.0, -5.0, 2.0}), 2);
  EXPECT_EQ(idx, (std::vector<Index>{1, 2}));
}

TEST(RankOutliers, TiesGoToLowerIndex) {
  const auto idx = rank_outliers(profile_of({1.0, -3.0, 3.0, 0.5}), 3);
  EXPECT_EQ(idx, (std::vector<Index>{1, 2, 0}));
}

TEST(RankOutliers, Bounds) {
  EXPECT_TRUE(rank_outliers(profile_of({1.0}), 0).empty());
  EXPECT_THROW(rank_outliers(profile_of({1.0, 2.0}), 3), DimensionError);
  EXPECT_THROW(rank_outliers(InfluenceProfile{}, 0), DimensionError);
}
