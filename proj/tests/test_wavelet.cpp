#include "hybowave/errors.hpp"
#include "hybowave/wavelet.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

using namespace hwn;

TEST(Diffuse, SpecExamples) {
  const RandomWalkMatrix p(Graph(3, {{0, 1}, {1, 2}}));
  Eigen::MatrixXd x(3, 1);
  x << 1, 0, 0;
  const Eigen::MatrixXd once = diffuse(p, x, 1);
  EXPECT_NEAR(once(0), 0.5, 1e-15);
  EXPECT_NEAR(once(1), 1.0 / 3, 1e-15);
  EXPECT_NEAR(once(2), 0.0, 1e-15);

  const Eigen::MatrixXd ones = Eigen::MatrixXd::Ones(3, 2);
  for (int s : {1, 5, 30}) EXPECT_LT((diffuse(p, ones, s) - ones).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_THROW(diffuse(p, x, 0), ContractViolation);
  EXPECT_THROW(diffuse(p, Eigen::MatrixXd::Ones(4, 1), 1), ContractViolation);
}

TEST(Multiscale, ProductCountAndLayout) {
  const RandomWalkMatrix p(Graph(4, {{0, 1}, {1, 2}, {2, 3}}));
  const Eigen::MatrixXd x = Eigen::MatrixXd::Random(4, 3);
  int products = -1;
  const Eigen::MatrixXd z = multiscale_transform(p, x, ScaleSet({1, 3, 7}), &products);
  EXPECT_EQ(products, 7);
  EXPECT_EQ(z.cols(), 9);
  EXPECT_EQ(z.middleCols(3, 3), diffuse(p, x, 3));
  multiscale_transform(p, x, ScaleSet(), &products);
  EXPECT_EQ(products, 4);
  multiscale_transform(p, x, ScaleSet({5}), &products);
  EXPECT_EQ(products, 5);
}

TEST(Multiscale, MatchesDenseOracle) {
  Rng rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 + static_cast<int>(rng.below(30));
    const EdgeList edges = oracle::random_edges(rng, n, 0.15);
    const RandomWalkMatrix p(Graph(n, edges));
    const Eigen::MatrixXd x = Eigen::MatrixXd::Random(n, 3);
    const std::vector<int> scales{1, 3, 4};
    const Eigen::MatrixXd z = multiscale_transform(p, x, ScaleSet(scales));
    const Eigen::MatrixXd ref = oracle::dense_multiscale(oracle::dense_walk(n, edges), x, scales);
    EXPECT_LT((z - ref).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Multiscale, ConstantColumnsArePreserved) {
  Rng rng(4);
  const int n = 25;
  const RandomWalkMatrix p(Graph(n, oracle::random_edges(rng, n, 0.1)));
  const Eigen::MatrixXd x = Eigen::MatrixXd::Constant(n, 2, 3.5);
  const Eigen::MatrixXd z = multiscale_transform(p, x, ScaleSet({2, 8, 20}));
  EXPECT_LT((z.array() - 3.5).abs().maxCoeff(), 1e-12);
}

TEST(Multiscale, VjpIsTheAdjoint) {
  // <T(X), G> = <X, T^*(G)> for random X, G.
  Rng rng(8);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 3 + static_cast<int>(rng.below(20));
    const RandomWalkMatrix p(Graph(n, oracle::random_edges(rng, n, 0.2)));
    const ScaleSet scales({1, 2, 5});
    const Eigen::MatrixXd x = Eigen::MatrixXd::Random(n, 4);
    const Eigen::MatrixXd g = Eigen::MatrixXd::Random(n, 12);
    const double lhs = (multiscale_transform(p, x, scales).array() * g.array()).sum();
    const double rhs = (x.array() * multiscale_transform_vjp(p, g, scales).array()).sum();
    EXPECT_NEAR(lhs, rhs, 1e-12 * std::max(1.0, std::abs(lhs)));
  }
}

TEST(ScaleSetTest, ParseAndValidate) {
  EXPECT_EQ(ScaleSet::parse("1,2,3,4"), ScaleSet());
  EXPECT_EQ(ScaleSet({2, 5}).to_string(), "2,5");
  EXPECT_EQ(ScaleSet().max_scale(), 4);
  EXPECT_THROW(ScaleSet(std::vector<int>{}), ContractViolation);
  EXPECT_THROW(ScaleSet({0, 1}), ContractViolation);
  EXPECT_THROW(ScaleSet({65}), ContractViolation);
  EXPECT_THROW(ScaleSet({2, 2}), ContractViolation);
  EXPECT_THROW(ScaleSet({3, 1}), ContractViolation);
  EXPECT_THROW(ScaleSet::parse("1,x"), ContractViolation);
  EXPECT_THROW(ScaleSet::parse("1,2.5"), ContractViolation);
}

TEST(Fusion, InitRangeAndShape) {
  Rng rng(1);
  const Eigen::MatrixXd w = init_fusion(4, 16, 16, rng);
  EXPECT_EQ(w.rows(), 64);
  EXPECT_EQ(w.cols(), 16);
  EXPECT_LE(w.cwiseAbs().maxCoeff(), 1.0 / 8.0);
  EXPECT_GT(w.cwiseAbs().maxCoeff(), 0.1);
}

TEST(Fusion, ZeroWeightGivesOriginAndIdentityGivesExp) {
  const Curvature c(2.0);
  const RandomWalkMatrix p(Graph(4, {{0, 1}, {1, 2}, {2, 3}, {0, 3}}));
  const Eigen::MatrixXd x = 0.3 * Eigen::MatrixXd::Random(4, 3);
  const Eigen::MatrixXd z = multiscale_transform(p, x, ScaleSet({2}));

  const LorentzPoints origin = fuse_to_manifold(z, Eigen::MatrixXd::Zero(3, 3), c);
  for (Eigen::Index i = 0; i < 4; ++i) {
    EXPECT_DOUBLE_EQ(origin.data()(i, 0), 1.0 / std::sqrt(2.0));
    EXPECT_EQ(origin.spatial().row(i).norm(), 0.0);
  }

  const LorentzPoints lifted = fuse_to_manifold(z, Eigen::MatrixXd::Identity(3, 3), c);
  const Eigen::MatrixXd diffused = diffuse(p, x, 2);
  for (Eigen::Index i = 0; i < 4; ++i) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(4);
    v.tail(3) = diffused.row(i).transpose();
    EXPECT_LT((lifted.data().row(i).transpose() - oracle::exp_map(v, 2.0)).cwiseAbs().maxCoeff(), 1e-12);
  }
  EXPECT_LE(lifted.max_constraint_residual(), 1e-12);
  EXPECT_THROW(fuse_to_manifold(z, Eigen::MatrixXd::Zero(4, 3), c), ContractViolation);
}
