#include "bearing_swarm/bearing.hpp"

#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/KroneckerProduct>

#include "test_util.hpp"

using namespace bearing_swarm;

namespace {

// Dense reference construction: Hbar^T * blockdiag(projectors) * Hbar with
// Hbar = H (x) I_2. Deliberately different from the edge-accumulated
// implementation so the two can cross-check each other.
Eigen::MatrixXd laplacian_via_kronecker(const FormationGraph& g, const Eigen::VectorXd& p) {
  const int m = g.edge_count();
  Eigen::MatrixXd hbar =
      Eigen::kroneckerProduct(g.incidence_matrix(), Eigen::Matrix2d::Identity());
  Eigen::MatrixXd pi = Eigen::MatrixXd::Zero(2 * m, 2 * m);
  for (int k = 0; k < m; ++k) {
    const Edge& e = g.edges()[k];
    const Eigen::Vector2d disp = p.segment<2>(2 * (e.head - 1)) - p.segment<2>(2 * (e.tail - 1));
    pi.block<2, 2>(2 * k, 2 * k) = projector<2>(Eigen::Vector2d(disp.normalized()));
  }
  return hbar.transpose() * pi * hbar;
}

TEST(Bearing, UnitVectorAndDirection) {
  const Eigen::Vector2d g = bearing<2>(Eigen::Vector2d(3.0, -4.0));
  EXPECT_NEAR(g.norm(), 1.0, 1e-15);
  EXPECT_NEAR(g.x(), 0.6, 1e-15);
  EXPECT_NEAR(g.y(), -0.8, 1e-15);
}

TEST(Bearing, DegenerateDisplacementThrows) {
  EXPECT_THROW(bearing<2>(Eigen::Vector2d(0.0, 0.0)), DegenerateEdge);
  EXPECT_THROW(bearing<2>(Eigen::Vector2d(1e-10, 0.0)), DegenerateEdge);
  EXPECT_NO_THROW(bearing<2>(Eigen::Vector2d(1e-8, 0.0)));
}

TEST(Bearing, ProjectorAlgebra) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    Eigen::Vector2d v{u(rng), u(rng)};
    if (v.norm() < 1e-3) continue;
    const Eigen::Vector2d g = v.normalized();
    const Eigen::Matrix2d p = projector<2>(g);
    EXPECT_LT((p - p.transpose()).norm(), 1e-15);         // symmetric
    EXPECT_LT((p * p - p).norm(), 1e-15);                 // idempotent
    EXPECT_LT((p * g).norm(), 1e-15);                     // annihilates g
    const Eigen::Vector2d perp{-g.y(), g.x()};
    EXPECT_LT((p * perp - perp).norm(), 1e-14);           // identity on the complement
  }
}

TEST(Bearing, Projector3D) {
  const Eigen::Vector3d g = Eigen::Vector3d(1.0, 2.0, 2.0).normalized();
  const Eigen::Matrix3d p = projector<3>(g);
  EXPECT_LT((p * g).norm(), 1e-15);
  EXPECT_NEAR(p.trace(), 2.0, 1e-14);  // rank d-1
}

TEST(Bearing, StackUnstackRoundTrip) {
  std::vector<Eigen::Vector2d> pts{{1.0, 2.0}, {-3.0, 0.5}};
  const Eigen::VectorXd stacked = stack_positions(pts);
  ASSERT_EQ(stacked.size(), 4);
  EXPECT_EQ(stacked[2], -3.0);
  const auto back = unstack_positions(stacked);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[1], pts[1]);
  EXPECT_THROW(unstack_positions(Eigen::VectorXd::Zero(3)), std::invalid_argument);
}

TEST(BearingLaplacian, MatchesDenseKroneckerConstruction) {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 7);
    const FormationGraph g = bs_test::random_connected_graph(rng, n);
    const Eigen::VectorXd p = stack_positions(bs_test::random_spread_positions(rng, n));
    const Eigen::MatrixXd fast = bearing_laplacian<2>(g, p);
    const Eigen::MatrixXd slow = laplacian_via_kronecker(g, p);
    EXPECT_LT((fast - slow).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(BearingLaplacian, NullSpaceAndSpectrum) {
  // Translations and the configuration itself are annihilated; the matrix is
  // PSD and -k_p(L_B + A) has no eigenvalue in the right half plane.
  std::mt19937_64 rng(29);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 7);
    const FormationGraph g = bs_test::random_connected_graph(rng, n);
    const Eigen::VectorXd p = stack_positions(bs_test::random_spread_positions(rng, n));
    const Eigen::MatrixXd lb = bearing_laplacian<2>(g, p);

    Eigen::MatrixXd ones = Eigen::MatrixXd::Zero(2 * n, 2);
    for (int i = 0; i < n; ++i) ones.block<2, 2>(2 * i, 0) = Eigen::Matrix2d::Identity();
    EXPECT_LT((lb * ones).norm(), 1e-10);
    EXPECT_LT((lb * p).norm(), 1e-10);
    EXPECT_LT((lb - lb.transpose()).norm(), 1e-12);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(lb);
    EXPECT_GE(eig.eigenvalues().minCoeff(), -1e-10);

    const Eigen::MatrixXd closed = -(lb + anchor_matrix<2>(g));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig2(closed);
    EXPECT_LE(eig2.eigenvalues().maxCoeff(), 1e-10);
  }
}

TEST(BearingLaplacian, WrongSizeThrows) {
  const FormationGraph g(3, {{1, 2}, {2, 3}}, {1});
  EXPECT_THROW(bearing_laplacian<2>(g, Eigen::VectorXd::Zero(5)), std::invalid_argument);
}

TEST(BearingLaplacian, CollidingEndpointsThrowWithEdgeAttribution) {
  const FormationGraph g(3, {{1, 2}, {2, 3}}, {1});
  Eigen::VectorXd p(6);
  p << 0.0, 0.0, 0.0, 0.0, 1.0, 1.0;
  try {
    bearing_laplacian<2>(g, p);
    FAIL() << "expected DegenerateEdge";
  } catch (const DegenerateEdge& e) {
    EXPECT_EQ(e.tail, 1);
    EXPECT_EQ(e.head, 2);
  }
}

TEST(AnchorMatrix, IdentityBlocksAtAnchors) {
  const FormationGraph g(3, {{1, 2}, {2, 3}}, {1, 3});
  const Eigen::MatrixXd a = anchor_matrix<2>(g);
  EXPECT_NEAR(a.trace(), 4.0, 1e-15);
  EXPECT_DOUBLE_EQ(a(0, 0), 1.0);
  EXPECT_DOUBLE_EQ(a(2, 2), 0.0);
  EXPECT_DOUBLE_EQ(a(4, 4), 1.0);
  EXPECT_LT((a * a - a).norm(), 1e-15);
}

TEST(BearingField, MeasureAndOrientation) {
  const FormationGraph g(3, {{1, 2}, {2, 3}}, {1});
  const std::vector<Eigen::Vector2d> p{{0.0, 0.0}, {2.0, 0.0}, {2.0, 2.0}};
  const BearingField field = BearingField::measure(g, p);
  EXPECT_LT((field.bearing_to(1, 2) - Eigen::Vector2d(1, 0)).norm(), 1e-15);
  EXPECT_LT((field.bearing_to(2, 1) - Eigen::Vector2d(-1, 0)).norm(), 1e-15);
  EXPECT_LT((field.bearing_to(2, 3) - Eigen::Vector2d(0, 1)).norm(), 1e-15);
}

TEST(BearingField, MissingAndInvalidQueries) {
  const FormationGraph g(3, {{1, 2}, {2, 3}}, {1});
  BearingField field(g);
  EXPECT_THROW(field.bearing_to(1, 2), MissingBearing);
  field.set(2, 1, Eigen::Vector2d(-1.0, 0.0));
  EXPECT_LT((field.bearing_to(1, 2) - Eigen::Vector2d(1, 0)).norm(), 1e-15);
  EXPECT_FALSE(field.has(2, 3));
  EXPECT_THROW(field.bearing_to(1, 3), InvalidGraph);  // not an edge
}

TEST(BearingField, MeasureCollisionNamesEdge) {
  const FormationGraph g(2, {{1, 2}}, {1});
  try {
    BearingField::measure(g, {{1.0, 1.0}, {1.0, 1.0}});
    FAIL() << "expected DegenerateEdge";
  } catch (const DegenerateEdge& e) {
    EXPECT_EQ(e.tail, 1);
    EXPECT_EQ(e.head, 2);
    EXPECT_LT(e.length, 1e-9);
  }
}

}  // namespace
