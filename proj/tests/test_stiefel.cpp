#include <gtest/gtest.h>

#include <random>

#include "bdris/stiefel.hpp"

using namespace bdris;

namespace {

Eigen::VectorXd realify(const CMatrix &m) {
  Eigen::VectorXd v(2 * m.size());
  for (Index i = 0; i < m.size(); ++i) {
    v(2 * i) = m.data()[i].real();
    v(2 * i + 1) = m.data()[i].imag();
  }
  return v;
}

CMatrix complexify(const Eigen::VectorXd &v, Index rows, Index cols) {
  CMatrix m(rows, cols);
  for (Index i = 0; i < m.size(); ++i)
    m.data()[i] = Complex(v(2 * i), v(2 * i + 1));
  return m;
}

// Orthonormal basis (columns, realified) of {xi : X^H xi + xi^H X = 0},
// obtained as the null space of the linear tangency map.
Eigen::MatrixXd explicit_tangent_basis(const CMatrix &x) {
  const Index n = x.rows(), p = x.cols();
  const Index dim = 2 * n * p;
  Eigen::MatrixXd constraint(2 * p * p, dim);
  for (Index e = 0; e < dim; ++e) {
    Eigen::VectorXd unit = Eigen::VectorXd::Zero(dim);
    unit(e) = 1.0;
    const CMatrix xi = complexify(unit, n, p);
    const CMatrix m = x.adjoint() * xi + xi.adjoint() * x;
    constraint.col(e) = realify(m);
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(constraint, Eigen::ComputeFullV);
  const auto &sv = svd.singularValues();
  Index rank = 0;
  for (Index i = 0; i < sv.size(); ++i)
    if (sv(i) > 1e-10 * sv(0))
      ++rank;
  return svd.matrixV().rightCols(dim - rank);
}

CMatrix inverse_sqrt_polar(const CMatrix &a) {
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(a.adjoint() * a);
  const Eigen::VectorXd d = eig.eigenvalues().cwiseSqrt().cwiseInverse();
  return a * (eig.eigenvectors() * d.asDiagonal() *
              eig.eigenvectors().adjoint());
}

StiefelPoint canonical_point(Index p) {
  CMatrix x = CMatrix::Zero(2 * p, p);
  x.topRows(p).setIdentity();
  return StiefelPoint::from_matrix(x);
}

} // namespace

TEST(StiefelPoint, RejectsWrongShapeAndNonOrthonormal) {
  EXPECT_THROW(StiefelPoint::from_matrix(CMatrix::Identity(3, 2)),
               DimensionError);
  CMatrix x = CMatrix::Zero(4, 2);
  x(0, 0) = 2.0;
  x(1, 1) = 1.0;
  EXPECT_THROW(StiefelPoint::from_matrix(x), ParameterError);
}

TEST(ProjectToTangent, TangentInputIsUnchanged) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 20; ++trial) {
    const auto x = random_point(3, rng);
    const auto xi = random_tangent(x, rng);
    const auto p = project_to_tangent(x, xi.matrix());
    EXPECT_LE((p.matrix() - xi.matrix()).norm(), 1e-12);
  }
}

TEST(ProjectToTangent, BaseItselfProjectsToZero) {
  const auto x = canonical_point(3);
  const auto p = project_to_tangent(x, x.matrix());
  EXPECT_EQ(p.norm(), 0.0);
}

TEST(ProjectToTangent, MatchesLeastSquaresOntoExplicitBasis) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 5; ++trial) {
    const auto x = random_point(3, rng);
    const CMatrix a = complex_gaussian(6, 3, rng);
    const auto xi = project_to_tangent(x, a);
    EXPECT_LT(xi.tangency_residual(), 1e-10);

    const Eigen::MatrixXd basis = explicit_tangent_basis(x.matrix());
    EXPECT_EQ(basis.cols(), 2 * 6 * 3 - 3 * 3);
    const Eigen::VectorXd coeff =
        basis.colPivHouseholderQr().solve(realify(a));
    const CMatrix nearest = complexify(basis * coeff, 6, 3);
    EXPECT_LE((nearest - xi.matrix()).norm(), 1e-10);
  }
}

TEST(ProjectToTangent, ShapeMismatchThrows) {
  const auto x = canonical_point(2);
  EXPECT_THROW(project_to_tangent(x, CMatrix::Zero(4, 3)), DimensionError);
}

TEST(ProjectToTangent, IdempotentAndSelfAdjoint) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const Index p = 1 + trial % 5;
    const auto x = random_point(p, rng);
    const CMatrix a = complex_gaussian(2 * p, p, rng);
    const CMatrix b = complex_gaussian(2 * p, p, rng);
    const auto pa = project_to_tangent(x, a);
    const auto pb = project_to_tangent(x, b);
    EXPECT_LE((project_to_tangent(x, pa.matrix()).matrix() - pa.matrix()).norm(),
              1e-10);
    EXPECT_NEAR(frobenius_inner(pa.matrix(), b), frobenius_inner(a, pb.matrix()),
                1e-10);
  }
}

TEST(Retract, ZeroStepIsIdentity) {
  std::mt19937_64 rng(3);
  const auto x = random_point(4, rng);
  const auto y = retract(x, TangentVector::zero(x));
  EXPECT_EQ(y.matrix(), x.matrix());
}

TEST(Retract, SecondOrderCloseForTinySteps) {
  std::mt19937_64 rng(5);
  const auto x = canonical_point(3);
  auto xi = random_tangent(x, rng);
  xi *= 1e-8 / xi.norm();
  const auto y = retract(x, xi);
  EXPECT_LE((y.matrix() - x.matrix() - xi.matrix()).norm(), 1e-15);
}

TEST(Retract, MatchesInverseSquareRootOracle) {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 10; ++trial) {
    const auto x = random_point(4, rng);
    const auto xi = random_tangent(x, rng);
    const auto y = retract(x, xi);
    EXPECT_LT(y.unitarity_residual(), 1e-12);
    const CMatrix oracle = inverse_sqrt_polar(x.matrix() + xi.matrix());
    EXPECT_LE((y.matrix() - oracle).norm(), 1e-10);
  }
}

TEST(Retract, StaysOnManifoldForLargeSteps) {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 30; ++trial) {
    const auto x = random_point(1 + trial % 6, rng);
    auto xi = random_tangent(x, rng);
    xi *= 1e3 / xi.norm();
    EXPECT_LE(retract(x, xi).unitarity_residual(), 1e-10);
  }
}

TEST(Retract, DerivativeAtZeroIsTheDirection) {
  std::mt19937_64 rng(17);
  const double h = 1e-6;
  for (int trial = 0; trial < 10; ++trial) {
    const auto x = random_point(3, rng);
    const auto xi = random_tangent(x, rng);
    const CMatrix fd =
        (retract(x, h * xi).matrix() - retract(x, -h * xi).matrix()) / (2 * h);
    EXPECT_LE((fd - xi.matrix()).norm() / xi.norm(), 1e-4);
  }
}

TEST(Transport, ToSamePointIsIdentity) {
  std::mt19937_64 rng(19);
  const auto x = random_point(3, rng);
  const auto xi = random_tangent(x, rng);
  EXPECT_LE((transport(x, xi).matrix() - xi.matrix()).norm(), 1e-12);
}

TEST(Transport, ZeroStaysZero) {
  std::mt19937_64 rng(23);
  const auto x = random_point(3, rng);
  const auto y = random_point(3, rng);
  const auto r = transport_checked(y, TangentVector::zero(x));
  EXPECT_EQ(r.vector.norm(), 0.0);
  EXPECT_FALSE(r.degenerate);
}

TEST(Transport, PreservesNormAndLandsInTargetTangentSpace) {
  std::mt19937_64 rng(29);
  for (int trial = 0; trial < 50; ++trial) {
    const auto x = random_point(3, rng);
    const auto y = random_point(3, rng);
    const auto xi = random_tangent(x, rng);
    const auto r = transport_checked(y, xi);
    EXPECT_FALSE(r.degenerate);
    EXPECT_NEAR(r.vector.norm(), xi.norm(), 1e-12);
    EXPECT_LT(r.vector.tangency_residual(), 1e-8);
  }
}

TEST(Transport, FlagsAnnihilatedVector) {
  // xi = X (iI) is tangent at X but lies in the normal space at Y = iX.
  const auto x = canonical_point(2);
  const TangentVector xi(x, x.matrix() * Complex(0.0, 1.0));
  ASSERT_LT(xi.tangency_residual(), 1e-15);
  const auto y = StiefelPoint::from_matrix(x.matrix() * Complex(0.0, 1.0));
  const auto r = transport_checked(y, xi);
  EXPECT_TRUE(r.degenerate);
  EXPECT_LT(r.vector.norm(), 1e-14);
}

TEST(Inner, SmallExamples) {
  CMatrix ones = CMatrix::Constant(2, 1, Complex(1.0, 0.0));
  EXPECT_DOUBLE_EQ(frobenius_inner(ones, ones), 2.0);
  EXPECT_DOUBLE_EQ(frobenius_inner(ones, CMatrix::Zero(2, 1)), 0.0);
  EXPECT_THROW(frobenius_inner(ones, CMatrix::Zero(1, 2)), DimensionError);
}

TEST(Inner, MatchesScalarLoopAndIsSymmetric) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    const auto x = random_point(3, rng);
    const auto a = random_tangent(x, rng);
    const auto b = random_tangent(x, rng);
    double loop = 0.0;
    for (Index j = 0; j < a.matrix().cols(); ++j)
      for (Index i = 0; i < a.matrix().rows(); ++i)
        loop += (std::conj(a.matrix()(i, j)) * b.matrix()(i, j)).real();
    EXPECT_NEAR(inner(a, b), loop, 1e-13);
    EXPECT_DOUBLE_EQ(inner(a, b), inner(b, a));
    EXPECT_NEAR(inner(a, a), a.matrix().squaredNorm(), 1e-12);
  }
}

TEST(RandomPoint, UnitVectorForHalfDimOne) {
  std::mt19937_64 rng(37);
  const auto x = random_point(1, rng);
  EXPECT_EQ(x.rows(), 2);
  EXPECT_NEAR(x.matrix().norm(), 1.0, 1e-15);
}

TEST(RandomPoint, DeterministicPerSeed) {
  std::mt19937_64 a(41), b(41);
  EXPECT_EQ(random_point(5, a).matrix(), random_point(5, b).matrix());
}

TEST(RandomPoint, OrthonormalOverManyDraws) {
  std::mt19937_64 rng(43);
  for (int i = 0; i < 100; ++i)
    EXPECT_LT(random_point(8, rng).unitarity_residual(), 1e-12);
  EXPECT_THROW(random_point(0, rng), ParameterError);
}
