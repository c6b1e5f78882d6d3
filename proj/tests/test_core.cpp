#include <gtest/gtest.h>

#include <numeric>

#include "rotcav/atom_cavity.hpp"
#include "rotcav/core.hpp"
#include "test_support.hpp"

using namespace rotcav;
using rotcav::testing::random_hermitian;
using rotcav::testing::random_unitary;
using rotcav::testing::to_vector;

namespace {

HermitianMatrix diag3() {
  HermitianMatrix h(generic_labels(3));
  h.set_diagonal(0, 3.0);
  h.set_diagonal(1, 1.0);
  h.set_diagonal(2, 2.0);
  return h;
}

double residual(const HermitianMatrix& h, const EigenDecomposition& e) {
  double worst = 0.0;
  for (Eigen::Index k = 0; k < e.eigenvalues.size(); ++k) {
    CVector r = h.entries() * e.eigenvectors.col(k) - e.eigenvalues(k) * e.eigenvectors.col(k);
    worst = std::max(worst, r.norm());
  }
  return worst;
}

}  // namespace

TEST(Eigensolve, DiagonalMatrixIsSortedWithUnitVectors) {
  const auto e = eigensolve_dense(diag3());
  EXPECT_EQ(to_vector(e.eigenvalues), (std::vector<double>{1.0, 2.0, 3.0}));
  EXPECT_NEAR(std::abs(e.eigenvectors(1, 0)), 1.0, 1e-15);
  EXPECT_NEAR(std::abs(e.eigenvectors(2, 1)), 1.0, 1e-15);
  EXPECT_NEAR(std::abs(e.eigenvectors(0, 2)), 1.0, 1e-15);
}

TEST(Eigensolve, TwoLevelRabiSplitting) {
  HermitianMatrix h(generic_labels(2));
  h.set_diagonal(0, 1.0);
  h.set_diagonal(1, 1.0);
  h.set_coupling(0, 1, 0.1);
  const auto e = eigensolve_dense(h);
  EXPECT_NEAR(e.eigenvalues(0), 0.9, 1e-15);
  EXPECT_NEAR(e.eigenvalues(1), 1.1, 1e-15);
}

TEST(Eigensolve, SingleAtomPlanarMatrixMatchesClosedForm) {
  const auto h = build_single_atom_xy({1.0, 0.2}, RotationSpec::about_x(0.3));
  const auto ev = eigenvalues_dense(h);
  const double r = std::sqrt(0.09 + 0.04);
  EXPECT_LT(multiset_deviation(ev, {1.0, 1.0, 1.0 - r, 1.0 + r}), 1e-14);
}

TEST(Eigensolve, ContractOnRandomComplexMatrices) {
  for (int dim : {1, 2, 5, 17, 40}) {
    const auto h = random_hermitian(dim);
    const auto e = eigensolve_dense(h);
    ASSERT_EQ(e.eigenvalues.size(), dim);
    for (int k = 1; k < dim; ++k) EXPECT_LE(e.eigenvalues(k - 1), e.eigenvalues(k));
    const CMatrix gram = e.eigenvectors.adjoint() * e.eigenvectors;
    EXPECT_LT((gram - CMatrix::Identity(dim, dim)).cwiseAbs().maxCoeff(), 1e-12);
    const double norm = h.entries().operatorNorm();
    EXPECT_LE(residual(h, e), 1e-11 * norm);
    // trace identity
    const double trace = h.entries().trace().real();
    EXPECT_NEAR(e.eigenvalues.sum(), trace, 1e-11 * dim * h.max_abs_entry());
  }
}

TEST(Eigensolve, SpectrumInvariantUnderUnitaryBasisChange) {
  const auto h = build_ensemble_lab({1.0, 0.2}, RotationSpec::spherical(0.7, 1.9, 0.35), {3});
  const auto q = random_unitary(static_cast<int>(h.dim()));
  const auto rotated = h.transformed(q, generic_labels(h.dim()));
  EXPECT_LT(multiset_deviation(eigenvalues_dense(h), eigenvalues_dense(rotated)), 1e-11);
}

TEST(Eigensolve, EigenvectorPhaseIsFixed) {
  const auto h = random_hermitian(6);
  const auto e = eigensolve_dense(h);
  for (Eigen::Index k = 0; k < 6; ++k) {
    Eigen::Index first = 0;
    while (std::abs(e.eigenvectors(first, k)) <= 1e-8 * e.eigenvectors.col(k).cwiseAbs().maxCoeff()) ++first;
    EXPECT_EQ(e.eigenvectors(first, k).imag(), 0.0);
    EXPECT_GT(e.eigenvectors(first, k).real(), 0.0);
  }
}

TEST(Eigensolve, RejectsNonHermitianInput) {
  CMatrix m = CMatrix::Zero(2, 2);
  m(0, 1) = 1.0;
  const auto h = HermitianMatrix::from_dense(m, generic_labels(2));
  try {
    eigensolve_dense(h);
    FAIL() << "expected NonHermitianInput";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::NonHermitianInput);
  }
}

TEST(HermitianMatrix, MutatorsProduceExactHermitianData) {
  const auto h = build_ensemble_lab({1.3, 0.4}, RotationSpec::spherical(1.1, 0.4, 0.25), {4});
  EXPECT_EQ(h.hermiticity_defect(), 0.0);
}

TEST(HermitianMatrix, RejectsDuplicateLabelsAndPhotonMismatch) {
  EXPECT_THROW(HermitianMatrix({BasisState::psi_plus(0), BasisState::psi_plus(0)}), Error);
  BasisState wrong = BasisState::ground_one_photon();
  wrong.photon_number = 0;
  EXPECT_THROW(HermitianMatrix({wrong}), Error);
}

TEST(MatrixExponential, ZeroGeneratorGivesIdentity) {
  const HermitianMatrix h(generic_labels(3));
  const CMatrix u = matrix_exponential_unitary(h, 2.5);
  EXPECT_LT((u - CMatrix::Identity(3, 3)).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(MatrixExponential, DiagonalGenerator) {
  HermitianMatrix h(generic_labels(2));
  h.set_diagonal(0, 1.0);
  h.set_diagonal(1, 2.0);
  const CMatrix u = matrix_exponential_unitary(h, pi);
  EXPECT_NEAR(std::abs(u(0, 0) - cplx(-1.0, 0.0)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(u(1, 1) - cplx(1.0, 0.0)), 0.0, 1e-15);
  EXPECT_EQ(std::abs(u(0, 1)), 0.0);
}

TEST(MatrixExponential, UnitaryAndGroupProperty) {
  const auto h = random_hermitian(4);
  const CMatrix u = matrix_exponential_unitary(h, 0.7);
  EXPECT_LT((u.adjoint() * u - CMatrix::Identity(4, 4)).cwiseAbs().maxCoeff(), 1e-12);
  const CMatrix a = matrix_exponential_unitary(h, 0.3);
  const CMatrix b = matrix_exponential_unitary(h, 0.4);
  EXPECT_LT((a * b - u).cwiseAbs().maxCoeff(), 1e-11);
}

TEST(Levels, GroupingCountsMultiplicities) {
  const auto levels = group_levels({1.0, 0.5, 1.0 + 1e-13, 1.5, 0.5}, 1e-10);
  ASSERT_EQ(levels.size(), 3u);
  EXPECT_EQ(levels[0].multiplicity, 2u);
  EXPECT_EQ(levels[1].multiplicity, 2u);
  EXPECT_EQ(levels[2].multiplicity, 1u);
}
