#include <gtest/gtest.h>

#include "rotcav/atom_cavity.hpp"
#include "test_support.hpp"

using namespace rotcav;
using rotcav::testing::uniform;

namespace {

const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

template <class F>
Errc error_code(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no exception thrown";
  return Errc::InvalidArgument;
}

CVector embed_dark(const RotationSpec& rot) {
  const auto d = dark_state_xy(rot);
  CVector v = CVector::Zero(4);
  v(2) = d[0];
  v(3) = d[1];
  return v;
}

// Numerical eigenbasis of the excited 3x3 block of the lab matrix, ordered as
// (+W, -W, 0) with each vector's m=0 component made real and non-negative.
// Independent route to the general-axis reduced form.
CMatrix numerical_general_basis(const HermitianMatrix& lab) {
  HermitianMatrix block(generic_labels(3));
  for (int i = 0; i < 3; ++i) {
    block.set_diagonal(i, lab(i + 1, i + 1).real());
    for (int j = i + 1; j < 3; ++j)
      if (lab(i + 1, j + 1) != cplx(0.0)) block.set_coupling(i, j, lab(i + 1, j + 1));
  }
  const auto e = eigensolve_dense(block);
  CMatrix q = CMatrix::Zero(4, 4);
  q(0, 0) = 1.0;
  const int order[3] = {2, 0, 1};  // ascending eigenvalues are (-W, 0, +W)
  for (int c = 0; c < 3; ++c) {
    CVector v = e.eigenvectors.col(order[c]);
    if (std::abs(v(0)) > 1e-14) v *= std::conj(v(0)) / std::abs(v(0));
    q.block(1, c + 1, 3, 1) = v;
  }
  return q;
}

}  // namespace

TEST(RotationSpec, DerivedComponentsSatisfyIdentities) {
  for (int trial = 0; trial < 50; ++trial) {
    const auto rot = RotationSpec::spherical(uniform(0, pi), uniform(0, 2 * pi), uniform(0.01, 2.0));
    const auto& u = rot.axis();
    EXPECT_NEAR(std::hypot(u[0], u[1], u[2]), 1.0, 1e-12);
    EXPECT_NEAR(std::norm(rot.omega_plus()) + std::norm(rot.omega_minus()),
                rot.omega_xy() * rot.omega_xy(), 1e-12);
    EXPECT_EQ(std::conj(rot.omega_minus()), rot.omega_plus());
    EXPECT_NEAR(rot.omega_xy() * rot.omega_xy() + rot.omega_z() * rot.omega_z(),
                rot.omega() * rot.omega(), 1e-12);
  }
}

TEST(SingleAtomXY, NoRotationIsBlockDiagonal) {
  const auto h = build_single_atom_xy({1.0, 0.1}, RotationSpec::about_x(0.0));
  EXPECT_LT(multiset_deviation(eigenvalues_dense(h), {1.0, 1.0, 0.9, 1.1}), 1e-15);
}

TEST(SingleAtomXY, EntriesForRotationAboutX) {
  const auto h = build_single_atom_xy({1.0, 0.2}, RotationSpec::about_x(0.3));
  const double c = -0.3 * kInvSqrt2;
  EXPECT_NEAR(std::abs(h(1, 2) - c), 0.0, 1e-16);
  EXPECT_NEAR(std::abs(h(1, 3) - c), 0.0, 1e-16);
  EXPECT_EQ(h(0, 1), cplx(0.2));
  EXPECT_EQ(h(0, 2), cplx(0.0));
  EXPECT_EQ(h(2, 3), cplx(0.0));
  for (int i = 0; i < 4; ++i) EXPECT_EQ(h(i, i), cplx(1.0));
}

TEST(SingleAtomXY, EntriesFollowLadderConvention) {
  const auto rot = RotationSpec::in_plane(0.83, 0.4);
  const auto h = build_single_atom_xy({1.0, 0.2}, rot);
  EXPECT_EQ(h(1, 2), -rot.omega_minus());
  EXPECT_EQ(h(1, 3), -rot.omega_plus());
  EXPECT_EQ(h(2, 1), -rot.omega_plus());
  EXPECT_EQ(h(3, 1), -rot.omega_minus());
}

TEST(SingleAtomXY, SpectrumOnRandomPlanarAxes) {
  for (int trial = 0; trial < 100; ++trial) {
    const CavitySpec cav{uniform(0.5, 2.0), uniform(0.0, 0.5)};
    const auto rot = RotationSpec::in_plane(uniform(0, 2 * pi), uniform(0.0, 0.8));
    const double r = std::hypot(rot.omega(), cav.g);
    const auto ev = eigenvalues_dense(build_single_atom_xy(cav, rot));
    EXPECT_LT(multiset_deviation(ev, {cav.omega_c, cav.omega_c, cav.omega_c - r, cav.omega_c + r}), 1e-11);
  }
}

TEST(SingleAtomXY, RejectsAxisWithZComponent) {
  EXPECT_EQ(error_code([] { build_single_atom_xy({1.0, 0.2}, RotationSpec::spherical(1.0, 0.0, 0.3)); }),
            Errc::NonPlanarAxis);
}

TEST(DarkState, RotationAboutX) {
  const auto d = dark_state_xy(RotationSpec::about_x(0.3));
  EXPECT_NEAR(std::abs(d[0] - cplx(kInvSqrt2)), 0.0, 1e-16);
  EXPECT_NEAR(std::abs(d[1] - cplx(-kInvSqrt2)), 0.0, 1e-16);
}

TEST(DarkState, RotationAboutY) {
  // W+ = -i W/sqrt2, W- = +i W/sqrt2  ->  (W+/W, -W-/W) = (-i, -i)/sqrt2
  const auto d = dark_state_xy(RotationSpec::about_y(0.7));
  EXPECT_NEAR(std::abs(d[0] - cplx(0, -kInvSqrt2)), 0.0, 1e-16);
  EXPECT_NEAR(std::abs(d[1] - cplx(0, -kInvSqrt2)), 0.0, 1e-16);
}

TEST(DarkState, DecouplesForAnyPlanarAxis) {
  for (int trial = 0; trial < 50; ++trial) {
    const CavitySpec cav{uniform(0.5, 2.0), uniform(0.0, 0.5)};
    const auto rot = RotationSpec::in_plane(uniform(0, 2 * pi), uniform(0.01, 0.8));
    const auto h = build_single_atom_xy(cav, rot);
    const CVector v = embed_dark(rot);
    EXPECT_NEAR(v.norm(), 1.0, 1e-14);
    EXPECT_LT((h.entries() * v - cav.omega_c * v).norm(), 1e-12);
    EXPECT_LT(std::abs((h.entries() * v)(0)), 1e-12);
  }
}

TEST(DarkState, ZeroRotationRejected) {
  EXPECT_EQ(error_code([] { dark_state_xy(RotationSpec::about_x(0.0)); }), Errc::ZeroPlanarRotation);
}

TEST(ReducedXY, BasisChangeSplitsOffDarkState) {
  for (int trial = 0; trial < 20; ++trial) {
    const CavitySpec cav{uniform(0.5, 2.0), uniform(0.0, 0.5)};
    const auto rot = RotationSpec::in_plane(uniform(0, 2 * pi), uniform(0.01, 0.8));
    const CMatrix q = xy_reduction_basis(rot);
    EXPECT_LT((q.adjoint() * q - CMatrix::Identity(4, 4)).cwiseAbs().maxCoeff(), 1e-14);
    const CMatrix t = q.adjoint() * build_single_atom_xy(cav, rot).entries() * q;
    const auto reduced = build_single_atom_reduced_xy(cav, rot);
    EXPECT_LT((t.topLeftCorner(3, 3) - reduced.entries()).cwiseAbs().maxCoeff(), 1e-14);
    EXPECT_LT(t.col(3).head(3).cwiseAbs().maxCoeff(), 1e-14);
    EXPECT_NEAR(t(3, 3).real(), cav.omega_c, 1e-14);
  }
}

TEST(ReducedXY, SpectrumExamples) {
  const double r = 0.36055512754639896;  // sqrt(0.09 + 0.04)
  EXPECT_LT(multiset_deviation(eigenvalues_dense(build_single_atom_reduced_xy({1.0, 0.2}, RotationSpec::about_x(0.3))),
                               {1.0 - r, 1.0, 1.0 + r}),
            1e-14);
  EXPECT_LT(multiset_deviation(eigenvalues_dense(build_single_atom_reduced_xy({1.0, 0.0}, RotationSpec::about_x(0.3))),
                               {0.7, 1.0, 1.3}),
            1e-15);
}

TEST(ReducedXY, SpectrumPlusDarkEqualsFullMatrix) {
  for (int trial = 0; trial < 50; ++trial) {
    const CavitySpec cav{uniform(0.5, 2.0), uniform(0.0, 0.5)};
    const auto rot = RotationSpec::in_plane(uniform(0, 2 * pi), uniform(0.01, 0.8));
    auto reduced = eigenvalues_dense(build_single_atom_reduced_xy(cav, rot));
    reduced.push_back(cav.omega_c);
    EXPECT_LT(multiset_deviation(reduced, eigenvalues_dense(build_single_atom_xy(cav, rot))), 1e-12);
  }
}

TEST(RotationInducedPolariton, IsEigenvectorAtCavityEnergy) {
  const CavitySpec cav{1.0, 0.2};
  const auto rot = RotationSpec::about_x(0.3);
  const CVector v = rotation_induced_polariton_xy(cav, rot);
  const auto h = build_single_atom_reduced_xy(cav, rot);
  EXPECT_LT((h.entries() * v - 1.0 * v).norm(), 1e-12);
  EXPECT_NEAR(v.norm(), 1.0, 1e-15);
  // (W sqrt2/g, -1, +1) direction
  EXPECT_NEAR(v(1).real(), -v(2).real(), 1e-15);
  EXPECT_NEAR(v(0).real() / v(2).real(), 0.3 * std::sqrt(2.0) / 0.2, 1e-13);
}

TEST(RotationInducedPolariton, PhotonicWeightVanishesWithoutRotationAndGrows) {
  const CavitySpec cav{1.0, 0.2};
  EXPECT_LT(rotation_induced_photonic_weight(cav, RotationSpec::about_x(1e-9)), 1e-15);
  double prev = 0.0;
  for (int i = 1; i <= 100; ++i) {
    const double w = 0.01 * i;
    const double weight = rotation_induced_photonic_weight(cav, RotationSpec::about_x(w));
    EXPECT_GT(weight, prev);
    EXPECT_NEAR(weight, w * w / (w * w + 0.04), 1e-14);
    prev = weight;
  }
}

TEST(RotationInducedPolariton, NeedsCoupling) {
  EXPECT_EQ(error_code([] { rotation_induced_polariton_xy({1.0, 0.0}, RotationSpec::about_x(0.3)); }),
            Errc::ZeroCoupling);
}

TEST(SingleAtomGeneral, MatchesNumericalReductionOfLabMatrix) {
  for (int trial = 0; trial < 50; ++trial) {
    const CavitySpec cav{uniform(0.5, 2.0), uniform(0.01, 0.5)};
    // polar angle below pi/2 keeps Wz > 0, so every coupling is non-negative
    const auto rot = RotationSpec::spherical(uniform(0.05, 1.5), uniform(0, 2 * pi), uniform(0.05, 0.8));
    const auto lab = build_single_atom_lab(cav, rot);
    const CMatrix q = numerical_general_basis(lab);
    const CMatrix t = q.adjoint() * lab.entries() * q;
    const auto general = build_single_atom_general(cav, rot);
    EXPECT_LT((t - general.entries()).cwiseAbs().maxCoeff(), 1e-12) << "trial " << trial;
  }
}

TEST(SingleAtomGeneral, PlanarAxisRecoversReducedForm) {
  const CavitySpec cav{1.0, 0.2};
  const auto rot = RotationSpec::in_plane(0.4, 0.3);
  const auto general = build_single_atom_general(cav, rot);
  const auto reduced = build_single_atom_reduced_xy(cav, rot);
  EXPECT_LT((general.entries().topLeftCorner(3, 3) - reduced.entries()).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_EQ(general(0, 3), cplx(0.0));
  auto ev = eigenvalues_dense(reduced);
  ev.push_back(1.0);
  EXPECT_LT(multiset_deviation(ev, eigenvalues_dense(general)), 1e-12);
}

TEST(SingleAtomGeneral, RotationAlongPolarizationKeepsPolaritonDoublet) {
  const CavitySpec cav{1.0, 0.2};
  const auto general = build_single_atom_general(cav, RotationSpec::about_z(0.3));
  EXPECT_EQ(general(0, 1), cplx(0.0));
  EXPECT_EQ(general(0, 2), cplx(0.0));
  EXPECT_NEAR(general(0, 3).real(), 0.2, 1e-16);
  EXPECT_LT(multiset_deviation(eigenvalues_dense(general), {0.8, 1.2, 0.7, 1.3}), 1e-15);
}

TEST(SingleAtomGeneral, TiltedAxisExample) {
  const auto rot = RotationSpec::from_components(0.3, 0.0, 0.4);
  const auto ev = eigenvalues_dense(build_single_atom_general({1.0, 0.2}, rot));
  // dense diagonalization of the lab-basis matrix
  const std::vector<double> oracle{0.48431223960183223, 0.844867367148231, 1.155132632851769, 1.5156877603981678};
  EXPECT_LT(multiset_deviation(ev, oracle), 1e-13);
  EXPECT_LT(multiset_deviation(ev, {1 - 0.515688, 1 - 0.155133, 1 + 0.155133, 1 + 0.515688}), 1e-6);
}

TEST(SingleAtomGeneral, ZeroRotationRejected) {
  EXPECT_EQ(error_code([] { build_single_atom_general({1.0, 0.2}, RotationSpec::about_z(0.0)); }),
            Errc::ZeroTotalRotation);
}

TEST(Ensemble, SingleAtomPlanarEqualsReducedMatrix) {
  const CavitySpec cav{1.0, 0.2};
  const auto rot = RotationSpec::about_x(0.3);
  const auto dense = build_ensemble(cav, rot, {1}).to_dense();
  EXPECT_EQ(dense.entries(), build_single_atom_reduced_xy(cav, rot).entries());
}

TEST(Ensemble, ThreeAtomsPlanar) {
  const CavitySpec cav{1.0, 0.1};
  const auto a = build_ensemble(cav, RotationSpec::about_x(0.3), {3});
  ASSERT_EQ(a.dim(), 7u);
  const double r = std::sqrt(0.09 + 3 * 0.01);
  EXPECT_LT(multiset_deviation(eigenvalues_dense(a.to_dense()), {1.0, 1 - r, 1 + r, 1.3, 1.3, 0.7, 0.7}), 1e-14);
}

TEST(Ensemble, TwoAtomsGeneralMatchesLabMatrix) {
  const CavitySpec cav{1.0, 0.2};
  const auto rot = RotationSpec::from_components(0.3, 0.1, 0.4);
  const auto a = build_ensemble(cav, rot, {2});
  ASSERT_EQ(a.dim(), 7u);
  EXPECT_LT(multiset_deviation(eigenvalues_dense(a.to_dense()),
                               eigenvalues_dense(build_ensemble_lab(cav, rot, {2}))),
            1e-13);
}

TEST(Ensemble, PlanarSpectrumIndependentOfAzimuth) {
  const CavitySpec cav{1.0, 0.15};
  const auto ref = eigenvalues_dense(build_ensemble(cav, RotationSpec::in_plane(0.0, 0.3), {4}).to_dense());
  for (double alpha : {0.3, 1.2, 2.9, 5.5}) {
    EXPECT_LT(multiset_deviation(ref, eigenvalues_dense(build_ensemble(cav, RotationSpec::in_plane(alpha, 0.3), {4}).to_dense())),
              1e-12);
    EXPECT_LT(multiset_deviation(eigenvalues_dense(build_single_atom_xy(cav, RotationSpec::in_plane(0.0, 0.3))),
                                 eigenvalues_dense(build_single_atom_xy(cav, RotationSpec::in_plane(alpha, 0.3)))),
              1e-12);
  }
}

TEST(Ensemble, GeneralBuilderOnPlanarAxisAddsOneDecoupledState) {
  const CavitySpec cav{1.0, 0.15};
  const auto rot = RotationSpec::in_plane(0.7, 0.3);
  for (int n : {1, 3}) {
    auto xy = eigenvalues_dense(build_ensemble_xy(cav, rot, {n}).to_dense());
    xy.insert(xy.end(), static_cast<std::size_t>(n), 1.0);
    EXPECT_LT(multiset_deviation(xy, eigenvalues_dense(build_ensemble_general(cav, rot, {n}).to_dense())), 1e-12);
  }
}

TEST(Ensemble, DimensionBookkeeping) {
  const CavitySpec cav{1.0, 0.15};
  EXPECT_EQ(build_ensemble(cav, RotationSpec::about_x(0.3), {7}).dim(), 15u);
  EXPECT_EQ(build_ensemble(cav, RotationSpec::from_components(0.3, 0, 0.1), {7}).dim(), 22u);
  EXPECT_EQ(build_ensemble_lab(cav, RotationSpec::about_x(0.3), {7}).dim(), 22u);
}

TEST(Ensemble, ZeroRotationRejectedButNonRotatingPathWorks) {
  EXPECT_EQ(error_code([] { build_ensemble({1.0, 0.2}, RotationSpec::about_x(0.0), {3}); }),
            Errc::ZeroTotalRotation);
  const auto a = build_nonrotating({1.0, 0.2}, {4});
  const auto ev = eigenvalues_dense(a.to_dense());
  EXPECT_LT(multiset_deviation(ev, {0.6, 1.0, 1.0, 1.0, 1.4}), 1e-14);
}

TEST(Ensemble, EntangledDarkStatesAreDecoupledEigenvectors) {
  const CavitySpec cav{1.0, 0.2};
  const auto rot = RotationSpec::in_plane(1.1, 0.3);
  const auto lab = build_ensemble_lab(cav, rot, {4});
  const CMatrix d = entangled_dark_states(rot, {4});
  EXPECT_LT((d.adjoint() * d - CMatrix::Identity(4, 4)).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_LT((lab.entries() * d - cav.omega_c * d).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Ensemble, DetuningShiftsExcitedStates) {
  const CavitySpec cav{1.0, 0.0, 0.05};
  const auto a = build_ensemble(cav, RotationSpec::about_x(0.3), {2});
  EXPECT_LT(multiset_deviation(eigenvalues_dense(a.to_dense()), {1.0, 1.35, 1.35, 0.75, 0.75}), 1e-15);
}
