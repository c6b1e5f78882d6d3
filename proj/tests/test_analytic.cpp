#include <gtest/gtest.h>

#include "rotcav/analytic.hpp"
#include "test_support.hpp"

using namespace rotcav;
using rotcav::testing::uniform;

TEST(SpectrumXY, NoRotationLimit) {
  const auto p = spectrum_xy({1.0, 0.1}, RotationSpec::about_x(0.0), 1);
  EXPECT_LT(multiset_deviation(p.branch_energies, {0.9, 1.0, 1.1}), 1e-15);
}

TEST(SpectrumXY, FourAtomExample) {
  const CavitySpec cav{1.0, 0.05};
  const auto rot = RotationSpec::about_x(0.3);
  const auto p = spectrum_xy(cav, rot, 4);
  EXPECT_LT(multiset_deviation(p.branch_energies, {0.68377223398316206, 1.0, 1.3162277660168379}), 1e-15);
  ASSERT_EQ(p.dark_levels.size(), 2u);
  EXPECT_DOUBLE_EQ(p.dark_levels[0].energy, 0.7);
  EXPECT_EQ(p.dark_levels[0].multiplicity, 3u);
  EXPECT_DOUBLE_EQ(p.dark_levels[1].energy, 1.3);
  EXPECT_EQ(p.dark_levels[1].multiplicity, 3u);
  const auto s = eigensolve_arrowhead(build_ensemble(cav, rot, {4}));
  std::vector<double> expected = p.multiset();
  // the arrowhead form excludes the 4 entangled dark states at wc
  for (int i = 0; i < 4; ++i) expected.erase(std::find(expected.begin(), expected.end(), 1.0));
  EXPECT_LT(multiset_deviation(s.eigenvalues, expected), 1e-14);
}

TEST(SpectrumXY, OnlyNgSquaredMatters) {
  const auto rot = RotationSpec::about_y(0.37);
  const auto a = spectrum_xy({1.0, 0.05}, rot, 12).branch_energies;
  const auto b = spectrum_xy({1.0, 0.1}, rot, 3).branch_energies;
  EXPECT_LT(multiset_deviation(a, b), 1e-15);
}

TEST(SpectrumGeneral, PlanarLimitMatchesXY) {
  for (int trial = 0; trial < 200; ++trial) {
    const CavitySpec cav{uniform(0.5, 2), uniform(0, 0.5)};
    const auto rot = RotationSpec::in_plane(uniform(0, 2 * pi), uniform(0.01, 1));
    const int n = 1 + static_cast<int>(uniform(0, 30));
    auto xy = spectrum_xy(cav, rot, n).branch_energies;
    xy.push_back(cav.omega_c);
    const auto gen = spectrum_general(cav, rot, n).branch_energies;
    EXPECT_LT(multiset_deviation(xy, gen), 1e-12);
    EXPECT_EQ(gen[1], cav.omega_c);  // outer-minus branch sits exactly on wc
    EXPECT_EQ(gen[2], cav.omega_c);
  }
}

TEST(SpectrumGeneral, TiltedExample) {
  const auto p = spectrum_general({1.0, 0.2}, RotationSpec::from_components(0.3, 0.0, 0.4), 1);
  const std::vector<double> oracle{0.48431223960183223, 0.844867367148231, 1.155132632851769, 1.5156877603981678};
  EXPECT_LT(multiset_deviation(p.branch_energies, oracle), 1e-14);
  EXPECT_TRUE(p.dark_levels.empty());
  EXPECT_TRUE(p.entangled.empty());
}

TEST(SpectrumGeneral, RotationAlongPolarization) {
  // Wxy = 0: the four branches are wc +- sqrt(N) g and wc +- Wz
  const CavitySpec cav{1.0, 0.1};
  const auto rot = RotationSpec::about_z(0.35);
  const int n = 3;
  const auto p = spectrum_general(cav, rot, n);
  const double s = std::sqrt(3.0) * 0.1;
  EXPECT_LT(multiset_deviation(p.branch_energies, {1 - s, 1 + s, 0.65, 1.35}), 1e-14);
  EXPECT_LT(multiset_deviation(p.multiset(), eigenvalues_dense(build_ensemble_lab(cav, rot, {n}))), 1e-12);
}

TEST(DarkCensus, Examples) {
  const CavitySpec cav{1.0, 0.1};
  const auto rot = RotationSpec::about_x(0.3);
  auto c = dark_state_census(cav, rot, 1, AxisCase::XY);
  EXPECT_TRUE(c.collective.empty());
  ASSERT_EQ(c.entangled.size(), 1u);
  EXPECT_EQ(c.entangled[0].multiplicity, 1u);

  c = dark_state_census(cav, rot, 5, AxisCase::XY);
  ASSERT_EQ(c.collective.size(), 2u);
  EXPECT_EQ(c.collective[0].multiplicity, 4u);
  EXPECT_EQ(c.collective[1].multiplicity, 4u);
  EXPECT_EQ(c.entangled[0].multiplicity, 5u);

  c = dark_state_census(cav, RotationSpec::from_components(0.3, 0, 0.2), 5, AxisCase::General);
  ASSERT_EQ(c.collective.size(), 3u);
  for (const auto& l : c.collective) EXPECT_EQ(l.multiplicity, 4u);
  EXPECT_TRUE(c.entangled.empty());
}

TEST(PredictedSpectrum, StateCountIsAlwaysThreeNPlusOne) {
  const CavitySpec cav{1.0, 0.1};
  for (int n : {1, 2, 7, 50}) {
    EXPECT_EQ(predict_spectrum(cav, RotationSpec::about_x(0.3), n).state_count(), 3u * n + 1);
    EXPECT_EQ(predict_spectrum(cav, RotationSpec::from_components(0.1, 0.2, 0.3), n).state_count(), 3u * n + 1);
    EXPECT_EQ(predict_spectrum(cav, RotationSpec::about_x(0.0), n).state_count(), 3u * n + 1);
  }
}

TEST(PredictedSpectrum, EqualsDenseLabSpectrumOnRandomParameters) {
  for (int trial = 0; trial < 60; ++trial) {
    const CavitySpec cav{uniform(0.5, 2), uniform(0.0, 0.4)};
    const int n = 1 + static_cast<int>(uniform(0, 50));
    RotationSpec rot;
    switch (trial % 3) {
      case 0: rot = RotationSpec::in_plane(uniform(0, 2 * pi), uniform(0.01, 1)); break;
      case 1: rot = RotationSpec::spherical(uniform(0, pi), uniform(0, 2 * pi), uniform(0.01, 1)); break;
      default: rot = RotationSpec::about_x(0.0); break;
    }
    const auto dense = eigenvalues_dense(build_ensemble_lab(cav, rot, {n}));
    EXPECT_LT(multiset_deviation(predict_spectrum(cav, rot, n).multiset(), dense), 1e-10) << "trial " << trial;
  }
}

TEST(PredictedSpectrum, BranchesSpreadWithRotation) {
  const CavitySpec cav{1.0, 0.1};
  for (const auto& axis : std::vector<std::array<double, 3>>{{1, 0, 0}, {0.3, 0.5, 0.8}, {0, 0, 1}}) {
    double prev = 0.0;
    for (int i = 1; i <= 200; ++i) {
      const auto b = predict_spectrum(cav, RotationSpec(axis, 0.005 * i), 6).branch_energies;
      const double width = b.back() - b.front();
      EXPECT_GE(width, prev);
      prev = width;
    }
  }
}

TEST(PredictedSpectrum, DetuningRejected) {
  EXPECT_THROW(spectrum_xy({1.0, 0.1, 0.01}, RotationSpec::about_x(0.3), 2), Error);
}
