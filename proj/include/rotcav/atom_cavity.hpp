#pragma once

#include <array>
#include <cmath>
#include <string>

#include "rotcav/arrowhead.hpp"
#include "rotcav/core.hpp"

namespace rotcav {

/// Single cavity mode polarized along Z.
struct CavitySpec {
  double omega_c = 1.0;  // hbar*omega_c
  double g = 0.0;        // g0 * d_z
  // Offset of the atomic excitation energy from omega_c. The analytic module
  // assumes exact resonance and rejects a nonzero value.
  double detuning = 0.0;

  void validate() const {
    require(std::isfinite(omega_c) && omega_c > 0.0, Errc::InvalidArgument, "omega_c must be > 0");
    require(std::isfinite(g) && g >= 0.0, Errc::InvalidArgument, "g must be >= 0");
    require(std::isfinite(detuning), Errc::InvalidArgument, "detuning must be finite");
  }

  double excited() const { return omega_c + detuning; }
};

/// Uniform rotation with angular velocity `omega` (as hbar*Omega) about a unit axis.
class RotationSpec {
 public:
  RotationSpec() = default;

  /// The axis is normalized; a zero axis is rejected.
  RotationSpec(std::array<double, 3> axis, double omega) : omega_(omega) {
    require(std::isfinite(omega) && omega >= 0.0, Errc::InvalidArgument, "omega must be >= 0");
    const double n = std::hypot(axis[0], axis[1], axis[2]);
    require(std::isfinite(n) && n > 0.0, Errc::InvalidArgument, "rotation axis must be nonzero");
    for (int i = 0; i < 3; ++i) axis_[i] = axis[i] / n;
  }

  static RotationSpec about_x(double omega) { return {{1, 0, 0}, omega}; }
  static RotationSpec about_y(double omega) { return {{0, 1, 0}, omega}; }
  static RotationSpec about_z(double omega) { return {{0, 0, 1}, omega}; }
  /// Axis in the XY plane at azimuth alpha from X.
  static RotationSpec in_plane(double alpha, double omega) {
    return {{std::cos(alpha), std::sin(alpha), 0.0}, omega};
  }
  /// Axis at polar angle `polar` from Z and azimuth `azimuth`.
  static RotationSpec spherical(double polar, double azimuth, double omega) {
    return {{std::sin(polar) * std::cos(azimuth), std::sin(polar) * std::sin(azimuth), std::cos(polar)},
            omega};
  }
  /// From the Cartesian components of the angular velocity vector.
  static RotationSpec from_components(double wx, double wy, double wz) {
    const double w = std::hypot(wx, wy, wz);
    if (w == 0.0) return about_z(0.0);
    return {{wx, wy, wz}, w};
  }

  const std::array<double, 3>& axis() const noexcept { return axis_; }
  double omega() const noexcept { return omega_; }
  double omega_x() const noexcept { return omega_ * axis_[0]; }
  double omega_y() const noexcept { return omega_ * axis_[1]; }
  double omega_z() const noexcept { return omega_ * axis_[2]; }
  double omega_xy() const noexcept { return std::hypot(omega_x(), omega_y()); }
  // Conjugate partners of L+- = (Lx +- i Ly)/sqrt2, with conj(omega_minus) = omega_plus.
  cplx omega_plus() const { return cplx(omega_x(), -omega_y()) / std::sqrt(2.0); }
  cplx omega_minus() const { return cplx(omega_x(), omega_y()) / std::sqrt(2.0); }

  bool is_planar() const noexcept { return std::abs(omega_z()) <= 1e-12 * omega_; }

 private:
  std::array<double, 3> axis_{0.0, 0.0, 1.0};
  double omega_ = 0.0;
};

struct EnsembleSpec {
  int n_atoms = 1;
  void validate() const { require(n_atoms >= 1, Errc::InvalidArgument, "n_atoms must be >= 1"); }
};

namespace detail {

inline void require_planar(const RotationSpec& rot) {
  require(rot.is_planar(), Errc::NonPlanarAxis,
          "rotation axis has a Z component (omega_z = " + std::to_string(rot.omega_z()) + ")");
}

inline void require_planar_rotation(const RotationSpec& rot) {
  require(rot.omega_xy() > 0.0, Errc::ZeroPlanarRotation,
          "in-plane angular velocity is zero; use the non-rotating builder");
}

inline void require_rotation(const RotationSpec& rot) {
  require(rot.omega() > 0.0, Errc::ZeroTotalRotation,
          "angular velocity is zero; use build_nonrotating");
}

}  // namespace detail

/// Lab-basis ensemble matrix of H_RF - Omega.L in the single-excitation space.
///
/// Basis: [g1, then for each atom a: e_a(m=0), e_a(m=+1), e_a(m=-1)], dimension
/// 3N+1. Each atom carries the block
///     [ 0     -W-   -W+ ]
///     [ -W+   -Wz    0  ]
///     [ -W-    0    +Wz ]
/// on top of the excitation energy, and couples to the photon through m=0 with g.
/// Valid for every axis including Omega = 0, which makes it the reference against
/// which all reduced forms are checked.
inline HermitianMatrix build_ensemble_lab(const CavitySpec& cavity, const RotationSpec& rot,
                                          const EnsembleSpec& ens) {
  cavity.validate();
  ens.validate();
  std::vector<BasisState> labels{BasisState::ground_one_photon()};
  for (int a = 0; a < ens.n_atoms; ++a) {
    labels.push_back(BasisState::atom_excited(0, a));
    labels.push_back(BasisState::atom_excited(+1, a));
    labels.push_back(BasisState::atom_excited(-1, a));
  }
  HermitianMatrix h(std::move(labels));
  h.set_diagonal(0, cavity.omega_c);
  const cplx wm = rot.omega_minus();
  for (int a = 0; a < ens.n_atoms; ++a) {
    const std::size_t m0 = 1 + 3 * static_cast<std::size_t>(a);
    const std::size_t mp = m0 + 1;
    const std::size_t mm = m0 + 2;
    h.set_diagonal(m0, cavity.excited());
    h.set_diagonal(mp, cavity.excited() - rot.omega_z());
    h.set_diagonal(mm, cavity.excited() + rot.omega_z());
    if (cavity.g != 0.0) h.set_coupling(0, m0, cavity.g);
    // (m0, mp) = -W-, (m0, mm) = -W+ = -conj(W-); mirrors follow.
    if (wm != cplx(0.0)) {
      h.set_coupling(m0, mp, -wm);
      h.set_coupling(m0, mm, -std::conj(wm));
    }
  }
  return h;
}

/// One atom, any rotation axis, lab basis [g1, e(m=0), e(m=+1), e(m=-1)].
inline HermitianMatrix build_single_atom_lab(const CavitySpec& cavity, const RotationSpec& rot) {
  return build_ensemble_lab(cavity, rot, {1});
}

/// The 4x4 single-atom matrix for an axis in the XY plane.
inline HermitianMatrix build_single_atom_xy(const CavitySpec& cavity, const RotationSpec& rot) {
  detail::require_planar(rot);
  return build_single_atom_lab(cavity, rot);
}

/// Coefficients of the entangled dark state on (e(m=+1), e(m=-1)):
/// (W+/W, -W-/W).
inline std::array<cplx, 2> dark_state_xy(const RotationSpec& rot) {
  detail::require_planar(rot);
  detail::require_planar_rotation(rot);
  const double w = rot.omega_xy();
  return {rot.omega_plus() / w, -rot.omega_minus() / w};
}

/// Columns [g1, psi+, psi-, psi0] expressed in the lab basis of build_single_atom_xy.
inline CMatrix xy_reduction_basis(const RotationSpec& rot) {
  detail::require_planar(rot);
  detail::require_planar_rotation(rot);
  const double w = rot.omega_xy();
  const double s = 1.0 / std::sqrt(2.0);
  const cplx chi_p = rot.omega_plus() / w;   // chi = (W+ e(+1) + W- e(-1))/W
  const cplx chi_m = rot.omega_minus() / w;
  CMatrix q = CMatrix::Zero(4, 4);
  q(0, 0) = 1.0;
  q(1, 1) = s;
  q(2, 1) = -s * chi_p;
  q(3, 1) = -s * chi_m;
  q(1, 2) = s;
  q(2, 2) = s * chi_p;
  q(3, 2) = s * chi_m;
  const auto d = dark_state_xy(rot);
  q(2, 3) = d[0];
  q(3, 3) = d[1];
  return q;
}

/// 3x3 matrix on [g1, psi+, psi-] after the dark state has been split off:
/// diag(wc, wc+W, wc-W) with g/sqrt2 couplings in the first row.
inline HermitianMatrix build_single_atom_reduced_xy(const CavitySpec& cavity, const RotationSpec& rot) {
  cavity.validate();
  detail::require_planar(rot);
  detail::require_planar_rotation(rot);
  const double w = rot.omega();
  HermitianMatrix h({BasisState::ground_one_photon(), BasisState::psi_plus(0), BasisState::psi_minus(0)});
  h.set_diagonal(0, cavity.omega_c);
  h.set_diagonal(1, cavity.excited() + w);
  h.set_diagonal(2, cavity.excited() - w);
  const double gt = cavity.g / std::sqrt(2.0);
  if (gt != 0.0) {
    h.set_coupling(0, 1, gt);
    h.set_coupling(0, 2, gt);
  }
  return h;
}

/// Normalized eigenvector of build_single_atom_reduced_xy at energy wc that is
/// induced by the rotation: proportional to (W*sqrt2/g, -1, +1) on [g1, psi+, psi-].
inline CVector rotation_induced_polariton_xy(const CavitySpec& cavity, const RotationSpec& rot) {
  cavity.validate();
  detail::require_planar(rot);
  detail::require_planar_rotation(rot);
  require(cavity.g > 0.0, Errc::ZeroCoupling, "rotation-induced polariton needs g > 0");
  CVector v(3);
  v << rot.omega() * std::sqrt(2.0) / cavity.g, -1.0, 1.0;
  return v / v.norm();
}

/// |photon amplitude|^2 of the rotation-induced polariton: W^2 / (W^2 + g^2).
inline double rotation_induced_photonic_weight(const CavitySpec& cavity, const RotationSpec& rot) {
  return std::norm(rotation_induced_polariton_xy(cavity, rot)(0));
}

/// 4x4 single-atom matrix for a general axis on [g1, psi+, psi-, psi0], the
/// eigenbasis of the excited-state block (energies wc+W, wc-W, wc).
inline HermitianMatrix build_single_atom_general(const CavitySpec& cavity, const RotationSpec& rot) {
  cavity.validate();
  detail::require_rotation(rot);
  const double w = rot.omega();
  const double gt = cavity.g / std::sqrt(2.0);
  HermitianMatrix h({BasisState::ground_one_photon(), BasisState::psi_plus(0), BasisState::psi_minus(0),
                     BasisState::dark(0)});
  h.set_diagonal(0, cavity.omega_c);
  h.set_diagonal(1, cavity.excited() + w);
  h.set_diagonal(2, cavity.excited() - w);
  h.set_diagonal(3, cavity.excited());
  const double c_xy = gt * rot.omega_xy() / w;
  const double c_z = cavity.g * rot.omega_z() / w;
  if (c_xy != 0.0) {
    h.set_coupling(0, 1, c_xy);
    h.set_coupling(0, 2, c_xy);
  }
  if (c_z != 0.0) h.set_coupling(0, 3, c_z);
  return h;
}

/// N-atom arrowhead for an axis in the XY plane: per atom the pair
/// (wc+W, wc-W) with couplings g/sqrt2. Dimension 2N+1 (entangled dark states removed).
inline ArrowheadMatrix build_ensemble_xy(const CavitySpec& cavity, const RotationSpec& rot,
                                         const EnsembleSpec& ens) {
  cavity.validate();
  ens.validate();
  detail::require_rotation(rot);
  detail::require_planar(rot);
  const double w = rot.omega();
  const double gt = cavity.g / std::sqrt(2.0);
  ArrowheadMatrix a;
  a.head = cavity.omega_c;
  a.labels.push_back(BasisState::ground_one_photon());
  for (int k = 0; k < ens.n_atoms; ++k) {
    a.shaft.push_back(cavity.excited() + w);
    a.couplings.emplace_back(gt);
    a.labels.push_back(BasisState::psi_plus(k));
    a.shaft.push_back(cavity.excited() - w);
    a.couplings.emplace_back(gt);
    a.labels.push_back(BasisState::psi_minus(k));
  }
  return a;
}

/// N-atom arrowhead for a general axis: per atom the trio (wc+W, wc-W, wc) with
/// couplings (g~ Wxy/W, g~ Wxy/W, g Wz/W), g~ = g/sqrt2. Dimension 3N+1.
inline ArrowheadMatrix build_ensemble_general(const CavitySpec& cavity, const RotationSpec& rot,
                                              const EnsembleSpec& ens) {
  cavity.validate();
  ens.validate();
  detail::require_rotation(rot);
  const double w = rot.omega();
  const double c_xy = cavity.g / std::sqrt(2.0) * rot.omega_xy() / w;
  const double c_z = cavity.g * rot.omega_z() / w;
  ArrowheadMatrix a;
  a.head = cavity.omega_c;
  a.labels.push_back(BasisState::ground_one_photon());
  for (int k = 0; k < ens.n_atoms; ++k) {
    a.shaft.push_back(cavity.excited() + w);
    a.couplings.emplace_back(c_xy);
    a.labels.push_back(BasisState::psi_plus(k));
    a.shaft.push_back(cavity.excited() - w);
    a.couplings.emplace_back(c_xy);
    a.labels.push_back(BasisState::psi_minus(k));
    a.shaft.push_back(cavity.excited());
    a.couplings.emplace_back(c_z);
    a.labels.push_back(BasisState::dark(k));
  }
  return a;
}

/// Planar axes use the 2N+1 form, every other axis the 3N+1 form.
inline ArrowheadMatrix build_ensemble(const CavitySpec& cavity, const RotationSpec& rot,
                                      const EnsembleSpec& ens) {
  detail::require_rotation(rot);
  return rot.is_planar() ? build_ensemble_xy(cavity, rot, ens) : build_ensemble_general(cavity, rot, ens);
}

/// Omega = 0: photon coupled with g to each atom's m=0 state (dimension N+1).
/// The m=+-1 states are uncoupled and omitted.
inline ArrowheadMatrix build_nonrotating(const CavitySpec& cavity, const EnsembleSpec& ens) {
  cavity.validate();
  ens.validate();
  ArrowheadMatrix a;
  a.head = cavity.omega_c;
  a.labels.push_back(BasisState::ground_one_photon());
  for (int k = 0; k < ens.n_atoms; ++k) {
    a.shaft.push_back(cavity.excited());
    a.couplings.emplace_back(cavity.g);
    a.labels.push_back(BasisState::atom_excited(0, k));
  }
  return a;
}

/// The N per-atom entangled dark states as columns in the basis of build_ensemble_lab.
inline CMatrix entangled_dark_states(const RotationSpec& rot, const EnsembleSpec& ens) {
  ens.validate();
  const auto d = dark_state_xy(rot);
  const auto dim = static_cast<Eigen::Index>(3 * ens.n_atoms + 1);
  CMatrix out = CMatrix::Zero(dim, ens.n_atoms);
  for (int a = 0; a < ens.n_atoms; ++a) {
    out(2 + 3 * a, a) = d[0];
    out(3 + 3 * a, a) = d[1];
  }
  return out;
}

}  // namespace rotcav
