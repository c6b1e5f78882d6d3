#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "rotcav/atom_cavity.hpp"
#include "rotcav/core.hpp"

namespace rotcav {

enum class AxisCase { XY, General };

/// Closed-form spectrum of the N-atom ensemble.
///
/// `dark_levels` are the collective dark states (deflated shaft values of the
/// arrowhead form); `entangled` are the per-atom dark states split off before the
/// arrowhead is assembled (planar axis only). Together with the branches they
/// account for all 3N+1 single-excitation states.
struct SpectrumPrediction {
  std::vector<double> branch_energies;  // ascending
  std::vector<Level> dark_levels;
  std::vector<Level> entangled;

  std::size_t state_count() const {
    std::size_t n = branch_energies.size();
    for (const auto& l : dark_levels) n += l.multiplicity;
    for (const auto& l : entangled) n += l.multiplicity;
    return n;
  }

  std::vector<double> multiset() const {
    std::vector<double> out = branch_energies;
    for (const auto* levels : {&dark_levels, &entangled})
      for (const auto& l : *levels) out.insert(out.end(), l.multiplicity, l.energy);
    std::sort(out.begin(), out.end());
    return out;
  }
};

struct DarkCensus {
  std::vector<Level> collective;
  std::vector<Level> entangled;
};

namespace detail {

inline void require_resonant(const CavitySpec& cavity) {
  cavity.validate();
  require(cavity.detuning == 0.0, Errc::InvalidArgument,
          "closed-form spectra assume the atomic excitation is resonant with the cavity");
}

inline void push_level(std::vector<Level>& out, double energy, int count) {
  if (count > 0) out.push_back({energy, static_cast<std::size_t>(count)});
}

}  // namespace detail

inline DarkCensus dark_state_census(const CavitySpec& cavity, const RotationSpec& rot, int n, AxisCase c) {
  detail::require_resonant(cavity);
  require(n >= 1, Errc::InvalidArgument, "n must be >= 1");
  const double wc = cavity.omega_c;
  const double w = rot.omega();
  DarkCensus out;
  if (c == AxisCase::XY) {
    detail::push_level(out.collective, wc - w, n - 1);
    detail::push_level(out.collective, wc + w, n - 1);
    detail::push_level(out.entangled, wc, n);
  } else {
    // The per-atom state at wc couples to the photon through g*Wz/W here, so it
    // stays in the arrowhead and only its collective remainder is dark.
    detail::push_level(out.collective, wc - w, n - 1);
    detail::push_level(out.collective, wc, n - 1);
    detail::push_level(out.collective, wc + w, n - 1);
  }
  return out;
}

/// Axis in the XY plane: wc +- sqrt(W^2 + N g^2) and wc.
inline SpectrumPrediction spectrum_xy(const CavitySpec& cavity, const RotationSpec& rot, int n) {
  detail::require_resonant(cavity);
  detail::require_planar(rot);
  require(n >= 1, Errc::InvalidArgument, "n must be >= 1");
  const double wc = cavity.omega_c;
  const double r = std::hypot(rot.omega(), std::sqrt(static_cast<double>(n)) * cavity.g);
  SpectrumPrediction p;
  p.branch_energies = {wc - r, wc, wc + r};
  const auto census = dark_state_census(cavity, rot, n, AxisCase::XY);
  p.dark_levels = census.collective;
  p.entangled = census.entangled;
  return p;
}

/// General axis: the four roots
///   wc +- (1/sqrt2) { (W^2 + N g^2) +- sqrt[(Wxy^2 - Wz^2 + N g^2)^2 + 4 Wxy^2 Wz^2] }^(1/2).
///
/// With A and B the outer and inner radicands, A^2 - B^2 = 4 Wz^2 N g^2, so the
/// small pair is evaluated as sqrt(2 Wz^2 N g^2 / (A + B)) to avoid cancellation.
inline SpectrumPrediction spectrum_general(const CavitySpec& cavity, const RotationSpec& rot, int n) {
  detail::require_resonant(cavity);
  detail::require_rotation(rot);
  require(n >= 1, Errc::InvalidArgument, "n must be >= 1");
  const double wc = cavity.omega_c;
  const double a2 = rot.omega_xy() * rot.omega_xy();
  const double b2 = rot.omega_z() * rot.omega_z();
  const double c2 = static_cast<double>(n) * cavity.g * cavity.g;
  const double big_a = a2 + b2 + c2;
  const double big_b = std::hypot(a2 - b2 + c2, 2.0 * rot.omega_xy() * rot.omega_z());
  const double outer = std::sqrt(0.5 * (big_a + big_b));
  const double inner = big_a + big_b > 0.0 ? std::sqrt(2.0 * b2 * c2 / (big_a + big_b)) : 0.0;
  SpectrumPrediction p;
  p.branch_energies = {wc - outer, wc - inner, wc + inner, wc + outer};
  std::sort(p.branch_energies.begin(), p.branch_energies.end());
  p.dark_levels = dark_state_census(cavity, rot, n, AxisCase::General).collective;
  return p;
}

/// Omega = 0: wc +- sqrt(N) g, with N-1 collective dark states and the 2N
/// uncoupled m = +-1 states, all at wc.
inline SpectrumPrediction spectrum_nonrotating(const CavitySpec& cavity, int n) {
  detail::require_resonant(cavity);
  require(n >= 1, Errc::InvalidArgument, "n must be >= 1");
  const double wc = cavity.omega_c;
  const double r = std::sqrt(static_cast<double>(n)) * cavity.g;
  SpectrumPrediction p;
  p.branch_energies = {wc - r, wc + r};
  detail::push_level(p.dark_levels, wc, n - 1);
  detail::push_level(p.entangled, wc, 2 * n);
  return p;
}

/// Dispatch on the rotation: none, planar, or general.
inline SpectrumPrediction predict_spectrum(const CavitySpec& cavity, const RotationSpec& rot, int n) {
  if (rot.omega() == 0.0) return spectrum_nonrotating(cavity, n);
  if (rot.is_planar()) return spectrum_xy(cavity, rot, n);
  return spectrum_general(cavity, rot, n);
}

}  // namespace rotcav
