#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rotcav/core.hpp"
#include "rotcav/molecule.hpp"

namespace rotcav {

/// Uniform radial box; the wavefunction vanishes at r_min and r_max, so the
/// n_points grid points are the interior nodes r_i = r_min + (i + 1) dr.
struct RadialGrid {
  double r_min = 0.5;
  double r_max = 10.0;
  std::size_t n_points = 256;
  double reduced_mass = 1.0;

  void validate() const {
    require(r_min > 0.0 && r_max > r_min, Errc::InvalidArgument, "radial grid must satisfy 0 < r_min < r_max");
    require(n_points >= 16, Errc::GridTooCoarse, "radial grid needs at least 16 points");
    require(reduced_mass > 0.0, Errc::InvalidArgument, "reduced mass must be > 0");
  }

  double dr() const { return (r_max - r_min) / static_cast<double>(n_points + 1); }
  double r(std::size_t i) const { return r_min + static_cast<double>(i + 1) * dr(); }
};

enum class Frame { Lab, Rotating };

inline std::string_view to_string(Frame f) { return f == Frame::Lab ? "lab" : "rotating"; }

inline constexpr std::size_t n_channels = 3;  // [Sigma 1_c, Pi+ 0_c, Pi- 0_c]

/// Radial amplitudes on the three electronic-cavity channels.
struct Wavepacket {
  RadialGrid grid;
  std::array<CVector, n_channels> channels;
  Frame frame = Frame::Rotating;
  double time = 0.0;

  static Wavepacket zero(const RadialGrid& grid, Frame frame = Frame::Rotating) {
    Wavepacket w{grid, {}, frame, 0.0};
    for (auto& c : w.channels) c = CVector::Zero(static_cast<Eigen::Index>(grid.n_points));
    return w;
  }

  double population(std::size_t c) const { return channels[c].squaredNorm() * grid.dr(); }
  double norm() const { return population(0) + population(1) + population(2); }

  /// Grid-major layout matching the assembled Hamiltonian: index 3 i + channel.
  CVector flatten() const {
    const std::size_t n = grid.n_points;
    CVector v(static_cast<Eigen::Index>(n_channels * n));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t c = 0; c < n_channels; ++c)
        v(static_cast<Eigen::Index>(n_channels * i + c)) = channels[c](static_cast<Eigen::Index>(i));
    return v;
  }

  void assign(const CVector& v) {
    const std::size_t n = grid.n_points;
    require(static_cast<std::size_t>(v.size()) == n_channels * n, Errc::InvalidArgument, "state size mismatch");
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t c = 0; c < n_channels; ++c)
        channels[c](static_cast<Eigen::Index>(i)) = v(static_cast<Eigen::Index>(n_channels * i + c));
  }

  /// <this|other> with the dr weight.
  cplx overlap(const Wavepacket& other) const {
    cplx s = 0.0;
    for (std::size_t c = 0; c < n_channels; ++c) s += channels[c].dot(other.channels[c]);
    return s * grid.dr();
  }
};

/// Normalized Gaussian exp(-(r - center)^2 / (2 width^2) + i k r) on one channel.
inline Wavepacket gaussian_wavepacket(const RadialGrid& grid, double center, double width, double momentum,
                                      std::size_t channel, Frame frame = Frame::Rotating) {
  grid.validate();
  require(width > 0.0, Errc::InvalidArgument, "wavepacket width must be > 0");
  require(channel < n_channels, Errc::InvalidArgument, "channel index must be 0, 1 or 2");
  Wavepacket w = Wavepacket::zero(grid, frame);
  for (std::size_t i = 0; i < grid.n_points; ++i) {
    const double x = (grid.r(i) - center) / width;
    w.channels[channel](static_cast<Eigen::Index>(i)) = std::exp(-0.5 * x * x) * std::polar(1.0, momentum * grid.r(i));
  }
  const double nrm = w.norm();
  require(nrm > 0.0, Errc::InvalidArgument, "wavepacket has no weight on the grid");
  w.channels[channel] /= std::sqrt(nrm);
  return w;
}

/// Angles held fixed during propagation and the angular momentum substituted
/// for the rotational operator.
struct FrozenAngleConfig {
  double theta = 0.0;
  double phi = 0.0;
  bool include_centrifugal = false;
  Eigen::Vector3d frozen_l = Eigen::Vector3d::Zero();

  void validate() const {
    require(theta >= 0.0 && theta <= pi, Errc::InvalidArgument, "theta must lie in [0, pi]");
    require(phi >= 0.0 && phi < 2.0 * pi, Errc::InvalidArgument, "phi must lie in [0, 2 pi)");
    require(frozen_l.allFinite(), Errc::InvalidArgument, "frozen angular momentum must be finite");
  }
};

/// Scalar angular term |l - mu r^2 W|^2 / (2 mu r^2) - mu r^2 W^2 / 2, written as
/// the literal square or in its expanded form l^2 / (2 mu r^2) - W.l.
inline double angular_term(double r, double mu, const RotationSpec& rot, const Eigen::Vector3d& l, bool expanded) {
  const Eigen::Vector3d w(rot.omega_x(), rot.omega_y(), rot.omega_z());
  const double mr2 = mu * r * r;
  if (expanded) return l.squaredNorm() / (2.0 * mr2) - w.dot(l);
  return (l - mr2 * w).squaredNorm() / (2.0 * mr2) - 0.5 * mr2 * w.squaredNorm();
}

struct AssembleOptions {
  double max_dr = std::numeric_limits<double>::infinity();
  bool expanded_centrifugal = true;  // false: evaluate the literal square
};

inline std::vector<BasisState> grid_labels(std::size_t n) {
  std::vector<BasisState> labels;
  labels.reserve(n_channels * n);
  for (std::size_t i = 0; i < n; ++i) {
    const int k = static_cast<int>(i);
    labels.push_back(BasisState::sigma_one_photon(k));
    labels.push_back(BasisState::pi_plus(k));
    labels.push_back(BasisState::pi_minus(k));
  }
  return labels;
}

/// Radial Hamiltonian with frozen angles: the three-point kinetic operator
/// -1/(2 mu) d^2/dr^2 on every channel plus the rotating electronic-cavity
/// matrix at each grid point. Grid-major ordering, index 3 i + channel.
inline HermitianMatrix assemble_hamiltonian_reduced(const DiatomicModel& model, const RotationSpec& rot,
                                                    const RadialGrid& grid, const FrozenAngleConfig& cfg,
                                                    AssembleOptions opt = {}) {
  model.validate();
  grid.validate();
  cfg.validate();
  require(grid.reduced_mass == model.reduced_mass, Errc::InvalidArgument,
          "grid and model reduced masses differ");
  require(grid.r_min >= model.r_min && grid.r_max <= model.r_max, Errc::DomainError,
          "radial grid leaves the model domain");
  require(grid.dr() <= opt.max_dr, Errc::GridTooCoarse,
          "grid spacing " + std::to_string(grid.dr()) + " exceeds the resolution bound " + std::to_string(opt.max_dr));

  const std::size_t n = grid.n_points;
  const auto dim = static_cast<Eigen::Index>(n_channels * n);
  CMatrix h = CMatrix::Zero(dim, dim);
  const double dr = grid.dr();
  const double t_diag = 1.0 / (grid.reduced_mass * dr * dr);
  const double t_off = -0.5 / (grid.reduced_mass * dr * dr);
  for (std::size_t i = 0; i < n; ++i) {
    const double r = grid.r(i);
    const CMatrix block = build_sigma_pi_rotating(model, rot, r, cfg.theta, cfg.phi).entries();
    const double ang = cfg.include_centrifugal
                           ? angular_term(r, grid.reduced_mass, rot, cfg.frozen_l, opt.expanded_centrifugal)
                           : 0.0;
    const auto base = static_cast<Eigen::Index>(n_channels * i);
    h.block(base, base, 3, 3) = block;
    for (Eigen::Index c = 0; c < 3; ++c) {
      h(base + c, base + c) += t_diag + ang;
      if (i + 1 < n) {
        h(base + c, base + 3 + c) = t_off;
        h(base + 3 + c, base + c) = t_off;
      }
    }
  }
  return HermitianMatrix::from_dense(std::move(h), grid_labels(n));
}

struct StepObservables {
  double t = 0.0;
  double norm = 0.0;
  double energy = 0.0;
  double fidelity = 0.0;  // |<psi(0)|psi(t)>|
  std::array<double, n_channels> population{};
  std::array<double, n_channels> r_mean{};  // NaN on an empty channel
};

struct PropagationOptions {
  double max_norm_drift = 1e-10;
  // Largest allowed dt * spectral radius; infinite by default because the
  // eigenbasis propagator is exact for any step.
  double max_step_phase = std::numeric_limits<double>::infinity();
};

struct Trajectory {
  std::vector<StepObservables> steps;  // n_steps + 1 entries, the first at t0
  Wavepacket final_state;
  double norm_drift = 0.0;
  double energy_drift = 0.0;  // relative to max(|E0|, 1)
  double dt = 0.0;
  double spectral_radius = 0.0;
};

/// exp(-i H t) through the eigendecomposition of H, computed once.
class SpectralPropagator {
 public:
  SpectralPropagator(const HermitianMatrix& h, const RadialGrid& grid) : grid_(grid) {
    grid.validate();
    require(h.dim() == n_channels * grid.n_points, Errc::InvalidArgument, "Hamiltonian does not match the grid");
    require(h.hermiticity_defect() == 0.0, Errc::NonHermitianInput, "propagator requires an exactly Hermitian matrix");
    real_ = h.is_real();
    if (real_) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h.entries().real());
      require(es.info() == Eigen::Success, Errc::ConvergenceFailure, "eigendecomposition failed");
      values_ = es.eigenvalues();
      vr_ = es.eigenvectors();
    } else {
      Eigen::SelfAdjointEigenSolver<CMatrix> es(h.entries());
      require(es.info() == Eigen::Success, Errc::ConvergenceFailure, "eigendecomposition failed");
      values_ = es.eigenvalues();
      vc_ = es.eigenvectors();
    }
    radius_ = values_.cwiseAbs().maxCoeff();
  }

  const RVector& eigenvalues() const { return values_; }
  double spectral_radius() const { return radius_; }
  const RadialGrid& grid() const { return grid_; }

  CVector to_eigenbasis(const CVector& psi) const {
    if (real_) return vr_.transpose() * psi;
    return vc_.adjoint() * psi;
  }
  CVector from_eigenbasis(const CVector& c) const {
    if (real_) return vr_ * c;
    return vc_ * c;
  }

  /// The state evolved by t in its own frame.
  Wavepacket evolve(const Wavepacket& psi, double t) const {
    check(psi);
    CVector c = to_eigenbasis(psi.flatten());
    for (Eigen::Index k = 0; k < c.size(); ++k) c(k) *= std::polar(1.0, -values_(k) * t);
    Wavepacket out = psi;
    out.assign(from_eigenbasis(c));
    out.time = psi.time + t;
    return out;
  }

  double energy(const Wavepacket& psi) const {
    const CVector c = to_eigenbasis(psi.flatten());
    return (values_.array() * c.array().abs2()).sum() * grid_.dr();
  }

  /// n_steps steps of size dt with observables recorded at every step.
  Trajectory propagate(const Wavepacket& psi0, double dt, std::size_t n_steps, PropagationOptions opt = {}) const {
    check(psi0);
    require(std::isfinite(dt) && dt > 0.0, Errc::InvalidArgument, "dt must be > 0");
    require(std::abs(psi0.norm() - 1.0) <= 1e-10, Errc::InvalidArgument, "initial state must be normalized");
    require(dt * radius_ <= opt.max_step_phase, Errc::StabilityViolation,
            "dt * spectral radius = " + std::to_string(dt * radius_) + " exceeds the step bound " +
                std::to_string(opt.max_step_phase));

    const double dr = grid_.dr();
    const CVector c0 = to_eigenbasis(psi0.flatten());
    CVector phase(c0.size());
    for (Eigen::Index k = 0; k < c0.size(); ++k) phase(k) = std::polar(1.0, -values_(k) * dt);

    Trajectory tr;
    tr.dt = dt;
    tr.spectral_radius = radius_;
    tr.steps.reserve(n_steps + 1);
    Wavepacket psi = psi0;
    CVector c = c0;
    const double e0 = (values_.array() * c0.array().abs2()).sum() * dr;
    for (std::size_t step = 0; step <= n_steps; ++step) {
      if (step > 0) {
        c = c.cwiseProduct(phase);
        psi.assign(from_eigenbasis(c));
        psi.time = psi0.time + static_cast<double>(step) * dt;
      }
      StepObservables o;
      o.t = psi.time;
      o.energy = (values_.array() * c.array().abs2()).sum() * dr;
      o.fidelity = std::abs(c0.dot(c)) * dr;
      for (std::size_t ch = 0; ch < n_channels; ++ch) {
        o.population[ch] = psi.population(ch);
        double rw = 0.0;
        for (std::size_t i = 0; i < grid_.n_points; ++i)
          rw += grid_.r(i) * std::norm(psi.channels[ch](static_cast<Eigen::Index>(i)));
        o.r_mean[ch] = o.population[ch] > 0.0 ? rw * dr / o.population[ch] : std::numeric_limits<double>::quiet_NaN();
      }
      o.norm = o.population[0] + o.population[1] + o.population[2];
      tr.norm_drift = std::max(tr.norm_drift, std::abs(o.norm - psi0.norm()));
      tr.energy_drift = std::max(tr.energy_drift, std::abs(o.energy - e0) / std::max(std::abs(e0), 1.0));
      tr.steps.push_back(o);
      require(tr.norm_drift <= opt.max_norm_drift, Errc::StabilityViolation,
              "norm drift " + std::to_string(tr.norm_drift) + " at t = " + std::to_string(o.t) +
                  " exceeds " + std::to_string(opt.max_norm_drift));
    }
    tr.final_state = psi;
    return tr;
  }

 private:
  void check(const Wavepacket& psi) const {
    require(psi.grid.n_points == grid_.n_points && psi.grid.r_min == grid_.r_min && psi.grid.r_max == grid_.r_max,
            Errc::InvalidArgument, "wavepacket grid does not match the propagator");
    require(psi.frame == Frame::Rotating, Errc::FrameMismatch, "propagation runs in the rotating frame");
  }

  RadialGrid grid_;
  bool real_ = true;
  RVector values_;
  Eigen::MatrixXd vr_;
  CMatrix vc_;
  double radius_ = 0.0;
};

inline Trajectory propagate(const HermitianMatrix& h, const Wavepacket& psi0, double dt, std::size_t n_steps,
                            PropagationOptions opt = {}) {
  return SpectralPropagator(h, psi0.grid).propagate(psi0, dt, n_steps, opt);
}

enum class FrameDirection { ToLab, ToRotating };

/// Diagonal phases of exp(-i t W.L) on [Sigma, Pi+, Pi-] for the frozen
/// orientation: the rotated Pi+- carry W.L = +-W.(R z).
inline std::array<cplx, n_channels> frame_phases(const RotationSpec& rot, const FrozenAngleConfig& cfg, double t) {
  const Eigen::Vector3d w(rot.omega_x(), rot.omega_y(), rot.omega_z());
  const double a = w.dot(rotation_matrix(cfg.theta, cfg.phi).col(2));
  return {cplx(1.0), std::polar(1.0, -a * t), std::polar(1.0, a * t)};
}

inline Wavepacket frame_transform(const Wavepacket& psi, const RotationSpec& rot, const FrozenAngleConfig& cfg,
                                  double t, FrameDirection dir) {
  cfg.validate();
  const Frame from = dir == FrameDirection::ToLab ? Frame::Rotating : Frame::Lab;
  require(psi.frame == from, Errc::FrameMismatch,
          std::string("wavepacket is in the ") + std::string(to_string(psi.frame)) + " frame");
  auto ph = frame_phases(rot, cfg, t);
  if (dir == FrameDirection::ToRotating)
    for (auto& p : ph) p = std::conj(p);
  Wavepacket out = psi;
  for (std::size_t c = 0; c < n_channels; ++c) out.channels[c] *= ph[c];
  out.frame = dir == FrameDirection::ToLab ? Frame::Lab : Frame::Rotating;
  return out;
}

}  // namespace rotcav
