#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "rotcav/atom_cavity.hpp"
#include "rotcav/core.hpp"

namespace rotcav {

/// Natural cubic spline through strictly increasing abscissae (at least 4 points).
class CubicSpline {
 public:
  CubicSpline() = default;

  CubicSpline(std::vector<double> x, std::vector<double> y) : x_(std::move(x)), y_(std::move(y)) {
    require(x_.size() == y_.size(), Errc::InvalidArgument, "spline: x and y lengths differ");
    require(x_.size() >= 4, Errc::InvalidArgument, "spline: need at least 4 points");
    for (std::size_t i = 0; i < x_.size(); ++i)
      require(std::isfinite(x_[i]) && std::isfinite(y_[i]), Errc::InvalidArgument, "spline: non-finite data");
    for (std::size_t i = 1; i < x_.size(); ++i)
      require(x_[i] > x_[i - 1], Errc::InvalidArgument, "spline: abscissae must be strictly increasing");
    solve_second_derivatives();
  }

  double lo() const { return x_.front(); }
  double hi() const { return x_.back(); }

  double operator()(double t) const {
    require(t >= lo() && t <= hi(), Errc::DomainError,
            "spline evaluated at " + std::to_string(t) + " outside [" + std::to_string(lo()) + ", " +
                std::to_string(hi()) + "]");
    auto it = std::upper_bound(x_.begin(), x_.end(), t);
    std::size_t k = it == x_.begin() ? 0 : static_cast<std::size_t>(it - x_.begin()) - 1;
    k = std::min(k, x_.size() - 2);
    const double h = x_[k + 1] - x_[k];
    const double a = (x_[k + 1] - t) / h;
    const double b = (t - x_[k]) / h;
    return a * y_[k] + b * y_[k + 1] + ((a * a * a - a) * m_[k] + (b * b * b - b) * m_[k + 1]) * h * h / 6.0;
  }

 private:
  void solve_second_derivatives() {
    const std::size_t n = x_.size();
    m_.assign(n, 0.0);
    std::vector<double> c(n, 0.0), d(n, 0.0);
    // Thomas algorithm on the interior equations; m_0 = m_{n-1} = 0.
    for (std::size_t i = 1; i + 1 < n; ++i) {
      const double h0 = x_[i] - x_[i - 1];
      const double h1 = x_[i + 1] - x_[i];
      const double diag = 2.0 * (h0 + h1) - h0 * c[i - 1];
      const double rhs = 6.0 * ((y_[i + 1] - y_[i]) / h1 - (y_[i] - y_[i - 1]) / h0) - h0 * d[i - 1];
      c[i] = h1 / diag;
      d[i] = rhs / diag;
    }
    for (std::size_t i = n - 2; i >= 1; --i) {
      m_[i] = d[i] - c[i] * m_[i + 1];
      if (i == 1) break;
    }
  }

  std::vector<double> x_, y_, m_;
};

/// Reads a two-column (r, value) text table; `#` starts a comment.
inline CubicSpline read_two_column_table(const std::string& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), Errc::InvalidArgument, "cannot open table " + path);
  std::vector<double> xs, ys;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ss(line);
    double x, y;
    if (!(ss >> x)) continue;
    require(static_cast<bool>(ss >> y), Errc::InvalidArgument,
            path + ":" + std::to_string(lineno) + ": expected two columns");
    std::string rest;
    require(!(ss >> rest), Errc::InvalidArgument, path + ":" + std::to_string(lineno) + ": extra columns");
    xs.push_back(x);
    ys.push_back(y);
  }
  return CubicSpline(std::move(xs), std::move(ys));
}

/// Potential energy curve V(r).
class PotentialCurve {
 public:
  struct Harmonic {
    double k, r0, offset;
  };
  struct Morse {
    double depth, a, r0, offset;
  };
  struct Tabulated {
    CubicSpline spline;
  };

  static PotentialCurve harmonic(double k, double r0, double offset = 0.0) {
    return PotentialCurve(Harmonic{k, r0, offset});
  }
  static PotentialCurve morse(double depth, double a, double r0, double offset = 0.0) {
    return PotentialCurve(Morse{depth, a, r0, offset});
  }
  static PotentialCurve constant(double value) { return harmonic(0.0, 0.0, value); }
  static PotentialCurve tabulated(CubicSpline spline) { return PotentialCurve(Tabulated{std::move(spline)}); }

  double operator()(double r) const {
    return std::visit(
        [r](const auto& c) -> double {
          using T = std::decay_t<decltype(c)>;
          if constexpr (std::is_same_v<T, Harmonic>) {
            return 0.5 * c.k * (r - c.r0) * (r - c.r0) + c.offset;
          } else if constexpr (std::is_same_v<T, Morse>) {
            const double e = 1.0 - std::exp(-c.a * (r - c.r0));
            return c.depth * e * e + c.offset;
          } else {
            return c.spline(r);
          }
        },
        kind_);
  }

  /// Range of a tabulated curve; analytic curves are defined everywhere.
  std::optional<std::pair<double, double>> table_range() const {
    if (const auto* t = std::get_if<Tabulated>(&kind_)) return std::pair{t->spline.lo(), t->spline.hi()};
    return std::nullopt;
  }

 private:
  explicit PotentialCurve(std::variant<Harmonic, Morse, Tabulated> k) : kind_(std::move(k)) {}
  std::variant<Harmonic, Morse, Tabulated> kind_;
};

/// Transition dipole d(r) between Sigma and Pi_x.
class TransitionDipole {
 public:
  static TransitionDipole constant(double d) { return TransitionDipole(d); }
  static TransitionDipole tabulated(CubicSpline s) { return TransitionDipole(std::move(s)); }

  double operator()(double r) const {
    if (const auto* d = std::get_if<double>(&kind_)) return *d;
    return std::get<CubicSpline>(kind_)(r);
  }

  std::optional<std::pair<double, double>> table_range() const {
    if (const auto* s = std::get_if<CubicSpline>(&kind_)) return std::pair{s->lo(), s->hi()};
    return std::nullopt;
  }

 private:
  explicit TransitionDipole(std::variant<double, CubicSpline> k) : kind_(std::move(k)) {}
  std::variant<double, CubicSpline> kind_;
};

/// Homonuclear diatomic with a Sigma ground state and a degenerate Pi excited state.
struct DiatomicModel {
  PotentialCurve v_sigma = PotentialCurve::constant(0.0);
  PotentialCurve v_pi = PotentialCurve::constant(0.0);
  TransitionDipole dipole = TransitionDipole::constant(1.0);
  double g0 = 0.0;
  CavitySpec cavity;
  double reduced_mass = 1.0;
  double r_min = 0.1;
  double r_max = 10.0;

  void validate() const {
    cavity.validate();
    require(r_min > 0.0 && r_max > r_min, Errc::InvalidArgument, "molecule r-domain must satisfy 0 < r_min < r_max");
    require(reduced_mass > 0.0, Errc::InvalidArgument, "reduced mass must be > 0");
    require(std::isfinite(g0), Errc::InvalidArgument, "g0 must be finite");
    const auto same = [this](std::optional<std::pair<double, double>> range, const char* what) {
      if (!range) return;
      const double tol = 1e-12 * std::max(1.0, r_max);
      require(std::abs(range->first - r_min) <= tol && std::abs(range->second - r_max) <= tol,
              Errc::InvalidArgument, std::string(what) + " table range does not coincide with the model r-domain");
    };
    same(v_sigma.table_range(), "V_Sigma");
    same(v_pi.table_range(), "V_Pi");
    same(dipole.table_range(), "dipole");
  }

  void check_domain(double r) const {
    require(r >= r_min && r <= r_max, Errc::DomainError,
            "r = " + std::to_string(r) + " outside [" + std::to_string(r_min) + ", " + std::to_string(r_max) + "]");
  }

  double coupling(double r) const { return g0 * dipole(r); }
};

inline std::vector<BasisState> sigma_pi_labels() {
  return {BasisState::sigma_one_photon(), BasisState::pi_plus(), BasisState::pi_minus()};
}

/// Non-rotating cavity, basis [Sigma 1_c, Pi+ 0_c, Pi- 0_c] with Pi+- = (Pi_x +- Pi_y)/sqrt2:
/// diag(V_Sigma + wc, V_Pi, V_Pi), couplings g(r) sin(theta)/sqrt2 to both Pi states.
inline HermitianMatrix build_sigma_pi_norot(const DiatomicModel& model, double r, double theta) {
  model.check_domain(r);
  HermitianMatrix h(sigma_pi_labels());
  h.set_diagonal(0, model.v_sigma(r) + model.cavity.omega_c);
  const double vpi = model.v_pi(r);
  h.set_diagonal(1, vpi);
  h.set_diagonal(2, vpi);
  const double c = model.coupling(r) * std::sin(theta) / std::sqrt(2.0);
  if (c != 0.0) {
    h.set_coupling(0, 1, c);
    h.set_coupling(0, 2, c);
  }
  return h;
}

/// f(phi) = sqrt2 (W+ e^{i phi} + W- e^{-i phi}) before discarding the imaginary part.
inline cplx azimuthal_shift_complex(const RotationSpec& rot, double phi) {
  const cplx e = std::polar(1.0, phi);
  return std::sqrt(2.0) * (rot.omega_plus() * e + rot.omega_minus() * std::conj(e));
}

/// f(phi), equal to 2 (Wx cos phi + Wy sin phi).
inline double azimuthal_shift(const RotationSpec& rot, double phi) {
  const cplx f = azimuthal_shift_complex(rot, phi);
  require(std::abs(f.imag()) <= 1e-14 * std::max(1.0, rot.omega()), Errc::InvalidArgument,
          "f(phi) acquired an imaginary part");
  return f.real();
}

/// Rotating cavity: the non-rotating matrix with the Pi diagonals shifted by
/// -+ (f(phi) sin(theta) - cos(theta) Wz).
inline HermitianMatrix build_sigma_pi_rotating(const DiatomicModel& model, const RotationSpec& rot, double r,
                                               double theta, double phi) {
  HermitianMatrix h = build_sigma_pi_norot(model, r, theta);
  const double shift = -azimuthal_shift(rot, phi) * std::sin(theta) + std::cos(theta) * rot.omega_z();
  h.add_diagonal(1, shift);
  h.add_diagonal(2, -shift);
  return h;
}

/// Orientation of the molecular axis: rotation by theta about Y, then phi about Z.
inline Eigen::Matrix3d rotation_matrix(double theta, double phi) {
  const double ct = std::cos(theta), st = std::sin(theta);
  const double cp = std::cos(phi), sp = std::sin(phi);
  Eigen::Matrix3d r;
  r << cp * ct, -sp, -cp * st,
       sp * ct, cp, -sp * st,
       st, 0.0, ct;
  return r;
}

/// -W.L between the rotated Pi+- states computed from the vector-operator rule
/// <U psi|L|U psi'> = R <psi|L|psi'>, with only <Pi+-|Lz|Pi+-> = +-1 nonzero
/// among the unrotated elements. Basis [Pi+, Pi-].
inline HermitianMatrix rotated_angular_momentum_oracle(const RotationSpec& rot, double theta, double phi) {
  const Eigen::Matrix3d r = rotation_matrix(theta, phi);
  const Eigen::Vector3d w(rot.omega_x(), rot.omega_y(), rot.omega_z());
  // unrotated <a|L|b> for a, b in {+, -}
  const Eigen::Vector3d lz_plus(0.0, 0.0, 1.0);
  const Eigen::Vector3d lz_minus(0.0, 0.0, -1.0);
  const Eigen::Vector3d zero = Eigen::Vector3d::Zero();
  const Eigen::Vector3d elements[2][2] = {{lz_plus, zero}, {zero, lz_minus}};
  HermitianMatrix h({BasisState::pi_plus(), BasisState::pi_minus()});
  for (int a = 0; a < 2; ++a) {
    h.set_diagonal(static_cast<std::size_t>(a), -w.dot(r * elements[a][a]));
  }
  const double off = -w.dot(r * elements[0][1]);
  if (off != 0.0) h.set_coupling(0, 1, off);
  return h;
}

/// Outcome of comparing the printed rotating-cavity Pi shifts against the
/// vector-operator construction over a (theta, phi) grid.
///
/// The shifts split into an axial part (driven by Wz) and a planar part (driven
/// by Wx, Wy); for each part the least-squares ratio builder/oracle is reported
/// with the residual left after scaling by it. A ratio of -1 is a sign
/// convention difference, any other magnitude a factor difference.
struct ShiftComparisonReport {
  struct Component {
    bool present = false;  // false when this rotation has no such part
    double ratio = 0.0;
    double residual = 0.0;
    std::string classification;  // "agree", "sign", "factor", "sign+factor", "inconsistent", "absent"
  };
  int n_theta = 0;
  int n_phi = 0;
  double tolerance = 1e-12;
  double max_abs_diff = 0.0;
  bool agree = false;
  double worst_theta = 0.0;
  double worst_phi = 0.0;
  Eigen::Matrix2d builder_at_worst = Eigen::Matrix2d::Zero();
  Eigen::Matrix2d oracle_at_worst = Eigen::Matrix2d::Zero();
  Component axial;
  Component planar;
};

namespace detail {

inline Eigen::Matrix2d pi_block_shift(const RotationSpec& rot, double theta, double phi) {
  DiatomicModel flat;  // V = 0, no coupling: the Pi block holds only the shifts
  flat.r_min = 0.5;
  flat.r_max = 1.5;
  const auto h = build_sigma_pi_rotating(flat, rot, 1.0, theta, phi);
  return h.entries().bottomRightCorner(2, 2).real();
}

inline ShiftComparisonReport::Component compare_component(const RotationSpec& rot, int nt, int np, double tol) {
  ShiftComparisonReport::Component c;
  if (rot.omega() == 0.0) {
    c.classification = "absent";
    return c;
  }
  c.present = true;
  double num = 0.0, den = 0.0;
  std::vector<std::pair<Eigen::Matrix2d, Eigen::Matrix2d>> samples;
  for (int i = 0; i < nt; ++i) {
    const double theta = pi * i / (nt - 1);
    for (int j = 0; j < np; ++j) {
      const double phi = 2.0 * pi * j / np;
      const Eigen::Matrix2d b = pi_block_shift(rot, theta, phi);
      const Eigen::Matrix2d o = rotated_angular_momentum_oracle(rot, theta, phi).entries().real();
      num += (b.array() * o.array()).sum();
      den += o.squaredNorm();
      samples.emplace_back(b, o);
    }
  }
  c.ratio = den > 0.0 ? num / den : 0.0;
  for (const auto& [b, o] : samples) c.residual = std::max(c.residual, (b - c.ratio * o).cwiseAbs().maxCoeff());
  const double scale_tol = tol * std::max(1.0, rot.omega());
  if (c.residual > 1e-10 * std::max(1.0, rot.omega()))
    c.classification = "inconsistent";
  else if (std::abs(c.ratio - 1.0) <= scale_tol)
    c.classification = "agree";
  else if (std::abs(c.ratio + 1.0) <= scale_tol)
    c.classification = "sign";
  else
    c.classification = c.ratio < 0.0 ? "sign+factor" : "factor";
  return c;
}

}  // namespace detail

/// Compares the Pi shifts of build_sigma_pi_rotating with the vector-operator
/// oracle on an n_theta x n_phi grid (theta in [0, pi], phi in [0, 2 pi)).
inline ShiftComparisonReport compare_rotation_shifts(const RotationSpec& rot, int n_theta = 32, int n_phi = 32,
                                                     double tolerance = 1e-12) {
  require(n_theta >= 2 && n_phi >= 1, Errc::InvalidArgument, "comparison grid too small");
  ShiftComparisonReport rep;
  rep.n_theta = n_theta;
  rep.n_phi = n_phi;
  rep.tolerance = tolerance;
  for (int i = 0; i < n_theta; ++i) {
    const double theta = pi * i / (n_theta - 1);
    for (int j = 0; j < n_phi; ++j) {
      const double phi = 2.0 * pi * j / n_phi;
      const Eigen::Matrix2d b = detail::pi_block_shift(rot, theta, phi);
      const Eigen::Matrix2d o = rotated_angular_momentum_oracle(rot, theta, phi).entries().real();
      const double d = (b - o).cwiseAbs().maxCoeff();
      if (d > rep.max_abs_diff || (i == 0 && j == 0)) {
        rep.max_abs_diff = d;
        rep.worst_theta = theta;
        rep.worst_phi = phi;
        rep.builder_at_worst = b;
        rep.oracle_at_worst = o;
      }
    }
  }
  rep.agree = rep.max_abs_diff <= tolerance * std::max(1.0, rot.omega());
  rep.axial = detail::compare_component(RotationSpec::from_components(0.0, 0.0, rot.omega_z()), n_theta, n_phi,
                                        tolerance);
  rep.planar = detail::compare_component(RotationSpec::from_components(rot.omega_x(), rot.omega_y(), 0.0), n_theta,
                                         n_phi, tolerance);
  return rep;
}

/// Strictly increasing, non-empty sample points.
struct AxisGrid {
  std::vector<double> values;

  static AxisGrid linspace(double lo, double hi, std::size_t count) {
    require(count >= 1, Errc::InvalidArgument, "grid needs at least one point");
    AxisGrid g;
    if (count == 1) {
      g.values = {lo};
      return g;
    }
    for (std::size_t i = 0; i < count; ++i)
      g.values.push_back(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1));
    return g;
  }

  void validate(const char* name) const {
    require(!values.empty(), Errc::InvalidArgument, std::string(name) + " grid is empty");
    for (std::size_t i = 1; i < values.size(); ++i)
      require(values[i] > values[i - 1], Errc::InvalidArgument, std::string(name) + " grid must be strictly increasing");
  }
};

/// Three adiabatic surfaces sampled on an (r, theta, phi) grid.
struct AdiabaticScan {
  AxisGrid r, theta, phi;
  std::vector<std::array<double, 3>> energies;  // index = (ir * n_theta + it) * n_phi + ip

  std::size_t index(std::size_t ir, std::size_t it, std::size_t ip) const {
    return (ir * theta.values.size() + it) * phi.values.size() + ip;
  }
  const std::array<double, 3>& at(std::size_t ir, std::size_t it, std::size_t ip) const {
    return energies[index(ir, it, ip)];
  }
};

struct ScanOptions {
  std::size_t max_points = 10'000'000;
  unsigned threads = 1;
};

inline std::array<double, 3> adiabatic_energies(const DiatomicModel& model, const RotationSpec& rot, double r,
                                                double theta, double phi) {
  const auto ev = eigenvalues_dense(build_sigma_pi_rotating(model, rot, r, theta, phi));
  return {ev[0], ev[1], ev[2]};
}

/// Eigenvalues of the rotating-cavity matrix at every grid point.
/// With threads > 1 the r-slices are split across workers writing disjoint slots.
inline AdiabaticScan adiabatic_scan(const DiatomicModel& model, const RotationSpec& rot, const AxisGrid& r_grid,
                                    const AxisGrid& theta_grid, const AxisGrid& phi_grid, ScanOptions opt = {}) {
  model.validate();
  r_grid.validate("r");
  theta_grid.validate("theta");
  phi_grid.validate("phi");
  require(r_grid.values.front() >= model.r_min && r_grid.values.back() <= model.r_max, Errc::DomainError,
          "r grid leaves the model domain");
  const double total = static_cast<double>(r_grid.values.size()) * static_cast<double>(theta_grid.values.size()) *
                       static_cast<double>(phi_grid.values.size());
  require(total <= static_cast<double>(opt.max_points), Errc::GridTooLarge,
          "scan of " + std::to_string(total) + " points exceeds the cap of " + std::to_string(opt.max_points));

  AdiabaticScan scan{r_grid, theta_grid, phi_grid, {}};
  scan.energies.resize(static_cast<std::size_t>(total));
  const std::size_t nr = r_grid.values.size();
  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t ir = begin; ir < end; ++ir)
      for (std::size_t it = 0; it < theta_grid.values.size(); ++it)
        for (std::size_t ip = 0; ip < phi_grid.values.size(); ++ip)
          scan.energies[scan.index(ir, it, ip)] =
              adiabatic_energies(model, rot, r_grid.values[ir], theta_grid.values[it], phi_grid.values[ip]);
  };
  const std::size_t workers = std::clamp<std::size_t>(opt.threads, 1, nr);
  if (workers == 1) {
    work(0, nr);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work, nr * w / workers, nr * (w + 1) / workers);
    for (auto& t : pool) t.join();
  }
  return scan;
}

/// A pair of neighbouring grid points whose surfaces jump by more than the bound.
struct ScanJump {
  std::size_t from, to;
  int surface;
  double jump;
};

/// Neighbour pairs along each axis whose eigenvalue change exceeds `bound`,
/// skipping pairs with an endpoint within `radius` (in r) of an excluded r value
/// at theta in {0, pi}.
inline std::vector<ScanJump> scan_jumps(const AdiabaticScan& scan, double bound,
                                        const std::vector<double>& excluded_r = {}, double radius = 0.0) {
  std::vector<ScanJump> out;
  const std::size_t nr = scan.r.values.size(), nt = scan.theta.values.size(), np = scan.phi.values.size();
  auto near_lici = [&](std::size_t ir, std::size_t it) {
    const double th = scan.theta.values[it];
    if (std::abs(std::sin(th)) > std::max(radius, 1e-12)) return false;
    for (double r : excluded_r)
      if (std::abs(scan.r.values[ir] - r) <= radius) return true;
    return false;
  };
  auto check = [&](std::size_t ir, std::size_t it, std::size_t ip, std::size_t jr, std::size_t jt, std::size_t jp) {
    if (near_lici(ir, it) || near_lici(jr, jt)) return;
    const auto& a = scan.at(ir, it, ip);
    const auto& b = scan.at(jr, jt, jp);
    for (int s = 0; s < 3; ++s)
      if (std::abs(a[s] - b[s]) > bound)
        out.push_back({scan.index(ir, it, ip), scan.index(jr, jt, jp), s, std::abs(a[s] - b[s])});
  };
  for (std::size_t ir = 0; ir < nr; ++ir)
    for (std::size_t it = 0; it < nt; ++it)
      for (std::size_t ip = 0; ip < np; ++ip) {
        if (ir + 1 < nr) check(ir, it, ip, ir + 1, it, ip);
        if (it + 1 < nt) check(ir, it, ip, ir, it + 1, ip);
        if (ip + 1 < np) check(ir, it, ip, ir, it, ip + 1);
      }
  return out;
}

enum class LiciBranch { Plus, Minus, Degenerate };

inline std::string_view to_string(LiciBranch b) {
  switch (b) {
    case LiciBranch::Plus: return "plus";
    case LiciBranch::Minus: return "minus";
    case LiciBranch::Degenerate: return "degenerate";
  }
  return "?";
}

struct LiciSeam {
  std::vector<double> phi;
  std::vector<double> gaps;
  double max_gap = 0.0;
  double spread = 0.0;  // max - min gap over the grid
  bool certified = false;
};

/// Degeneracy at theta in {0, pi} where V_Sigma + wc = V_Pi + s, s = +-Wz.
struct LiciPoint {
  double r = 0.0;
  double theta = 0.0;
  LiciBranch branch = LiciBranch::Plus;
  double gap = 0.0;        // smallest adjacent eigenvalue spacing at (r, theta, phi = 0)
  double condition = 0.0;  // V_Sigma + wc - V_Pi - s at r
  LiciSeam seam;
};

struct LiciOptions {
  std::size_t samples = 512;
  std::size_t phi_points = 64;
  double tolerance = 1e-10;
};

struct LiciResult {
  std::vector<LiciPoint> points;
  std::vector<std::string> warnings;

  /// Distinct r values among the located points (within `tol`).
  std::vector<double> distinct_r(double tol = 1e-8) const {
    std::vector<double> rs;
    for (const auto& p : points) rs.push_back(p.r);
    std::vector<double> out;
    for (const auto& l : group_levels(rs, tol)) out.push_back(l.energy);
    return out;
  }
};

namespace detail {

inline double smallest_gap(const std::array<double, 3>& e) { return std::min(e[1] - e[0], e[2] - e[1]); }

// Roots of f on [lo, hi]: sign changes on a uniform sample refined by bisection
// until the bracket cannot shrink further.
template <class F>
std::vector<double> bracket_roots(F&& f, double lo, double hi, std::size_t samples) {
  std::vector<double> roots;
  double x0 = lo, f0 = f(lo);
  if (f0 == 0.0) roots.push_back(lo);
  for (std::size_t i = 1; i < samples; ++i) {
    const double x1 = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(samples - 1);
    const double f1 = f(x1);
    if (f1 == 0.0) {
      roots.push_back(x1);
    } else if (f0 != 0.0 && (f0 < 0.0) != (f1 < 0.0)) {
      double a = x0, b = x1, fa = f0;
      for (int it = 0; it < 200; ++it) {
        const double m = 0.5 * (a + b);
        if (m == a || m == b) break;
        const double fm = f(m);
        if (fm == 0.0) {
          a = b = m;
          break;
        }
        if ((fm < 0.0) == (fa < 0.0)) {
          a = m;
          fa = fm;
        } else {
          b = m;
        }
      }
      roots.push_back(std::abs(f(a)) <= std::abs(f(b)) ? a : b);
    }
    x0 = x1;
    f0 = f1;
  }
  return roots;
}

}  // namespace detail

/// Locates the LICIs in [r_lo, r_hi] and certifies each one's seam over phi.
///
/// Throws NoCrossing when no branch condition changes sign in the window.
inline LiciResult find_licis(const DiatomicModel& model, const RotationSpec& rot, double r_lo, double r_hi,
                             LiciOptions opt = {}) {
  model.validate();
  require(r_lo >= model.r_min && r_hi <= model.r_max && r_lo < r_hi, Errc::DomainError,
          "LICI window must lie inside the model domain");
  require(opt.samples >= 2 && opt.phi_points >= 1, Errc::InvalidArgument, "LICI sampling too coarse");

  LiciResult res;
  std::vector<std::pair<LiciBranch, double>> branches;
  if (rot.omega_z() == 0.0) {
    branches.emplace_back(LiciBranch::Degenerate, 0.0);
    res.warnings.emplace_back("ShiftDegenerate: Wz = 0, the plus and minus conditions coincide");
  } else {
    branches.emplace_back(LiciBranch::Plus, rot.omega_z());
    branches.emplace_back(LiciBranch::Minus, -rot.omega_z());
  }

  const double wc = model.cavity.omega_c;
  for (const auto& [branch, shift] : branches) {
    const auto cond = [&, s = shift](double r) { return model.v_sigma(r) + wc - model.v_pi(r) - s; };
    for (double r : detail::bracket_roots(cond, r_lo, r_hi, opt.samples)) {
      for (double theta : {0.0, pi}) {
        LiciPoint p;
        p.r = r;
        p.theta = theta;
        p.branch = branch;
        p.condition = cond(r);
        p.gap = detail::smallest_gap(adiabatic_energies(model, rot, r, theta, 0.0));
        if (p.gap > opt.tolerance || std::abs(p.condition) > opt.tolerance) {
          res.warnings.push_back("rejected candidate at r = " + std::to_string(r) + " (gap " + std::to_string(p.gap) + ")");
          continue;
        }
        double gmin = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < opt.phi_points; ++k) {
          const double phi = 2.0 * pi * static_cast<double>(k) / static_cast<double>(opt.phi_points);
          const double gap = detail::smallest_gap(adiabatic_energies(model, rot, r, theta, phi));
          p.seam.phi.push_back(phi);
          p.seam.gaps.push_back(gap);
          p.seam.max_gap = std::max(p.seam.max_gap, gap);
          gmin = std::min(gmin, gap);
        }
        p.seam.spread = p.seam.max_gap - gmin;
        p.seam.certified = p.seam.max_gap <= opt.tolerance;
        res.points.push_back(std::move(p));
      }
    }
  }
  require(!res.points.empty(), Errc::NoCrossing,
          "V_Sigma + wc - V_Pi -+ Wz has no sign change in [" + std::to_string(r_lo) + ", " + std::to_string(r_hi) + "]");
  std::stable_sort(res.points.begin(), res.points.end(), [](const LiciPoint& a, const LiciPoint& b) {
    return a.r < b.r || (a.r == b.r && a.theta < b.theta);
  });
  return res;
}

}  // namespace rotcav
