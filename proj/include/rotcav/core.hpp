#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <compare>
#include <cstddef>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "rotcav/error.hpp"

namespace rotcav {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

inline constexpr double pi = 3.14159265358979323846;

// All energies share one unit and hbar = 1, so an angular velocity enters as the
// energy hbar*Omega. Nothing inside the library converts units.
struct EnergyUnit {
  std::string name = "arb";
};

/// Label of one state of the single-excitation basis.
///
/// `m` is only meaningful for AtomExcited; `index` is the atom index for the
/// atomic kinds and the radial grid point for the molecular channels (-1 when
/// the state is not tied to either).
struct BasisState {
  enum class Kind {
    GroundOnePhoton,
    AtomExcited,
    PsiPlus,
    PsiMinus,
    Dark,
    SigmaOnePhoton,
    PiPlus,
    PiMinus,
    Generic,
  };

  Kind kind = Kind::Generic;
  int m = 0;
  int index = -1;
  int photon_number = 0;

  auto operator<=>(const BasisState&) const = default;

  static BasisState ground_one_photon() { return {Kind::GroundOnePhoton, 0, -1, 1}; }
  static BasisState atom_excited(int m, int atom) { return {Kind::AtomExcited, m, atom, 0}; }
  static BasisState psi_plus(int atom) { return {Kind::PsiPlus, 0, atom, 0}; }
  static BasisState psi_minus(int atom) { return {Kind::PsiMinus, 0, atom, 0}; }
  static BasisState dark(int atom) { return {Kind::Dark, 0, atom, 0}; }
  static BasisState sigma_one_photon(int grid = -1) { return {Kind::SigmaOnePhoton, 0, grid, 1}; }
  static BasisState pi_plus(int grid = -1) { return {Kind::PiPlus, 0, grid, 0}; }
  static BasisState pi_minus(int grid = -1) { return {Kind::PiMinus, 0, grid, 0}; }
  static BasisState generic(int i) { return {Kind::Generic, 0, i, 0}; }

  std::string to_string() const {
    auto idx = [this] { return std::to_string(index); };
    switch (kind) {
      case Kind::GroundOnePhoton: return "g1";
      case Kind::AtomExcited: return "e" + idx() + "(m=" + std::to_string(m) + ")0";
      case Kind::PsiPlus: return "psi+" + idx();
      case Kind::PsiMinus: return "psi-" + idx();
      case Kind::Dark: return "psi0_" + idx();
      case Kind::SigmaOnePhoton: return "Sigma1" + (index >= 0 ? "@" + idx() : std::string());
      case Kind::PiPlus: return "Pi+0" + (index >= 0 ? "@" + idx() : std::string());
      case Kind::PiMinus: return "Pi-0" + (index >= 0 ? "@" + idx() : std::string());
      case Kind::Generic: return "s" + idx();
    }
    return "?";
  }
};

inline std::vector<BasisState> generic_labels(std::size_t dim) {
  std::vector<BasisState> out;
  out.reserve(dim);
  for (std::size_t i = 0; i < dim; ++i) out.push_back(BasisState::generic(static_cast<int>(i)));
  return out;
}

/// Dense complex Hermitian matrix over a labeled basis.
///
/// The mutators write mirrored entries, so a matrix assembled through them is
/// exactly Hermitian. `from_dense` takes arbitrary data and is the only way to
/// obtain a non-Hermitian instance (used to exercise the solver's input check).
class HermitianMatrix {
 public:
  HermitianMatrix() = default;

  explicit HermitianMatrix(std::vector<BasisState> labels)
      : entries_(CMatrix::Zero(static_cast<Eigen::Index>(labels.size()),
                               static_cast<Eigen::Index>(labels.size()))),
        labels_(std::move(labels)) {
    require(!labels_.empty(), Errc::InvalidArgument, "HermitianMatrix needs dim >= 1");
    check_labels();
  }

  static HermitianMatrix from_dense(CMatrix entries, std::vector<BasisState> labels) {
    require(entries.rows() == entries.cols(), Errc::InvalidArgument, "matrix must be square");
    require(static_cast<std::size_t>(entries.rows()) == labels.size(), Errc::InvalidArgument,
            "label count does not match matrix dimension");
    HermitianMatrix h;
    h.entries_ = std::move(entries);
    h.labels_ = std::move(labels);
    h.check_labels();
    return h;
  }

  std::size_t dim() const noexcept { return labels_.size(); }
  const CMatrix& entries() const noexcept { return entries_; }
  const std::vector<BasisState>& labels() const noexcept { return labels_; }
  cplx operator()(std::size_t i, std::size_t j) const { return entries_(idx(i), idx(j)); }

  void set_diagonal(std::size_t i, double value) { entries_(idx(i), idx(i)) = value; }
  void add_diagonal(std::size_t i, double value) { entries_(idx(i), idx(i)) += value; }

  /// Sets entry (i, j) and its mirror (j, i) = conj(value); i != j.
  void set_coupling(std::size_t i, std::size_t j, cplx value) {
    require(i != j, Errc::InvalidArgument, "set_coupling on a diagonal entry");
    entries_(idx(i), idx(j)) = value;
    entries_(idx(j), idx(i)) = std::conj(value);
  }

  double hermiticity_defect() const { return (entries_ - entries_.adjoint()).cwiseAbs().maxCoeff(); }
  double max_abs_entry() const { return entries_.cwiseAbs().maxCoeff(); }
  bool is_real() const { return entries_.imag().cwiseAbs().maxCoeff() == 0.0; }

  /// Matrix in a new basis: Q^dagger H Q, columns of Q are the new basis vectors.
  HermitianMatrix transformed(const CMatrix& q, std::vector<BasisState> new_labels) const {
    CMatrix m = q.adjoint() * entries_ * q;
    CMatrix sym = 0.5 * (m + m.adjoint());
    return from_dense(std::move(sym), std::move(new_labels));
  }

 private:
  static Eigen::Index idx(std::size_t i) { return static_cast<Eigen::Index>(i); }

  void check_labels() const {
    std::set<BasisState> seen(labels_.begin(), labels_.end());
    require(seen.size() == labels_.size(), Errc::InvalidArgument, "basis labels must be distinct");
    for (const auto& s : labels_) {
      const bool photonic = s.kind == BasisState::Kind::GroundOnePhoton ||
                            s.kind == BasisState::Kind::SigmaOnePhoton;
      if (s.kind != BasisState::Kind::Generic)
        require(s.photon_number == (photonic ? 1 : 0), Errc::InvalidArgument,
                "state " + s.to_string() + " leaves the single-excitation subspace");
    }
  }

  CMatrix entries_;
  std::vector<BasisState> labels_;
};

struct EigenDecomposition {
  RVector eigenvalues;   // ascending
  CMatrix eigenvectors;  // column k belongs to eigenvalue k; empty when not requested
};

namespace detail {

// Fix the gauge of every eigenvector: the first component whose modulus exceeds
// 1e-8 of the column maximum is made real and positive.
inline void normalize_phases(CMatrix& v) {
  for (Eigen::Index k = 0; k < v.cols(); ++k) {
    const double cap = v.col(k).cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < v.rows(); ++i) {
      const double a = std::abs(v(i, k));
      if (a > 1e-8 * cap) {
        v.col(k) *= std::conj(v(i, k)) / a;
        break;
      }
    }
  }
}

}  // namespace detail

struct EigensolveOptions {
  bool want_vectors = true;
  double hermitian_tolerance = 1e-12;  // relative to max |entry|
};

/// Full dense Hermitian eigensolve; eigenvalues ascending.
///
/// Real-valued input is routed through the real symmetric solver. Both paths
/// use Householder tridiagonalization followed by implicit QL with a bound of
/// 30*dim iterations; exceeding it raises ConvergenceFailure.
inline EigenDecomposition eigensolve_dense(const HermitianMatrix& h, EigensolveOptions opt = {}) {
  const double scale = h.max_abs_entry();
  require(h.hermiticity_defect() <= opt.hermitian_tolerance * std::max(scale, 1e-300),
          Errc::NonHermitianInput,
          "hermiticity defect " + std::to_string(h.hermiticity_defect()) + " exceeds tolerance");

  const int mode = opt.want_vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly;
  EigenDecomposition out;
  if (h.is_real()) {
    Eigen::MatrixXd re = h.entries().real();
    re = 0.5 * (re + re.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(re, mode);
    require(solver.info() == Eigen::Success, Errc::ConvergenceFailure, "QL iteration did not converge");
    out.eigenvalues = solver.eigenvalues();
    if (opt.want_vectors) out.eigenvectors = solver.eigenvectors().cast<cplx>();
  } else {
    CMatrix m = 0.5 * (h.entries() + h.entries().adjoint());
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(m, mode);
    require(solver.info() == Eigen::Success, Errc::ConvergenceFailure, "QL iteration did not converge");
    out.eigenvalues = solver.eigenvalues();
    if (opt.want_vectors) out.eigenvectors = solver.eigenvectors();
  }
  if (opt.want_vectors) detail::normalize_phases(out.eigenvectors);
  return out;
}

inline std::vector<double> eigenvalues_dense(const HermitianMatrix& h) {
  auto ev = eigensolve_dense(h, {.want_vectors = false}).eigenvalues;
  return {ev.data(), ev.data() + ev.size()};
}

/// U = exp(-i h t) assembled from the eigendecomposition of h.
inline CMatrix matrix_exponential_unitary(const HermitianMatrix& h, double t) {
  const auto eig = eigensolve_dense(h);
  CVector phases(eig.eigenvalues.size());
  for (Eigen::Index k = 0; k < phases.size(); ++k)
    phases(k) = std::exp(cplx(0.0, -eig.eigenvalues(k) * t));
  return eig.eigenvectors * phases.asDiagonal() * eig.eigenvectors.adjoint();
}

/// Maximum elementwise deviation of two multisets (both sorted internally).
/// Sizes must match.
inline double multiset_deviation(std::vector<double> a, std::vector<double> b) {
  require(a.size() == b.size(), Errc::InvalidArgument,
          "multiset sizes differ: " + std::to_string(a.size()) + " vs " + std::to_string(b.size()));
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double dev = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) dev = std::max(dev, std::abs(a[i] - b[i]));
  return dev;
}

/// A distinct energy level and how many eigenvalues sit on it.
struct Level {
  double energy = 0.0;
  std::size_t multiplicity = 0;
};

/// Clusters sorted values: a value joins the running level when it lies within
/// `tol` of the level's first member.
inline std::vector<Level> group_levels(std::vector<double> values, double tol) {
  std::sort(values.begin(), values.end());
  std::vector<Level> out;
  double anchor = 0.0;
  for (double v : values) {
    if (!out.empty() && v - anchor <= tol) {
      auto& lv = out.back();
      lv.energy += (v - lv.energy) / static_cast<double>(++lv.multiplicity);
    } else {
      out.push_back({v, 1});
      anchor = v;
    }
  }
  return out;
}

}  // namespace rotcav
