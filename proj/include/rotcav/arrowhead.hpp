#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <vector>

#include "rotcav/core.hpp"

namespace rotcav {

/// Hermitian arrowhead matrix
///
///     [ head  w_0  w_1 ... ]
///     [ w_0*  d_0          ]
///     [ w_1*       d_1     ]
///     [ ...            ... ]
///
/// `labels`, when non-empty, names the dense basis (head first).
struct ArrowheadMatrix {
  double head = 0.0;
  std::vector<double> shaft;
  std::vector<cplx> couplings;
  std::vector<BasisState> labels;

  std::size_t dim() const noexcept { return shaft.size() + 1; }

  void validate() const {
    require(shaft.size() == couplings.size(), Errc::InvalidArgument,
            "arrowhead shaft and coupling lengths differ");
    require(labels.empty() || labels.size() == dim(), Errc::InvalidArgument,
            "arrowhead label count does not match dimension");
    require(std::isfinite(head), Errc::InvalidArgument, "arrowhead head is not finite");
    for (std::size_t k = 0; k < shaft.size(); ++k)
      require(std::isfinite(shaft[k]) && std::isfinite(couplings[k].real()) &&
                  std::isfinite(couplings[k].imag()),
              Errc::InvalidArgument, "arrowhead entries must be finite");
  }

  /// Largest absolute entry, the reference magnitude for every tolerance.
  double scale() const {
    double s = std::abs(head);
    for (double d : shaft) s = std::max(s, std::abs(d));
    for (cplx w : couplings) s = std::max(s, std::abs(w));
    return s > 0.0 ? s : 1.0;
  }

  HermitianMatrix to_dense() const {
    validate();
    HermitianMatrix h(labels.empty() ? generic_labels(dim()) : labels);
    h.set_diagonal(0, head);
    for (std::size_t k = 0; k < shaft.size(); ++k) {
      h.set_diagonal(k + 1, shaft[k]);
      if (couplings[k] != cplx(0.0)) h.set_coupling(0, k + 1, couplings[k]);
    }
    return h;
  }
};

struct SecularSolution {
  std::vector<double> eigenvalues;                  // ascending, size dim
  std::vector<bool> deflated;                       // parallel to eigenvalues
  std::map<double, std::size_t> dark_multiplicities;  // shaft value -> deflated count
  std::optional<CMatrix> eigenvectors;              // columns parallel to eigenvalues
  std::size_t root_count = 0;
  std::size_t deflated_count = 0;
};

struct ArrowheadOptions {
  bool want_vectors = false;
  double root_rel_tolerance = 1e-13;
  double deflation_tolerance = 1e-12;  // relative to scale()
  int max_iterations = 200;
};

/// f(e) = (e - head) - sum_k |w_k|^2 / (e - d_k).
inline double secular_function(const ArrowheadMatrix& a, double e) {
  a.validate();
  const double pole_tol = 1e-14 * a.scale();
  double f = e - a.head;
  for (std::size_t k = 0; k < a.shaft.size(); ++k) {
    const double den = e - a.shaft[k];
    require(std::abs(den) >= pole_tol, Errc::PoleEvaluation,
            "secular function evaluated at shaft value " + std::to_string(a.shaft[k]));
    f -= std::norm(a.couplings[k]) / den;
  }
  return f;
}

namespace detail {

struct ShaftGroup {
  double value = 0.0;
  double weight2 = 0.0;  // sum of |w|^2 over members
  std::vector<std::size_t> members;
  bool coupled = false;
};

// Secular function of the deflated problem, written around the pole `origin`
// so that e = poles[origin] + tau keeps full relative accuracy close to it.
class ShiftedSecular {
 public:
  ShiftedSecular(double head, const std::vector<double>& poles, const std::vector<double>& weight2,
                 std::size_t origin)
      : weight2_(weight2), base_(poles[origin] - head), diff_(poles.size()) {
    for (std::size_t j = 0; j < poles.size(); ++j) diff_[j] = poles[origin] - poles[j];
  }

  // Returns f and f'.
  std::pair<double, double> operator()(double tau) const {
    double f = base_ + tau;
    double df = 1.0;
    for (std::size_t j = 0; j < diff_.size(); ++j) {
      const double den = diff_[j] + tau;
      const double q = weight2_[j] / den;
      f -= q;
      df += q / den;
    }
    return {f, df};
  }

 private:
  const std::vector<double>& weight2_;
  double base_;
  std::vector<double> diff_;
};

// Zero of the increasing function g on the open interval (lo, hi), starting at x.
inline double safeguarded_newton(const ShiftedSecular& g, double lo, double hi, double x,
                                 double rel_tol, int max_iter) {
  double step_old = hi - lo;
  double step = step_old;
  for (int it = 0; it < max_iter; ++it) {
    const auto [f, df] = g(x);
    if (f == 0.0) return x;
    if (f < 0.0)
      lo = x;
    else
      hi = x;
    double next = x - f / df;
    const bool outside = !(next > lo && next < hi);
    if (outside || std::abs(next - x) > 0.5 * std::abs(step_old)) {
      next = 0.5 * (lo + hi);
    }
    step_old = step;
    step = next - x;
    const double tol = rel_tol * std::abs(next);
    if (std::abs(step) <= tol || next == lo || next == hi || hi - lo <= tol) return next;
    x = next;
  }
  throw Error(Errc::ConvergenceFailure, "secular root did not converge within " +
                                            std::to_string(max_iter) + " iterations");
}

// Householder reflector whose first column is u / alpha, |alpha| = 1 (u unit norm).
inline CMatrix reflector_with_first_column(const CVector& u) {
  const Eigen::Index m = u.size();
  const double a0 = std::abs(u(0));
  const cplx phase = a0 > 0.0 ? u(0) / a0 : cplx(1.0);
  const cplx alpha = -phase;
  CVector v = u;
  v(0) -= alpha;
  const double vv = v.squaredNorm();
  CMatrix h = CMatrix::Identity(m, m);
  if (vv > 0.0) h -= (2.0 / vv) * v * v.adjoint();
  return h;
}

}  // namespace detail

/// Eigenvalues (and optionally eigenvectors) of a Hermitian arrowhead matrix.
///
/// Shaft entries that share a value are merged into one effective entry of
/// weight sqrt(sum |w|^2); the remaining directions inside that group, and any
/// group whose weight is below the deflation tolerance, are returned exactly at
/// the shaft value (dark states). The surviving effective problem has one root
/// in each gap between consecutive effective poles plus one on either side,
/// found by bracketed Newton iteration on the secular function.
inline SecularSolution eigensolve_arrowhead(const ArrowheadMatrix& a, ArrowheadOptions opt = {}) {
  a.validate();
  const double scale = a.scale();
  const double merge_tol = opt.deflation_tolerance * scale;
  const std::size_t n = a.shaft.size();

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return a.shaft[i] < a.shaft[j]; });

  std::vector<detail::ShaftGroup> groups;
  for (std::size_t i : order) {
    if (groups.empty() || a.shaft[i] - groups.back().value > merge_tol) {
      groups.push_back({a.shaft[i], 0.0, {}, false});
    }
    groups.back().members.push_back(i);
    groups.back().weight2 += std::norm(a.couplings[i]);
  }

  std::vector<double> poles, weight2;
  std::vector<std::size_t> pole_group;
  SecularSolution sol;
  for (std::size_t gi = 0; gi < groups.size(); ++gi) {
    auto& g = groups[gi];
    g.coupled = std::sqrt(g.weight2) > merge_tol;
    const std::size_t dark = g.members.size() - (g.coupled ? 1 : 0);
    if (dark > 0) sol.dark_multiplicities[g.value] += dark;
    sol.deflated_count += dark;
    if (g.coupled) {
      poles.push_back(g.value);
      weight2.push_back(g.weight2);
      pole_group.push_back(gi);
    }
  }

  // Each root is stored as (origin pole, offset); origin == npos means head-relative.
  constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();
  struct Root {
    std::size_t origin;
    double tau;
    double value;
  };
  std::vector<Root> roots;
  const std::size_t m = poles.size();
  if (m == 0) {
    roots.push_back({npos, 0.0, a.head});
  } else {
    const double wnorm = std::sqrt(std::accumulate(weight2.begin(), weight2.end(), 0.0));
    const double lo_bound = std::min(a.head, poles.front()) - wnorm - scale * 1e-15;
    const double hi_bound = std::max(a.head, poles.back()) + wnorm + scale * 1e-15;
    for (std::size_t k = 0; k <= m; ++k) {
      std::size_t origin;
      double lo, hi;
      if (k == 0) {
        origin = 0;
        lo = lo_bound - poles[0];
        hi = 0.0;
      } else if (k == m) {
        origin = m - 1;
        lo = 0.0;
        hi = hi_bound - poles[m - 1];
      } else {
        const double gap = poles[k] - poles[k - 1];
        const detail::ShiftedSecular left(a.head, poles, weight2, k - 1);
        const auto [fmid, dfmid] = left(0.5 * gap);
        (void)dfmid;
        if (fmid == 0.0) {
          roots.push_back({k - 1, 0.5 * gap, poles[k - 1] + 0.5 * gap});
          continue;
        }
        if (fmid > 0.0) {
          origin = k - 1;
          lo = 0.0;
          hi = 0.5 * gap;
        } else {
          origin = k;
          lo = -0.5 * gap;
          hi = 0.0;
        }
      }
      const detail::ShiftedSecular g(a.head, poles, weight2, origin);
      const double tau = detail::safeguarded_newton(g, lo, hi, 0.5 * (lo + hi),
                                                    opt.root_rel_tolerance, opt.max_iterations);
      roots.push_back({origin, tau, poles[origin] + tau});
    }
  }
  sol.root_count = roots.size();

  // Assemble (value, deflated, vector builder) and sort.
  struct Entry {
    double value;
    bool deflated;
    std::size_t source;  // root index, or group index for dark entries
    std::size_t slot;    // position inside the group's complement basis
  };
  std::vector<Entry> entries;
  entries.reserve(a.dim());
  for (std::size_t r = 0; r < roots.size(); ++r) entries.push_back({roots[r].value, false, r, 0});
  for (std::size_t gi = 0; gi < groups.size(); ++gi) {
    const auto& g = groups[gi];
    const std::size_t dark = g.members.size() - (g.coupled ? 1 : 0);
    for (std::size_t s = 0; s < dark; ++s) entries.push_back({g.value, true, gi, s});
  }
  std::stable_sort(entries.begin(), entries.end(),
                   [](const Entry& x, const Entry& y) { return x.value < y.value; });

  sol.eigenvalues.reserve(entries.size());
  sol.deflated.reserve(entries.size());
  for (const auto& e : entries) {
    sol.eigenvalues.push_back(e.value);
    sol.deflated.push_back(e.deflated);
  }

  if (opt.want_vectors) {
    const auto dim = static_cast<Eigen::Index>(a.dim());
    CMatrix vecs = CMatrix::Zero(dim, dim);
    std::map<std::size_t, CMatrix> complements;
    for (Eigen::Index col = 0; col < dim; ++col) {
      const auto& e = entries[static_cast<std::size_t>(col)];
      if (!e.deflated) {
        const Root& root = roots[e.source];
        CVector v = CVector::Zero(dim);
        v(0) = 1.0;
        for (std::size_t j = 0; j < m; ++j) {
          for (std::size_t i : groups[pole_group[j]].members) {
            double den;
            if (root.origin == npos)
              den = root.value - a.shaft[i];
            else
              den = (poles[root.origin] - a.shaft[i]) + root.tau;
            v(static_cast<Eigen::Index>(i) + 1) = std::conj(a.couplings[i]) / den;
          }
        }
        vecs.col(col) = v / v.norm();
      } else {
        const auto& g = groups[e.source];
        if (!g.coupled) {
          vecs(static_cast<Eigen::Index>(g.members[e.slot]) + 1, col) = 1.0;
          continue;
        }
        auto it = complements.find(e.source);
        if (it == complements.end()) {
          CVector u(static_cast<Eigen::Index>(g.members.size()));
          for (std::size_t s = 0; s < g.members.size(); ++s)
            u(static_cast<Eigen::Index>(s)) = std::conj(a.couplings[g.members[s]]);
          u /= u.norm();
          it = complements.emplace(e.source, detail::reflector_with_first_column(u)).first;
        }
        const CMatrix& q = it->second;
        for (std::size_t s = 0; s < g.members.size(); ++s)
          vecs(static_cast<Eigen::Index>(g.members[s]) + 1, col) =
              q(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(e.slot) + 1);
      }
    }
    detail::normalize_phases(vecs);
    sol.eigenvectors = std::move(vecs);
  }
  return sol;
}

struct BenchmarkRow {
  std::size_t n = 0;  // shaft length of the generated instance
  double time_arrowhead_s = 0.0;
  double time_dense_s = std::numeric_limits<double>::quiet_NaN();
  double max_abs_eig_diff = std::numeric_limits<double>::quiet_NaN();
};

struct BenchmarkOptions {
  std::size_t dense_limit = 2000;  // dense oracle only for n <= this
  double min_timing_s = 0.02;      // repeat the arrowhead solve until this much time accrues
};

/// Times eigenvalue-only arrowhead solves against the dense oracle.
/// `make_instance(n)` supplies the matrix for each requested size.
inline std::vector<BenchmarkRow> benchmark_scaling(
    const std::vector<std::size_t>& sizes,
    const std::function<ArrowheadMatrix(std::size_t)>& make_instance, BenchmarkOptions opt = {}) {
  require(std::is_sorted(sizes.begin(), sizes.end()), Errc::InvalidArgument,
          "benchmark sizes must be sorted ascending");
  using clock = std::chrono::steady_clock;
  std::vector<BenchmarkRow> rows;
  for (std::size_t n : sizes) {
    const ArrowheadMatrix a = make_instance(n);
    BenchmarkRow row;
    row.n = a.shaft.size();

    SecularSolution sol;
    int reps = 0;
    const auto t0 = clock::now();
    double elapsed = 0.0;
    do {
      sol = eigensolve_arrowhead(a);
      ++reps;
      elapsed = std::chrono::duration<double>(clock::now() - t0).count();
    } while (elapsed < opt.min_timing_s);
    row.time_arrowhead_s = elapsed / reps;

    if (row.n <= opt.dense_limit) {
      const auto h = a.to_dense();
      const auto t1 = clock::now();
      const auto dense = eigenvalues_dense(h);
      row.time_dense_s = std::chrono::duration<double>(clock::now() - t1).count();
      row.max_abs_eig_diff = multiset_deviation(sol.eigenvalues, dense);
    }
    rows.push_back(row);
  }
  return rows;
}

/// Least-squares slope of log(time) against log(n).
inline double fit_scaling_exponent(const std::vector<BenchmarkRow>& rows) {
  require(rows.size() >= 2, Errc::InvalidArgument, "need at least two rows to fit an exponent");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& r : rows) {
    const double x = std::log(static_cast<double>(r.n));
    const double y = std::log(r.time_arrowhead_s);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double k = static_cast<double>(rows.size());
  return (k * sxy - sx * sy) / (k * sxx - sx * sx);
}

}  // namespace rotcav
