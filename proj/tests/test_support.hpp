#pragma once

#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "rotcav/core.hpp"

namespace rotcav::testing {

inline std::mt19937_64& rng() {
  static std::mt19937_64 gen(20261019);
  return gen;
}

inline double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng()); }

inline HermitianMatrix random_hermitian(int dim, double amplitude = 1.0) {
  CMatrix m(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) m(i, j) = cplx(uniform(-amplitude, amplitude), uniform(-amplitude, amplitude));
  CMatrix h = 0.5 * (m + m.adjoint());
  return HermitianMatrix::from_dense(h, generic_labels(static_cast<std::size_t>(dim)));
}

inline CMatrix random_unitary(int dim) {
  CMatrix m(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) m(i, j) = cplx(uniform(-1, 1), uniform(-1, 1));
  Eigen::HouseholderQR<CMatrix> qr(m);
  return qr.householderQ() * CMatrix::Identity(dim, dim);
}

inline std::vector<double> to_vector(const RVector& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace rotcav::testing
