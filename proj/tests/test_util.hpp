#pragma once

#include <catch2/catch_amalgamated.hpp>

#include "cginfer/linalg.hpp"
#include "cginfer/random.hpp"

namespace test_util {

using cginfer::cdouble;
using cginfer::Matrix;
using cginfer::Vector;

inline double max_abs_diff(const Matrix& a, const Matrix& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

inline cginfer::DensityMatrix random_qubit(cginfer::Rng& rng) {
  return cginfer::qubit_state(cginfer::uniform_bloch_ball(rng));
}

inline Matrix random_hermitian(int dim, cginfer::Rng& rng) {
  Matrix h(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int k = 0; k < dim; ++k) h(i, k) = rng.complex_gaussian();
  return 0.5 * (h + h.adjoint()).eval();
}

inline cginfer::DensityMatrix random_density(int dim, cginfer::Rng& rng) {
  Matrix g(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int k = 0; k < dim; ++k) g(i, k) = rng.complex_gaussian();
  Matrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  rho = 0.5 * (rho + rho.adjoint().eval());
  return cginfer::DensityMatrix::from_matrix(std::move(rho));
}

inline Matrix random_unitary(int dim, cginfer::Rng& rng) {
  Matrix g(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int k = 0; k < dim; ++k) g(i, k) = rng.complex_gaussian();
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int i = 0; i < dim; ++i) q.col(i) *= r(i, i) / std::abs(r(i, i));
  return q;
}

/// exp(-i theta H) for Hermitian H.
inline Matrix unitary_rotation(const Matrix& h, double theta) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  Vector ph(h.rows());
  for (Eigen::Index k = 0; k < h.rows(); ++k)
    ph(k) = std::exp(cdouble(0.0, -theta * es.eigenvalues()(k)));
  return es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint();
}

inline Matrix bell_state() {
  Vector v(4);
  v << 1.0 / std::numbers::sqrt2, 0, 0, 1.0 / std::numbers::sqrt2;
  return v * v.adjoint();
}

}  // namespace test_util
