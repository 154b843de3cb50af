#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <stdexcept>
#include <utility>

namespace cginfer {

using cdouble = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kTraceTol = 1e-12;
inline constexpr double kPsdFloor = -1e-10;

inline bool is_hermitian(const Matrix& m, double tol = kHermitianTol) {
  if (m.rows() != m.cols()) return false;
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index k = i; k < m.cols(); ++k)
      if (std::abs(m(i, k) - std::conj(m(k, i))) > tol) return false;
  return true;
}

inline double min_eigenvalue(const Matrix& h) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

/// Hermitian, unit-trace, positive semidefinite matrix -- the state
/// representation used everywhere. Immutable after construction.
class DensityMatrix {
 public:
  static DensityMatrix from_matrix(Matrix m) {
    if (m.rows() != m.cols() || m.rows() < 1)
      throw std::invalid_argument("DensityMatrix: matrix must be square and nonempty");
    if (!is_hermitian(m))
      throw std::invalid_argument("DensityMatrix: matrix is not Hermitian (tol 1e-12)");
    const cdouble tr = m.trace();
    if (std::abs(tr.real() - 1.0) > kTraceTol || std::abs(tr.imag()) > kTraceTol)
      throw std::invalid_argument("DensityMatrix: trace differs from 1 (tol 1e-12)");
    if (min_eigenvalue(m) < kPsdFloor)
      throw std::invalid_argument("DensityMatrix: eigenvalue below -1e-10");
    return DensityMatrix(std::move(m));
  }

  int dim() const { return static_cast<int>(mat_.rows()); }
  const Matrix& matrix() const { return mat_; }
  cdouble operator()(int i, int k) const { return mat_(i, k); }

 private:
  explicit DensityMatrix(Matrix m) : mat_(std::move(m)) {}
  Matrix mat_;
};

/// Normalized state vector.
struct PureState {
  Vector amplitudes;

  static PureState from_amplitudes(Vector c) {
    if (c.size() < 1) throw std::invalid_argument("PureState: empty amplitude vector");
    if (std::abs(c.squaredNorm() - 1.0) > kTraceTol)
      throw std::invalid_argument("PureState: amplitudes not normalized (tol 1e-12)");
    return PureState{std::move(c)};
  }
  int dim() const { return static_cast<int>(amplitudes.size()); }
  Matrix projector() const { return amplitudes * amplitudes.adjoint(); }
  DensityMatrix to_density() const { return DensityMatrix::from_matrix(projector()); }
};

/// Qubit Bloch components, |r| <= 1. Convention: rho = (I + r.sigma)/2,
/// so rho01 = (x - i y)/2.
struct BlochVector {
  double x = 0.0, y = 0.0, z = 0.0;

  double norm() const { return std::sqrt(x * x + y * y + z * z); }

  static BlochVector checked(double x, double y, double z) {
    BlochVector b{x, y, z};
    if (b.norm() > 1.0 + 1e-12)
      throw std::invalid_argument("BlochVector: |r| exceeds 1 (tol 1e-12)");
    return b;
  }
};

inline Matrix qubit_matrix(const BlochVector& b) {
  Matrix m(2, 2);
  m(0, 0) = cdouble(0.5 * (1.0 + b.z), 0.0);
  m(1, 1) = cdouble(0.5 * (1.0 - b.z), 0.0);
  m(0, 1) = cdouble(0.5 * b.x, -0.5 * b.y);
  m(1, 0) = std::conj(m(0, 1));
  return m;
}

inline DensityMatrix qubit_state(const BlochVector& b) {
  return DensityMatrix::from_matrix(qubit_matrix(b));
}

inline BlochVector bloch_of(const Matrix& rho) {
  if (rho.rows() != 2 || rho.cols() != 2)
    throw std::invalid_argument("bloch_of: expected a 2x2 matrix");
  return BlochVector{2.0 * rho(0, 1).real(), -2.0 * rho(0, 1).imag(),
                     rho(0, 0).real() - rho(1, 1).real()};
}

inline Matrix pauli_x() { return (Matrix(2, 2) << 0, 1, 1, 0).finished(); }
inline Matrix pauli_y() {
  return (Matrix(2, 2) << 0, cdouble(0, -1), cdouble(0, 1), 0).finished();
}
inline Matrix pauli_z() { return (Matrix(2, 2) << 1, 0, 0, -1).finished(); }

/// Angular momentum matrices in the basis m = j, j-1, ..., -j (so jz is
/// diagonal with descending entries). Units of hbar = 1.
struct SpinOperators {
  double j;
  int dim;
  Matrix jx, jy, jz;
};

inline int two_j_of(double j) {
  const int twoj = static_cast<int>(std::lround(2.0 * j));
  if (twoj < 1 || std::abs(2.0 * j - twoj) > 1e-9)
    throw std::invalid_argument("angular_momentum: j must be a half-integer with 2j >= 1");
  return twoj;
}

inline SpinOperators angular_momentum(double j) {
  const int twoj = two_j_of(j);
  const int dim = twoj + 1;
  Matrix jz = Matrix::Zero(dim, dim);
  Matrix jp = Matrix::Zero(dim, dim);
  for (int k = 0; k < dim; ++k) jz(k, k) = j - k;
  for (int k = 1; k < dim; ++k) {
    const double m = j - k;  // J+ |m> = sqrt(j(j+1) - m(m+1)) |m+1>
    jp(k - 1, k) = std::sqrt(j * (j + 1.0) - m * (m + 1.0));
  }
  const Matrix jm = jp.adjoint();
  return SpinOperators{j, dim, (jp + jm) / 2.0, (jp - jm) / cdouble(0.0, 2.0), jz};
}

/// Trace norm of a Hermitian matrix (sum of |eigenvalues|).
inline double trace_norm(const Matrix& h) {
  if (h.rows() == 2 && h.cols() == 2) {
    const double a = h(0, 0).real(), d = h(1, 1).real();
    const double s = std::sqrt(0.25 * (a - d) * (a - d) + std::norm(h(0, 1)));
    return std::abs(0.5 * (a + d) + s) + std::abs(0.5 * (a + d) - s);
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().sum();
}

inline double trace_distance(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw std::invalid_argument("trace_distance: dimension mismatch");
  return 0.5 * trace_norm(a - b);
}

inline double trace_distance(const DensityMatrix& a, const DensityMatrix& b) {
  return trace_distance(a.matrix(), b.matrix());
}

/// exp(h) for Hermitian h, via eigendecomposition.
inline Matrix hermitian_exp(const Matrix& h) {
  if (h.rows() != h.cols()) throw std::invalid_argument("hermitian_exp: matrix not square");
  if (!is_hermitian(h, 1e-10))
    throw std::invalid_argument("hermitian_exp: matrix not Hermitian");
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  const Eigen::VectorXd w = es.eigenvalues().array().exp();
  return es.eigenvectors() * w.asDiagonal() * es.eigenvectors().adjoint();
}

enum class Subsystem { First, Second };

/// Partial trace over one tensor factor of a (dA*dB)-dimensional operator,
/// with the first factor of dimension dA.
inline Matrix partial_trace(const Matrix& m, int dA, int dB, Subsystem traced) {
  if (m.rows() != m.cols() || m.rows() != static_cast<Eigen::Index>(dA) * dB)
    throw std::invalid_argument("partial_trace: dimension does not factor as dA*dB");
  if (traced == Subsystem::Second) {
    Matrix out = Matrix::Zero(dA, dA);
    for (int a = 0; a < dA; ++a)
      for (int c = 0; c < dA; ++c) {
        cdouble s = 0.0;
        for (int b = 0; b < dB; ++b) s += m(a * dB + b, c * dB + b);
        out(a, c) = s;
      }
    return out;
  }
  Matrix out = Matrix::Zero(dB, dB);
  for (int b = 0; b < dB; ++b)
    for (int d = 0; d < dB; ++d) {
      cdouble s = 0.0;
      for (int a = 0; a < dA; ++a) s += m(a * dB + b, a * dB + d);
      out(b, d) = s;
    }
  return out;
}

inline DensityMatrix partial_trace(const DensityMatrix& state, int dS, int dE,
                                   Subsystem traced = Subsystem::Second) {
  return DensityMatrix::from_matrix(partial_trace(state.matrix(), dS, dE, traced));
}

/// von Neumann entropy in nats, -tr(rho ln rho).
inline double von_neumann_entropy(const Matrix& rho) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(rho, Eigen::EigenvaluesOnly);
  double s = 0.0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const double p = es.eigenvalues()(i);
    if (p > 1e-15) s -= p * std::log(p);
  }
  return s;
}

inline double von_neumann_entropy(const DensityMatrix& rho) {
  return von_neumann_entropy(rho.matrix());
}

inline Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index k = 0; k < a.cols(); ++k)
      out.block(i * b.rows(), k * b.cols(), b.rows(), b.cols()) = a(i, k) * b;
  return out;
}

}  // namespace cginfer
