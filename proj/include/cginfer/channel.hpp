#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "cginfer/linalg.hpp"
#include "cginfer/random.hpp"

namespace cginfer {

/// Orthonormal Hermitian operator basis for dimension n: the n diagonal
/// units |i><i|, then for each pair i<k the symmetric and antisymmetric
/// combinations (|i><k| + |k><i|)/sqrt2 and i(|k><i| - |i><k|)/sqrt2.
/// Orthonormal under tr(A B); coordinates of Hermitian operators are real.
class HermitianBasis {
 public:
  explicit HermitianBasis(int dim) : dim_(dim) {
    if (dim < 1) throw std::invalid_argument("HermitianBasis: dim must be >= 1");
  }

  int dim() const { return dim_; }
  int size() const { return dim_ * dim_; }

  Eigen::VectorXd coords(const Matrix& h) const {
    Eigen::VectorXd v(size());
    int idx = dim_;
    for (int i = 0; i < dim_; ++i) v(i) = h(i, i).real();
    const double s2 = std::numbers::sqrt2;
    for (int i = 0; i < dim_; ++i)
      for (int k = i + 1; k < dim_; ++k) {
        v(idx++) = s2 * h(i, k).real();
        v(idx++) = s2 * h(i, k).imag();
      }
    return v;
  }

  Matrix reconstruct(const Eigen::VectorXd& v) const {
    if (v.size() != size())
      throw std::invalid_argument("HermitianBasis: coordinate size mismatch");
    Matrix m = Matrix::Zero(dim_, dim_);
    int idx = dim_;
    for (int i = 0; i < dim_; ++i) m(i, i) = v(i);
    const double inv_s2 = 1.0 / std::numbers::sqrt2;
    for (int i = 0; i < dim_; ++i)
      for (int k = i + 1; k < dim_; ++k) {
        const double re = v(idx++) * inv_s2;
        const double im = v(idx++) * inv_s2;
        m(i, k) = cdouble(re, im);
        m(k, i) = cdouble(re, -im);
      }
    return m;
  }

  Matrix element(int index) const {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(size());
    v(index) = 1.0;
    return reconstruct(v);
  }

 private:
  int dim_;
};

/// Coarse-graining channel held as a (d^2)x(D^2) real transfer matrix over
/// the Hermitian bases of the two spaces; the trace-dual action is the
/// transpose in that representation.
class CoarseGrainingChannel {
 public:
  CoarseGrainingChannel(std::string label, int in_dim, int out_dim, Eigen::MatrixXd transfer)
      : label_(std::move(label)),
        in_dim_(in_dim),
        out_dim_(out_dim),
        transfer_(std::move(transfer)),
        in_basis_(in_dim),
        out_basis_(out_dim) {
    if (transfer_.rows() != out_dim * out_dim || transfer_.cols() != in_dim * in_dim)
      throw std::invalid_argument("CoarseGrainingChannel: transfer matrix shape mismatch");
  }

  const std::string& label() const { return label_; }
  int in_dim() const { return in_dim_; }
  int out_dim() const { return out_dim_; }
  const Eigen::MatrixXd& transfer() const { return transfer_; }

  /// Forward action on a Hermitian operator (not restricted to states).
  Matrix apply(const Matrix& h) const {
    if (h.rows() != in_dim_ || h.cols() != in_dim_)
      throw std::invalid_argument("channel apply: input dimension mismatch");
    return out_basis_.reconstruct(transfer_ * in_basis_.coords(h));
  }

  DensityMatrix forward(const DensityMatrix& state) const {
    return DensityMatrix::from_matrix(apply(state.matrix()));
  }

  /// Trace dual: tr(O apply(h)) == tr(dual(O) h).
  Matrix dual(const Matrix& observable) const {
    if (observable.rows() != out_dim_ || observable.cols() != out_dim_)
      throw std::invalid_argument("channel dual: observable dimension mismatch");
    return in_basis_.reconstruct(transfer_.transpose() * out_basis_.coords(observable));
  }

 private:
  std::string label_;
  int in_dim_, out_dim_;
  Eigen::MatrixXd transfer_;
  HermitianBasis in_basis_, out_basis_;
};

namespace detail {

inline Eigen::MatrixXd transfer_from_action(int in_dim, int out_dim,
                                            const std::function<Matrix(const Matrix&)>& action) {
  HermitianBasis in(in_dim), out(out_dim);
  Eigen::MatrixXd t(out.size(), in.size());
  for (int b = 0; b < in.size(); ++b) t.col(b) = out.coords(action(in.element(b)));
  return t;
}

/// Entrywise action of the blurred-and-saturated map on matrix units:
/// |00><00| -> |0><0|; |0i><0i|, |i0>... -> |1><1| (i>0);
/// |00><0i| -> |0><1|/sqrt3; |0i><00| -> |1><0|/sqrt3; rest -> 0.
inline Matrix bns_apply_table(const Matrix& psi) {
  const double inv_s3 = 1.0 / std::sqrt(3.0);
  Matrix out = Matrix::Zero(2, 2);
  out(0, 0) = psi(0, 0);
  for (int i = 1; i < 4; ++i) {
    out(1, 1) += psi(i, i);
    out(0, 1) += inv_s3 * psi(0, i);
    out(1, 0) += inv_s3 * psi(i, 0);
  }
  return out;
}

/// Compact matrix form of the same map.
inline Matrix bns_apply_compact(const Matrix& psi) {
  Matrix out(2, 2);
  out(0, 0) = psi(0, 0);
  out(0, 1) = (psi(0, 1) + psi(0, 2) + psi(0, 3)) / std::sqrt(3.0);
  out(1, 0) = (psi(1, 0) + psi(2, 0) + psi(3, 0)) / std::sqrt(3.0);
  out(1, 1) = psi(1, 1) + psi(2, 2) + psi(3, 3);
  return out;
}

}  // namespace detail

inline CoarseGrainingChannel make_partial_trace_channel(int dS, int dE) {
  if (dS < 1 || dE < 1)
    throw std::invalid_argument("make_partial_trace_channel: dims must be >= 1");
  Eigen::MatrixXd t = detail::transfer_from_action(
      dS * dE, dS, [&](const Matrix& h) { return partial_trace(h, dS, dE, Subsystem::Second); });
  return CoarseGrainingChannel("ptrace", dS * dE, dS, std::move(t));
}

/// Blurred-and-saturated detector map, 2 qubits -> 1 effective qubit.
/// Built from the 16-entry action table and cross-checked against the
/// compact matrix form on random inputs at construction.
inline CoarseGrainingChannel make_bns_channel() {
  Eigen::MatrixXd t = detail::transfer_from_action(4, 2, detail::bns_apply_table);
  CoarseGrainingChannel ch("bns", 4, 2, std::move(t));
  Rng rng(0x5eedull);
  for (int trial = 0; trial < 16; ++trial) {
    Matrix h(4, 4);
    for (int i = 0; i < 4; ++i)
      for (int k = 0; k < 4; ++k) h(i, k) = rng.complex_gaussian();
    h = (h + h.adjoint()).eval();
    if ((ch.apply(h) - detail::bns_apply_compact(h)).cwiseAbs().maxCoeff() > 1e-12)
      throw std::logic_error("make_bns_channel: table and compact forms disagree");
  }
  return ch;
}

/// SU(2)-preserving map, spin-j (dim 2j+1) -> effective qubit:
/// psi -> (1 + sum_i tr(psi J_i) sigma_i / j)/2. Dual: sigma_i -> J_i/j.
inline CoarseGrainingChannel make_su2_channel(double j) {
  const SpinOperators ops = angular_momentum(j);
  const Matrix sx = pauli_x(), sy = pauli_y(), sz = pauli_z();
  const Matrix id2 = Matrix::Identity(2, 2);
  auto action = [&](const Matrix& psi) {
    Matrix out = 0.5 * psi.trace() * id2;
    out += 0.5 / j * (psi * ops.jx).trace() * sx;
    out += 0.5 / j * (psi * ops.jy).trace() * sy;
    out += 0.5 / j * (psi * ops.jz).trace() * sz;
    return out;
  };
  Eigen::MatrixXd t = detail::transfer_from_action(ops.dim, 2, action);
  return CoarseGrainingChannel("su2", ops.dim, 2, std::move(t));
}

struct SymmetryCheck {
  bool pass;
  double max_residual;
};

/// Numerical symmetry test: max over random pure inputs of
/// || apply(U psi U+) - apply(psi) ||_1, pass iff below 1e-10.
inline SymmetryCheck check_symmetry(const CoarseGrainingChannel& ch, const Matrix& unitary,
                                    int n_samples, Rng& rng) {
  if (unitary.rows() != ch.in_dim() || unitary.cols() != ch.in_dim())
    throw std::invalid_argument("check_symmetry: unitary dimension mismatch");
  double worst = 0.0;
  for (int s = 0; s < n_samples; ++s) {
    const Matrix psi = haar_pure(ch.in_dim(), rng).projector();
    const Matrix rotated = unitary * psi * unitary.adjoint();
    worst = std::max(worst, trace_norm(ch.apply(rotated) - ch.apply(psi)));
  }
  return SymmetryCheck{worst < 1e-10, worst};
}

/// Member of the symmetry group of the blurred-and-saturated map:
/// identity on span{|00>} and span{(0,1,1,1)/sqrt3}, an arbitrary U(2)
/// block on the orthogonal complement.
inline Matrix bns_symmetry_unitary(const Eigen::Matrix2cd& v) {
  Vector v1(4), v2(4), v3(4);
  const double s3 = std::sqrt(3.0), s2 = std::numbers::sqrt2, s6 = std::sqrt(6.0);
  v1 << 0, 1 / s3, 1 / s3, 1 / s3;
  v2 << 0, 1 / s2, -1 / s2, 0;
  v3 << 0, 1 / s6, 1 / s6, -2 / s6;
  Matrix u = Matrix::Zero(4, 4);
  u(0, 0) = 1.0;
  u += v1 * v1.adjoint();
  u += v(0, 0) * v2 * v2.adjoint() + v(0, 1) * v2 * v3.adjoint();
  u += v(1, 0) * v3 * v2.adjoint() + v(1, 1) * v3 * v3.adjoint();
  return u;
}

inline Eigen::Matrix2cd random_unitary_2(Rng& rng) {
  Eigen::Matrix2cd g;
  for (int i = 0; i < 2; ++i)
    for (int k = 0; k < 2; ++k) g(i, k) = rng.complex_gaussian();
  const Eigen::HouseholderQR<Eigen::Matrix2cd> qr(g);
  Eigen::Matrix2cd q = qr.householderQ();
  const Eigen::Matrix2cd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int i = 0; i < 2; ++i) q.col(i) *= r(i, i) / std::abs(r(i, i));
  return q;
}

}  // namespace cginfer
