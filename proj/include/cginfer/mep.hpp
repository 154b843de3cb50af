#pragma once

#include <string>
#include <vector>

#include "cginfer/aam.hpp"
#include "cginfer/channel.hpp"
#include "cginfer/linalg.hpp"

namespace cginfer {

struct MepOptions {
  double tol = 1e-10;
  int max_iter = 200;
  double multiplier_cap_scale = 50.0;  // cap ||lambda|| at scale * in_dim
};

/// Gibbs-form maximum-entropy solution exp(-sum_i lambda_i dual[O_i])/Z.
struct MepSolution {
  DensityMatrix state;
  Eigen::VectorXd multipliers;
  double entropy = 0.0;   // nats
  double residual = 0.0;  // max_i |tr(O_i channel[state]) - o_i|
  int iterations = 0;
  bool converged = false;
  std::string status;  // "converged" | "max-iterations" | "infeasible-targets" | "boundary"
  double log_partition = 0.0;
};

inline std::vector<Matrix> qubit_tomographic_observables() {
  return {pauli_x(), pauli_y(), pauli_z()};
}

namespace detail {

struct GibbsPoint {
  Matrix psi;                 // exp(H)/Z
  Eigen::VectorXd g;          // tr(G_i psi)
  Eigen::MatrixXd covariance; // d tr(G_i psi)/d lambda_j = -C_ij
  double entropy = 0.0;
  double log_z = 0.0;
};

/// Evaluate the Gibbs state and the covariance of the lifted observables at
/// multipliers lambda. H = -sum lambda_i G_i; the covariance uses the
/// divided-difference (Duhamel) form from the eigendecomposition of H.
inline GibbsPoint gibbs_point(const std::vector<Matrix>& lifted, const Eigen::VectorXd& lambda,
                              bool with_covariance) {
  const int dim = static_cast<int>(lifted.front().rows());
  const int n = static_cast<int>(lifted.size());
  Matrix h = Matrix::Zero(dim, dim);
  for (int i = 0; i < n; ++i) h -= lambda(i) * lifted[i];
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  const Eigen::VectorXd& ev = es.eigenvalues();
  const double shift = ev.maxCoeff();
  Eigen::VectorXd w = (ev.array() - shift).exp();
  const double zt = w.sum();
  Eigen::VectorXd prob = w / zt;

  GibbsPoint out;
  out.log_z = shift + std::log(zt);
  out.psi = es.eigenvectors() * prob.cast<cdouble>().asDiagonal() * es.eigenvectors().adjoint();
  out.psi = 0.5 * (out.psi + out.psi.adjoint().eval());
  out.entropy = 0.0;
  for (int a = 0; a < dim; ++a)
    if (prob(a) > 1e-300) out.entropy -= prob(a) * std::log(prob(a));

  std::vector<Matrix> gt(n);
  out.g.resize(n);
  for (int i = 0; i < n; ++i) {
    gt[i] = es.eigenvectors().adjoint() * lifted[i] * es.eigenvectors();
    out.g(i) = (gt[i].diagonal().real().array() * prob.array()).sum();
  }
  if (!with_covariance) return out;

  Eigen::MatrixXd phi(dim, dim);  // (w_a - w_b)/((h_a - h_b) zt), diag w_a/zt
  for (int a = 0; a < dim; ++a)
    for (int b = 0; b < dim; ++b) {
      const double dh = ev(a) - ev(b);
      phi(a, b) = std::abs(dh) < 1e-12 ? prob(a) : (w(a) - w(b)) / (dh * zt);
    }
  out.covariance.resize(n, n);
  for (int i = 0; i < n; ++i)
    for (int k = i; k < n; ++k) {
      double s = 0.0;
      for (int a = 0; a < dim; ++a)
        for (int b = 0; b < dim; ++b)
          s += (gt[i](a, b) * gt[k](b, a)).real() * phi(a, b);
      s -= out.g(i) * out.g(k);
      out.covariance(i, k) = s;
      out.covariance(k, i) = s;
    }
  return out;
}

}  // namespace detail

/// Newton iteration on the Lagrange multipliers for the maximum-entropy
/// assignment under tr(O_i channel[psi]) = targets_i. The dual problem is
/// convex; the Jacobian is the (PSD) covariance matrix of the lifted
/// observables, with Armijo backtracking on ||F||^2 and a trust cap on
/// ||lambda|| for near-pure targets.
inline MepSolution mep_generic(const CoarseGrainingChannel& ch,
                               const std::vector<Matrix>& observables,
                               const Eigen::VectorXd& targets, const MepOptions& opt = {}) {
  const int n = static_cast<int>(observables.size());
  if (targets.size() != n)
    throw std::invalid_argument("mep_generic: observables/targets size mismatch");
  std::vector<Matrix> lifted(n);
  for (int i = 0; i < n; ++i) lifted[i] = ch.dual(observables[i]);

  const double cap = opt.multiplier_cap_scale * ch.in_dim();
  Eigen::VectorXd lambda = Eigen::VectorXd::Zero(n);
  detail::GibbsPoint pt = detail::gibbs_point(lifted, lambda, true);
  Eigen::VectorXd f = pt.g - targets;
  bool hit_cap = false;
  int iter = 0;
  std::string status = "max-iterations";

  for (; iter < opt.max_iter; ++iter) {
    if (f.cwiseAbs().maxCoeff() <= opt.tol) {
      status = "converged";
      break;
    }
    Eigen::MatrixXd jac = pt.covariance;
    const double ridge = 1e-14 * std::max(1.0, jac.diagonal().maxCoeff());
    jac.diagonal().array() += ridge;
    Eigen::VectorXd step = jac.ldlt().solve(f);

    double alpha = 1.0;
    const double f2 = f.squaredNorm();
    Eigen::VectorXd lambda_new;
    detail::GibbsPoint pt_new;
    Eigen::VectorXd f_new;
    bool improved = false;
    for (int ls = 0; ls < 45; ++ls) {
      lambda_new = lambda + alpha * step;
      if (lambda_new.norm() > cap) {
        lambda_new *= cap / lambda_new.norm();
        hit_cap = true;
      }
      pt_new = detail::gibbs_point(lifted, lambda_new, true);
      f_new = pt_new.g - targets;
      if (f_new.squaredNorm() <= (1.0 - 1e-4 * alpha) * f2) {
        improved = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!improved || (lambda_new - lambda).norm() <= 1e-15 * (1.0 + lambda.norm())) {
      lambda = lambda_new;
      pt = pt_new;
      f = f_new;
      ++iter;
      status = f.cwiseAbs().maxCoeff() <= opt.tol
                   ? "converged"
                   : (hit_cap ? "boundary" : "infeasible-targets");
      break;
    }
    lambda = lambda_new;
    pt = pt_new;
    f = f_new;
  }
  if (status == "max-iterations" && f.cwiseAbs().maxCoeff() <= opt.tol) status = "converged";

  MepSolution sol{DensityMatrix::from_matrix(pt.psi), lambda,       pt.entropy,
                  f.cwiseAbs().maxCoeff(),            iter,         status == "converged",
                  status,                             pt.log_z};
  return sol;
}

/// MEP for a tomographically known effective qubit state rho.
inline MepSolution mep_qubit_targets(const CoarseGrainingChannel& ch, const DensityMatrix& rho,
                                     const MepOptions& opt = {}) {
  if (rho.dim() != 2) throw std::invalid_argument("mep_qubit_targets: expected a qubit state");
  const BlochVector b = bloch_of(rho.matrix());
  Eigen::VectorXd t(3);
  t << b.x, b.y, b.z;
  return mep_generic(ch, qubit_tomographic_observables(), t, opt);
}

// --- Blurred-and-saturated detector fast path ------------------------------

/// Closed-form matrix elements of exp(-sum lambda_i dual[sigma_i])/Z for the
/// blurred-and-saturated map, as functions of the multipliers.
struct BnsMepElements {
  cdouble circ, tri;
  double sq, dia, z;
};

inline BnsMepElements bns_mep_elements(const Eigen::Vector3d& lambda) {
  const double lam = lambda.norm();
  const double ch = std::cosh(lam);
  const double shl = lam < 1e-8 ? 1.0 + lam * lam / 6.0 : std::sinh(lam) / lam;  // sinh(x)/x
  const double ez = std::exp(lambda(2));
  const double z = 2.0 * (ch + ez);
  BnsMepElements e;
  e.z = z;
  e.circ = (ch - lambda(2) * shl) / z;
  e.tri = -cdouble(lambda(0), -lambda(1)) * shl / (std::sqrt(3.0) * z);
  e.sq = (lambda(2) * shl - ez + ch) / (3.0 * z);
  e.dia = (1.0 - e.circ.real()) / 3.0;
  return e;
}

inline Matrix bns_mep_state_matrix(const Eigen::Vector3d& lambda) {
  const BnsMepElements e = bns_mep_elements(lambda);
  return detail::bns_pattern(e.circ, e.tri, e.dia, e.sq);
}

/// MEP assignment for the blurred-and-saturated map via the closed-form
/// elements; the three multipliers solve a transcendental system, handled
/// by a damped Newton iteration with a finite-difference Jacobian.
inline MepSolution mep_bns(const DensityMatrix& rho, double tol = 1e-10) {
  if (rho.dim() != 2) throw std::invalid_argument("mep_bns: expected a qubit state");
  const double cap = 50.0 * 4.0;
  Eigen::Vector3d target;
  target << rho(0, 0).real(), rho(0, 1).real(), -rho(0, 1).imag();  // rho01 = (x-iy)/2 scale

  auto constraint_gap = [&](const Eigen::Vector3d& lam) {
    const BnsMepElements e = bns_mep_elements(lam);
    // channel output: [0,0] = circ, [0,1] = sqrt3 * tri
    return Eigen::Vector3d(e.circ.real() - target(0),
                           std::sqrt(3.0) * e.tri.real() - target(1),
                           std::sqrt(3.0) * e.tri.imag() + target(2));
  };

  Eigen::Vector3d lambda = Eigen::Vector3d::Zero();
  Eigen::Vector3d f = constraint_gap(lambda);
  int iter = 0;
  bool hit_cap = false;
  std::string status = "max-iterations";
  for (; iter < 200; ++iter) {
    if (f.cwiseAbs().maxCoeff() <= tol) {
      status = "converged";
      break;
    }
    Eigen::Matrix3d jac;
    const double step_h = 1e-7 * (1.0 + lambda.norm());
    for (int k = 0; k < 3; ++k) {
      Eigen::Vector3d lp = lambda, lm = lambda;
      lp(k) += step_h;
      lm(k) -= step_h;
      jac.col(k) = (constraint_gap(lp) - constraint_gap(lm)) / (2.0 * step_h);
    }
    Eigen::Vector3d step = jac.fullPivLu().solve(-f);
    double alpha = 1.0;
    const double f2 = f.squaredNorm();
    Eigen::Vector3d lambda_new = lambda;
    Eigen::Vector3d f_new = f;
    bool improved = false;
    for (int ls = 0; ls < 45; ++ls) {
      lambda_new = lambda + alpha * step;
      if (lambda_new.norm() > cap) {
        lambda_new *= cap / lambda_new.norm();
        hit_cap = true;
      }
      f_new = constraint_gap(lambda_new);
      if (f_new.squaredNorm() <= (1.0 - 1e-4 * alpha) * f2) {
        improved = true;
        break;
      }
      alpha *= 0.5;
    }
    const bool stalled = (lambda_new - lambda).norm() <= 1e-15 * (1.0 + lambda.norm());
    lambda = lambda_new;
    f = f_new;
    if (!improved || stalled) {
      ++iter;
      status = f.cwiseAbs().maxCoeff() <= tol ? "converged"
                                              : (hit_cap ? "boundary" : "infeasible-targets");
      break;
    }
  }
  if (status == "max-iterations" && f.cwiseAbs().maxCoeff() <= tol) status = "converged";

  Matrix psi = bns_mep_state_matrix(lambda);
  DensityMatrix state = DensityMatrix::from_matrix(std::move(psi));
  const double residual = trace_norm(detail::bns_apply_compact(state.matrix()) - rho.matrix());
  const double entropy = von_neumann_entropy(state.matrix());
  return MepSolution{std::move(state),
                     Eigen::VectorXd(lambda),
                     entropy,
                     residual,
                     iter,
                     status == "converged",
                     status,
                     std::log(bns_mep_elements(lambda).z)};
}

// --- Brillouin machinery for the SU(2) channel ------------------------------

/// Brillouin function of order j:
/// B_j(x) = (1/j) [ (j+1/2) coth((j+1/2)x/j) - (1/2) coth(x/(2j)) ].
inline double brillouin(double j, double lambda) {
  two_j_of(j);
  if (std::abs(lambda) < 1e-5) return (j + 1.0) * lambda / (3.0 * j);
  auto coth = [](double x) {
    if (std::abs(x) > 350.0) return x > 0 ? 1.0 : -1.0;
    return 1.0 / std::tanh(x);
  };
  const double a = (j + 0.5) / j;
  return (1.0 / j) * ((j + 0.5) * coth(a * lambda) - 0.5 * coth(lambda / (2.0 * j)));
}

inline double brillouin_derivative(double j, double lambda) {
  if (std::abs(lambda) < 1e-5) return (j + 1.0) / (3.0 * j);
  auto csch2 = [](double x) {
    const double ax = std::abs(x);
    if (ax > 350.0) return 0.0;
    const double s = std::sinh(x);
    return 1.0 / (s * s);
  };
  const double a = (j + 0.5) / j;
  return (csch2(lambda / (2.0 * j)) / 4.0 -
          (j + 0.5) * (j + 0.5) * csch2(a * lambda)) /
         (j * j);
}

/// Inverse of the Brillouin function on (-1, 1): bracketed Newton.
inline double brillouin_inverse(double j, double r, double tol = 1e-12) {
  two_j_of(j);
  if (std::abs(r) >= 1.0 - 1e-12)
    throw std::invalid_argument("brillouin_inverse: |r| too close to 1 (multiplier diverges)");
  if (r == 0.0) return 0.0;
  const double sign = r > 0 ? 1.0 : -1.0;
  const double ra = std::abs(r);
  double lo = 0.0, hi = 3.0 * j * ra / (j + 1.0) + 1.0;
  while (brillouin(j, hi) < ra) hi *= 2.0;
  double x = 3.0 * j * ra / (j + 1.0);
  for (int iter = 0; iter < 200; ++iter) {
    const double f = brillouin(j, x) - ra;
    if (std::abs(f) <= tol) return sign * x;
    (f > 0 ? hi : lo) = x;
    const double d = brillouin_derivative(j, x);
    double x_new = d > 0 ? x - f / d : 0.5 * (lo + hi);
    if (x_new <= lo || x_new >= hi) x_new = 0.5 * (lo + hi);
    x = x_new;
  }
  return sign * x;
}

/// MEP assignment for the SU(2)-preserving channel: the state is diagonal in
/// the J_rhat basis with p_m proportional to exp(lambda m / j), where
/// lambda = B_j^{-1}(r); the multiplier vector is anti-aligned with rhat.
inline MepSolution mep_su2(double j, const BlochVector& b, double tol = 1e-10) {
  const SpinOperators ops = angular_momentum(j);
  const double r = b.norm();
  if (r > 1.0 + 1e-12) throw std::invalid_argument("mep_su2: |r| exceeds 1");

  Eigen::VectorXd p(ops.dim);
  double lambda_mag = 0.0;
  std::string status = "converged";
  if (r < 1e-12) {
    p.setConstant(1.0 / ops.dim);
  } else if (r >= 1.0 - 1e-12) {
    p.setZero();
    p(0) = 1.0;
    lambda_mag = 50.0 * ops.dim;  // exact solution is the lambda -> inf limit
    status = "boundary";
  } else {
    lambda_mag = brillouin_inverse(j, r, tol);
    Eigen::VectorXd expo(ops.dim);
    for (int k = 0; k < ops.dim; ++k) expo(k) = lambda_mag * (j - k) / j;
    const double mx = expo.maxCoeff();
    p = (expo.array() - mx).exp();
    p /= p.sum();
  }

  Matrix m;
  if (r < 1e-12) {
    m = Matrix::Identity(ops.dim, ops.dim) / ops.dim;
  } else {
    const double theta = std::acos(std::clamp(b.z / r, -1.0, 1.0));
    const double phi = std::atan2(b.y, b.x);
    const Matrix u = detail::su2_axis_rotation(ops, theta, phi);
    m = u * p.cast<cdouble>().asDiagonal() * u.adjoint();
    m = 0.5 * (m + m.adjoint().eval());
  }
  DensityMatrix state = DensityMatrix::from_matrix(std::move(m));

  Eigen::VectorXd multipliers = Eigen::VectorXd::Zero(3);
  if (r > 1e-12) {
    multipliers << -lambda_mag * b.x / r, -lambda_mag * b.y / r, -lambda_mag * b.z / r;
  }
  const double vx = (state.matrix() * ops.jx).trace().real() / j;
  const double vy = (state.matrix() * ops.jy).trace().real() / j;
  const double vz = (state.matrix() * ops.jz).trace().real() / j;
  const double residual = std::max({std::abs(vx - b.x), std::abs(vy - b.y), std::abs(vz - b.z)});

  double log_z = std::log(static_cast<double>(ops.dim));
  if (r > 1e-12 && r < 1.0 - 1e-12) {
    // Z = sinh((j+1/2) lambda / j) / sinh(lambda / (2j))
    auto log_sinh = [](double x) {
      return x > 20.0 ? x - std::log(2.0) + std::log1p(-std::exp(-2.0 * x))
                      : std::log(std::sinh(x));
    };
    log_z = log_sinh((j + 0.5) * lambda_mag / j) - log_sinh(lambda_mag / (2.0 * j));
  } else if (r >= 1.0 - 1e-12) {
    log_z = 0.0;
  }

  MepSolution sol{std::move(state), multipliers, 0.0, residual, 1, status == "converged",
                  status, log_z};
  sol.entropy = 0.0;
  for (int k = 0; k < ops.dim; ++k)
    if (p(k) > 1e-300) sol.entropy -= p(k) * std::log(p(k));
  return sol;
}

}  // namespace cginfer
