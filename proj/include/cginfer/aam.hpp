#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <map>
#include <mutex>
#include <set>
#include <string>
#include <vector>

#include "cginfer/bspline.hpp"
#include "cginfer/channel.hpp"
#include "cginfer/linalg.hpp"
#include "cginfer/montecarlo.hpp"
#include "cginfer/random.hpp"

namespace cginfer {

/// The |rho01|^2 / rho00 entries blow up as rho00 -> 0; rho00 = 0 forces
/// rho01 = 0 by positivity, so near-zero rho00 with finite rho01 is noise.
inline constexpr double kDivisionFloor = 1e-9;

struct SingularEffectiveState : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct AssignmentResult {
  DensityMatrix state;
  std::string method;  // "aam-pure" | "aam-mixed" | "mep"
  double residual;     // || channel[state] - rho ||_1
  int prior_env_dim;   // 1 for the pure prior
};

/// A_trE[rho] = rho (x) I/dE, for any unitarily invariant prior.
inline AssignmentResult aam_partial_trace(const DensityMatrix& rho, int env_dim) {
  if (env_dim < 1) throw std::invalid_argument("aam_partial_trace: env_dim must be >= 1");
  Matrix out = kron(rho.matrix(), Matrix::Identity(env_dim, env_dim) / env_dim);
  DensityMatrix state = DensityMatrix::from_matrix(std::move(out));
  const double res =
      trace_distance(partial_trace(state.matrix(), rho.dim(), env_dim, Subsystem::Second),
                     rho.matrix()) * 2.0;
  return AssignmentResult{std::move(state), "aam-pure", res, 1};
}

namespace detail {

inline Matrix bns_pattern(cdouble circ, cdouble tri, double dia, double sq) {
  Matrix m(4, 4);
  m(0, 0) = circ;
  for (int i = 1; i < 4; ++i) {
    m(0, i) = tri;
    m(i, 0) = std::conj(tri);
    m(i, i) = dia;
    for (int k = 1; k < 4; ++k)
      if (k != i) m(i, k) = sq;
  }
  return m;
}

inline AssignmentResult bns_assignment(const DensityMatrix& rho, double sq,
                                       const std::string& method, int env_dim) {
  const cdouble r01 = rho(0, 1);
  Matrix m = bns_pattern(rho(0, 0), r01 / std::sqrt(3.0), rho(1, 1).real() / 3.0, sq);
  DensityMatrix state = DensityMatrix::from_matrix(std::move(m));
  const double res = trace_norm(bns_apply_compact(state.matrix()) - rho.matrix());
  return AssignmentResult{std::move(state), method, res, env_dim};
}

}  // namespace detail

/// Pure-prior average assignment for the blurred-and-saturated map:
/// square entries |rho01|^2/(2 rho00) - rho11/6.
inline AssignmentResult aam_bns_pure(const DensityMatrix& rho) {
  if (rho.dim() != 2) throw std::invalid_argument("aam_bns_pure: expected a qubit state");
  const double r00 = rho(0, 0).real();
  if (r00 < kDivisionFloor)
    throw SingularEffectiveState("aam_bns_pure: rho00 below the division floor");
  const double sq = std::norm(rho(0, 1)) / (2.0 * r00) - rho(1, 1).real() / 6.0;
  return detail::bns_assignment(rho, sq, "aam-pure", 1);
}

/// Mixed-prior (environment dimension env_dim) average assignment; env_dim = 1
/// reproduces the pure-prior result exactly.
inline AssignmentResult aam_bns_mixed(const DensityMatrix& rho, int env_dim) {
  if (rho.dim() != 2) throw std::invalid_argument("aam_bns_mixed: expected a qubit state");
  if (env_dim < 1) throw std::invalid_argument("aam_bns_mixed: env_dim must be >= 1");
  const double r00 = rho(0, 0).real();
  if (r00 < kDivisionFloor)
    throw SingularEffectiveState("aam_bns_mixed: rho00 below the division floor");
  const double de = env_dim;
  const double sq = de / (3.0 * de - 1.0) * std::norm(rho(0, 1)) / r00 -
                    rho(1, 1).real() / (3.0 * (3.0 * de - 1.0));
  return detail::bns_assignment(rho, sq, env_dim == 1 ? "aam-pure" : "aam-mixed", env_dim);
}

/// env_dim -> infinity limit of the mixed-prior assignment.
inline AssignmentResult aam_bns_mixed_limit(const DensityMatrix& rho) {
  if (rho.dim() != 2) throw std::invalid_argument("aam_bns_mixed_limit: expected a qubit state");
  const double r00 = rho(0, 0).real();
  if (r00 < kDivisionFloor)
    throw SingularEffectiveState("aam_bns_mixed_limit: rho00 below the division floor");
  const double sq = std::norm(rho(0, 1)) / (3.0 * r00) - rho(1, 1).real() / 9.0;
  return detail::bns_assignment(rho, sq, "aam-mixed", -1);
}

/// Trace distance between the mixed(env_dim) and pure BnS assignments:
/// (dE - 1)(1 - r^2) / (2 (3 dE - 1)(1 + z)).
inline double bns_prior_distance(const BlochVector& b, int env_dim) {
  if (env_dim < 1) throw std::invalid_argument("bns_prior_distance: env_dim must be >= 1");
  if (1.0 + b.z < kDivisionFloor)
    throw SingularEffectiveState("bns_prior_distance: state at the z = -1 pole");
  const double de = env_dim;
  const double r2 = b.x * b.x + b.y * b.y + b.z * b.z;
  return (de - 1.0) * (1.0 - r2) / (2.0 * (3.0 * de - 1.0) * (1.0 + b.z));
}

inline double bns_prior_distance_support(int env_dim) {
  const double de = env_dim;
  return (de - 1.0) / (3.0 * de - 1.0);  // = 2a
}

/// Density of the prior distance over the uniform Bloch ball:
/// 3 (delta - 2a)^2 / (8 a^3) on [0, 2a], a = (dE-1)/(2(3dE-1)).
inline double bns_prior_distance_pdf(double delta, int env_dim) {
  if (env_dim < 2)
    throw std::invalid_argument("bns_prior_distance_pdf: degenerate for env_dim < 2");
  const double a = 0.5 * bns_prior_distance_support(env_dim);
  if (delta < 0.0 || delta > 2.0 * a) return 0.0;
  const double d = delta - 2.0 * a;
  return 3.0 * d * d / (8.0 * a * a * a);
}

inline double bns_prior_distance_cdf(double delta, int env_dim) {
  if (env_dim < 2)
    throw std::invalid_argument("bns_prior_distance_cdf: degenerate for env_dim < 2");
  const double a = 0.5 * bns_prior_distance_support(env_dim);
  if (delta <= 0.0) return 0.0;
  if (delta >= 2.0 * a) return 1.0;
  const double d = delta - 2.0 * a;
  return 1.0 + d * d * d / (8.0 * a * a * a);
}

// ---------------------------------------------------------------------------
// Lambda_J average assignment, deterministic path.
//
// The assignment is diagonal in the J_rhat eigenbasis with weights p_m(r)
// obtained from a ratio of Fourier/Laplace-inverted Gaussian integrals. In
// real space the ratio reduces to B-spline algebra: with m_N the (unit-order)
// Cox-de Boor basis function over the knot multiset {m/j, each repeated dE}
// and m_n the one with an extra knot at n/j,
//
//   p_m(r) = (dE r / 2) (M-1)^-1 sum_n Q_mn(r) / m_N'(r),   M = D dE,
//   Q_mn(r) = int_{-1}^{1} w_mn(u) m_n''(r u) du,
//   w_mn(u) = |<m| exp(-i theta Jy) |n>|^2,  u = cos theta,
//
// where Q is evaluated by parts twice so only m_n and one-sided m_n' appear.
// The integrals cancel down to the B-spline tail scale, so everything runs
// in MPFR with precision picked from the magnitude of m_N'(r); the Wigner
// weights are exact rational polynomials in u.
// ---------------------------------------------------------------------------

enum class PmMethod { Quadrature, MonteCarlo };

namespace detail {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

inline std::mutex& mpfr_mutex() {
  static std::mutex m;  // mpfr default precision is process-global
  return m;
}

inline BigInt factorial_big(int n) {
  BigInt f = 1;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

inline BigInt binomial_big(int n, int k) {
  return factorial_big(n) / (factorial_big(k) * factorial_big(n - k));
}

/// Exact coefficients (ascending powers of u) of |d^j_{m,n}(theta)|^2 with
/// u = cos theta; row/col indices descending (0 <-> m = j). Degree 2j.
inline std::vector<Rational> wigner_sq_poly(int twoj, int row, int col) {
  const int mp2 = twoj - 2 * row;  // 2 m'
  const int m2 = twoj - 2 * col;   // 2 m
  const BigInt F = factorial_big((twoj + m2) / 2) * factorial_big((twoj - m2) / 2) *
                   factorial_big((twoj + mp2) / 2) * factorial_big((twoj - mp2) / 2);
  struct Term {
    Rational coef;
    int pcos, psin;
  };
  std::vector<Term> terms;
  for (int k = 0; k <= twoj; ++k) {
    const int d1 = (twoj + m2) / 2 - k;
    const int d3 = (twoj - mp2) / 2 - k;
    const int d4 = k + (mp2 - m2) / 2;
    if (d1 < 0 || d3 < 0 || d4 < 0) continue;
    const BigInt den =
        factorial_big(d1) * factorial_big(k) * factorial_big(d3) * factorial_big(d4);
    const int sgn = (((k + (mp2 - m2) / 2) % 2) + 2) % 2 ? -1 : 1;
    terms.push_back(Term{Rational(sgn, den), twoj - 2 * k + (m2 - mp2) / 2,
                         2 * k - (m2 - mp2) / 2});
  }
  std::vector<Rational> poly(twoj + 1, Rational(0));
  for (const Term& t1 : terms)
    for (const Term& t2 : terms) {
      const int a = (t1.pcos + t2.pcos) / 2;
      const int b = (t1.psin + t2.psin) / 2;
      const Rational base =
          t1.coef * t2.coef * Rational(F, BigInt(1) << static_cast<unsigned>(a + b));
      for (int i = 0; i <= a; ++i)
        for (int l = 0; l <= b; ++l) {
          Rational c = base * binomial_big(a, i) * binomial_big(b, l);
          if (l % 2) c = -c;
          poly[i + l] += c;
        }
    }
  return poly;
}

inline std::vector<Rational> poly_derivative(const std::vector<Rational>& p) {
  if (p.size() <= 1) return {Rational(0)};
  std::vector<Rational> out(p.size() - 1);
  for (std::size_t i = 1; i < p.size(); ++i) out[i - 1] = p[i] * static_cast<int>(i);
  return out;
}

inline Rational poly_eval_rational(const std::vector<Rational>& p, int x) {
  Rational acc = 0;
  for (auto it = p.rbegin(); it != p.rend(); ++it) acc = acc * x + *it;
  return acc;
}

struct WignerPolySet {
  // [row][col], each ascending in u
  std::vector<std::vector<std::vector<Rational>>> w, wd, wdd;
};

inline const WignerPolySet& wigner_polys(int twoj) {
  static std::map<int, WignerPolySet> cache;  // guarded by mpfr_mutex
  auto it = cache.find(twoj);
  if (it != cache.end()) return it->second;
  const int dim = twoj + 1;
  WignerPolySet set;
  set.w.resize(dim);
  set.wd.resize(dim);
  set.wdd.resize(dim);
  for (int r = 0; r < dim; ++r) {
    set.w[r].resize(dim);
    set.wd[r].resize(dim);
    set.wdd[r].resize(dim);
    for (int c = 0; c < dim; ++c) {
      set.w[r][c] = wigner_sq_poly(twoj, r, c);
      set.wd[r][c] = poly_derivative(set.w[r][c]);
      set.wdd[r][c] = poly_derivative(set.wd[r][c]);
    }
  }
  return cache.emplace(twoj, std::move(set)).first->second;
}

inline BigFloat to_bigfloat(const Rational& q) {
  return BigFloat(numerator(q).str()) / BigFloat(denominator(q).str());
}

inline void set_precision_bits(long bits) {
  BigFloat::default_precision(static_cast<unsigned>(bits * 0.30103) + 4);
}

inline long exponent_of(const BigFloat& x) {
  if (x == 0) return -1000000;
  return static_cast<long>(mpfr_get_exp(x.backend().data()));
}

struct Su2PmContext {
  int twoj, dim, env_dim, big_m;
  std::vector<BigFloat> nu;      // descending knot values m/j
  std::vector<BigFloat> knots_n;  // sorted, each value repeated env_dim times
  BigFloat r;

  Su2PmContext(int twoj_, int env_dim_, double r_) : twoj(twoj_), dim(twoj_ + 1), env_dim(env_dim_) {
    big_m = dim * env_dim;
    nu.resize(dim);
    for (int k = 0; k < dim; ++k) nu[k] = BigFloat(twoj - 2 * k) / twoj;
    knots_n.reserve(big_m);
    for (int k = dim - 1; k >= 0; --k)
      for (int c = 0; c < env_dim; ++c) knots_n.push_back(nu[k]);
    r = BigFloat(r_);
  }
};

/// Deterministic p_m (descending m) for the Lambda_J average assignment.
/// Caller holds mpfr_mutex.
inline Eigen::VectorXd su2_pm_impl(double j, int env_dim, double r, double tol) {
  const int twoj = two_j_of(j);
  const int dim = twoj + 1;

  // magnitude probe to size the working precision
  set_precision_bits(256);
  long tail_exp;
  {
    Su2PmContext probe(twoj, env_dim, r);
    tail_exp = exponent_of(bspline_basis_derivative(probe.knots_n, probe.r));
  }
  const long extra = tol > 0 ? std::max(0L, static_cast<long>(-std::log2(tol))) : 24;
  const long bits = 192 + std::max(0L, -tail_exp) + extra;
  if (bits > 60000)
    throw std::runtime_error("aam_su2_pm: required precision out of range (r too extreme)");
  set_precision_bits(bits);

  Su2PmContext ctx(twoj, env_dim, r);
  const int big_m = ctx.big_m;
  const BigFloat nn_prime = bspline_basis_derivative(ctx.knots_n, ctx.r);
  if (nn_prime == 0)
    throw std::runtime_error("aam_su2_pm: vanishing norm derivative");

  const WignerPolySet& wp = wigner_polys(twoj);

  // Wigner polynomials and endpoint data at working precision
  std::vector<std::vector<std::vector<BigFloat>>> wdd(dim);
  std::vector<std::vector<BigFloat>> w1(dim), wm1(dim), wp1(dim), wpm1(dim);
  for (int mi = 0; mi < dim; ++mi) {
    wdd[mi].resize(dim);
    w1[mi].resize(dim);
    wm1[mi].resize(dim);
    wp1[mi].resize(dim);
    wpm1[mi].resize(dim);
    for (int ni = 0; ni < dim; ++ni) {
      wdd[mi][ni].resize(wp.wdd[mi][ni].size());
      for (std::size_t c = 0; c < wp.wdd[mi][ni].size(); ++c)
        wdd[mi][ni][c] = to_bigfloat(wp.wdd[mi][ni][c]);
      w1[mi][ni] = to_bigfloat(poly_eval_rational(wp.w[mi][ni], 1));
      wm1[mi][ni] = to_bigfloat(poly_eval_rational(wp.w[mi][ni], -1));
      wp1[mi][ni] = to_bigfloat(poly_eval_rational(wp.wd[mi][ni], 1));
      wpm1[mi][ni] = to_bigfloat(poly_eval_rational(wp.wd[mi][ni], -1));
    }
  }

  const int n_gl = (twoj + big_m) / 2 + 3;
  auto [gx, gw] = gauss_legendre(n_gl);

  std::vector<BigFloat> qsum(dim, BigFloat(0));
  std::vector<BigFloat> horner(dim);
  for (int ni = 0; ni < dim; ++ni) {
    std::vector<BigFloat> kn = ctx.knots_n;
    kn.insert(std::upper_bound(kn.begin(), kn.end(), ctx.nu[ni]), ctx.nu[ni]);
    const BigFloat npr = bspline_basis_derivative(kn, ctx.r);
    const BigFloat npmr = bspline_basis_derivative(kn, -ctx.r);
    const BigFloat nr = bspline_basis(kn, ctx.r);
    const BigFloat nmr = bspline_basis(kn, -ctx.r);

    std::vector<BigFloat> breaks;
    breaks.push_back(BigFloat(-1));
    for (int k = dim - 1; k >= 0; --k)
      if (abs(ctx.nu[k]) < ctx.r) breaks.push_back(ctx.nu[k] / ctx.r);
    breaks.push_back(BigFloat(1));
    std::sort(breaks.begin(), breaks.end());

    std::vector<BigFloat> integ(dim, BigFloat(0));
    for (std::size_t seg = 0; seg + 1 < breaks.size(); ++seg) {
      const BigFloat mid = (breaks[seg] + breaks[seg + 1]) / 2;
      const BigFloat half = (breaks[seg + 1] - breaks[seg]) / 2;
      for (int q = 0; q < n_gl; ++q) {
        const BigFloat u = mid + half * gx[q];
        const BigFloat nv = bspline_basis(kn, ctx.r * u);
        if (nv == 0) continue;
        const BigFloat wq = half * gw[q] * nv;
        for (int mi = 0; mi < dim; ++mi) {
          BigFloat acc(0);
          const auto& cs = wdd[mi][ni];
          for (auto it = cs.rbegin(); it != cs.rend(); ++it) acc = acc * u + *it;
          qsum[mi] += wq * acc;  // integral part accumulates directly
        }
      }
    }
    for (int mi = 0; mi < dim; ++mi) {
      qsum[mi] += ctx.r * (w1[mi][ni] * npr - wm1[mi][ni] * npmr);
      qsum[mi] -= wp1[mi][ni] * nr - wpm1[mi][ni] * nmr;
    }
  }

  // p_m = (dE r / 2) Q_m / ((M-1) m_N'(r)) with Q_m = qsum_m / r^2
  Eigen::VectorXd p(dim);
  const BigFloat scale = BigFloat(env_dim) / (2 * ctx.r * (big_m - 1) * nn_prime);
  for (int mi = 0; mi < dim; ++mi) p(mi) = static_cast<double>(scale * qsum[mi]);
  return p;
}

}  // namespace detail

/// Weights of the diagonal Lambda_J average assignment in the J_rhat
/// eigenbasis (index 0 <-> m = j), pure prior for env_dim = 1 or the
/// induced mixed prior otherwise. The deterministic path is closed-form
/// B-spline algebra; tol only adds precision headroom.
inline Eigen::VectorXd aam_su2_pm(double j, int env_dim, double r,
                                  PmMethod method = PmMethod::Quadrature, double tol = 1e-7,
                                  Rng* rng = nullptr, double epsilon = 0.025);

namespace detail {

inline Eigen::VectorXd su2_pm_deterministic(double j, int env_dim, double r, double tol) {
  const int twoj = two_j_of(j);
  const int dim = twoj + 1;
  if (env_dim < 1) throw std::invalid_argument("aam_su2_pm: env_dim must be >= 1");
  if (r < 0.0 || r > 1.0 + 1e-12) throw std::invalid_argument("aam_su2_pm: r outside [0, 1]");
  if (dim == 2) {  // identity channel, assignment is the state itself
    Eigen::VectorXd p(2);
    p << 0.5 * (1.0 + r), 0.5 * (1.0 - r);
    return p;
  }
  if (r < 1e-6) return Eigen::VectorXd::Constant(dim, 1.0 / dim);
  if (r > 1.0 - 1e-9) {  // feasible set collapses to |m = j>
    Eigen::VectorXd p = Eigen::VectorXd::Zero(dim);
    p(0) = 1.0;
    return p;
  }
  std::lock_guard<std::mutex> lock(mpfr_mutex());
  return su2_pm_impl(j, env_dim, r, tol);
}

}  // namespace detail

struct PmCurve {
  double j;
  int env_dim;
  std::vector<double> r_grid;
  Eigen::MatrixXd p;  // (2j+1) rows, m descending; one column per grid point
};

inline PmCurve aam_su2_pm_curve(double j, int env_dim, std::vector<double> r_grid,
                                double tol = 1e-7) {
  const int dim = two_j_of(j) + 1;
  PmCurve curve{j, env_dim, std::move(r_grid), Eigen::MatrixXd(dim, 0)};
  curve.p.resize(dim, static_cast<Eigen::Index>(curve.r_grid.size()));
  for (std::size_t i = 0; i < curve.r_grid.size(); ++i)
    curve.p.col(static_cast<Eigen::Index>(i)) =
        detail::su2_pm_deterministic(j, env_dim, curve.r_grid[i], tol);
  return curve;
}

/// Predicted acceptance probability of the epsilon-ball rejection oracle at
/// Bloch radius r (volume of the ball times the density of tr(psi J)/j).
inline double su2_oracle_acceptance_estimate(double j, int env_dim, double r, double epsilon) {
  const int twoj = two_j_of(j);
  if (r <= 0.0 || r >= 1.0)
    throw std::invalid_argument("su2_oracle_acceptance_estimate: r must be in (0, 1)");
  if (twoj + 1 == 2 && env_dim == 1) return 0.0;  // singular prior support
  std::lock_guard<std::mutex> lock(detail::mpfr_mutex());
  detail::set_precision_bits(320);
  detail::Su2PmContext ctx(twoj, env_dim, r);
  const detail::BigFloat npr = detail::bspline_basis_derivative(ctx.knots_n, ctx.r);
  const detail::BigFloat rate = detail::BigFloat(epsilon) * epsilon * epsilon *
                                (ctx.big_m - 1) * (-npr) / (3 * ctx.r);
  return std::max(0.0, static_cast<double>(rate));
}

inline Eigen::VectorXd aam_su2_pm(double j, int env_dim, double r, PmMethod method, double tol,
                                  Rng* rng, double epsilon) {
  if (method == PmMethod::Quadrature) return detail::su2_pm_deterministic(j, env_dim, r, tol);
  if (rng == nullptr)
    throw std::invalid_argument("aam_su2_pm: the Monte Carlo method needs a generator");
  if (r < 0.0 || r > 1.0 + 1e-12) throw std::invalid_argument("aam_su2_pm: r outside [0, 1]");
  const int dim = two_j_of(j) + 1;
  const CoarseGrainingChannel ch = make_su2_channel(j);
  const DensityMatrix rho = qubit_state(BlochVector{0.0, 0.0, std::min(r, 1.0)});
  long long n = 200'000'000;
  if (r > 1e-3 && r < 1.0 - 1e-3 && !(dim == 2 && env_dim == 1)) {
    const double rate = su2_oracle_acceptance_estimate(j, env_dim, r, epsilon);
    if (rate > 0.0) n = std::min<long long>(n, static_cast<long long>(1300.0 / rate) + 1000);
  }
  const SampleEstimate est =
      rejection_estimate(ch, rho, epsilon, env_dim == 1 ? Prior::pure() : Prior::mixed(env_dim),
                         n, rng->raw(), 4);
  return est.mean_state.diagonal().real();
}

namespace detail {

inline Matrix su2_axis_rotation(const SpinOperators& ops, double theta, double phi) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(ops.jy);
  Vector ph(ops.dim);
  for (int k = 0; k < ops.dim; ++k)
    ph(k) = std::exp(cdouble(0.0, -theta * es.eigenvalues()(k)));
  Matrix rot_y = es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint();
  Vector zph(ops.dim);
  for (int k = 0; k < ops.dim; ++k)
    zph(k) = std::exp(cdouble(0.0, -phi * ops.jz(k, k).real()));
  return zph.asDiagonal() * rot_y;
}

}  // namespace detail

/// Full assignment state for Lambda_J: diagonal in the J_rhat basis with
/// weights p_m(|r|); rotationally covariant by construction.
inline AssignmentResult aam_su2_state(double j, int env_dim, const BlochVector& b,
                                      PmMethod method = PmMethod::Quadrature, double tol = 1e-7,
                                      Rng* rng = nullptr, double epsilon = 0.025) {
  const SpinOperators ops = angular_momentum(j);
  const double r = b.norm();
  if (r > 1.0 + 1e-12) throw std::invalid_argument("aam_su2_state: |r| exceeds 1");
  const std::string method_tag = env_dim == 1 ? "aam-pure" : "aam-mixed";
  if (r < 1e-6) {
    DensityMatrix state =
        DensityMatrix::from_matrix(Matrix::Identity(ops.dim, ops.dim) / ops.dim);
    return AssignmentResult{std::move(state), method_tag, 0.0, env_dim};
  }
  Eigen::VectorXd p = aam_su2_pm(j, env_dim, r, method, tol, rng, epsilon);
  p /= p.sum();
  const double theta = std::acos(std::clamp(b.z / r, -1.0, 1.0));
  const double phi = std::atan2(b.y, b.x);
  const Matrix u = detail::su2_axis_rotation(ops, theta, phi);
  Matrix m = u * p.cast<cdouble>().asDiagonal() * u.adjoint();
  m = 0.5 * (m + m.adjoint().eval());
  DensityMatrix state = DensityMatrix::from_matrix(std::move(m));
  const double vx = (state.matrix() * ops.jx).trace().real() / j;
  const double vy = (state.matrix() * ops.jy).trace().real() / j;
  const double vz = (state.matrix() * ops.jz).trace().real() / j;
  const double res =
      std::sqrt((vx - b.x) * (vx - b.x) + (vy - b.y) * (vy - b.y) + (vz - b.z) * (vz - b.z));
  return AssignmentResult{std::move(state), method_tag, res, env_dim};
}

}  // namespace cginfer
