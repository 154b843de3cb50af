#pragma once

#include <boost/multiprecision/mpfr.hpp>

#include <utility>
#include <vector>

namespace cginfer::detail {

using BigFloat = boost::multiprecision::mpfr_float;

/// Value at x of the single B-spline basis function spanned by the full
/// knot vector t (Cox-de Boor, degree = t.size() - 2). All combinations in
/// the recursion are nonnegative, so the tail values keep full relative
/// accuracy at the working precision.
inline BigFloat bspline_basis(const std::vector<BigFloat>& t, const BigFloat& x) {
  const int n = static_cast<int>(t.size());
  const int degree = n - 2;
  if (x < t.front() || x > t.back()) return BigFloat(0);
  std::vector<BigFloat> b(n - 1);
  for (int i = 0; i < n - 1; ++i) b[i] = (t[i] <= x && x < t[i + 1]) ? 1 : 0;
  if (x == t.back()) {
    for (int i = n - 2; i >= 0; --i)
      if (t[i] < t.back()) {
        b[i] = 1;
        break;
      }
  }
  for (int q = 1; q <= degree; ++q)
    for (int i = 0; i + q < n - 1; ++i) {
      BigFloat acc(0);
      if (t[i + q] != t[i]) acc += (x - t[i]) / (t[i + q] - t[i]) * b[i];
      if (t[i + q + 1] != t[i + 1]) acc += (t[i + q + 1] - x) / (t[i + q + 1] - t[i + 1]) * b[i + 1];
      b[i] = std::move(acc);
    }
  return b[0];
}

/// Derivative of the same basis function:
/// p [ B_{0,p-1}/(t_p - t_0) - B_{1,p-1}/(t_{p+1} - t_1) ].
inline BigFloat bspline_basis_derivative(const std::vector<BigFloat>& t, const BigFloat& x) {
  const int n = static_cast<int>(t.size());
  const int degree = n - 2;
  if (degree < 1) return BigFloat(0);
  const std::vector<BigFloat> lo(t.begin(), t.end() - 1);
  const std::vector<BigFloat> hi(t.begin() + 1, t.end());
  BigFloat out(0);
  if (t[degree] != t[0]) out += bspline_basis(lo, x) / (t[degree] - t[0]);
  if (t[n - 1] != t[1]) out -= bspline_basis(hi, x) / (t[n - 1] - t[1]);
  return degree * out;
}

/// Gauss-Legendre nodes and weights on [-1, 1], computed at the current
/// default mpfr precision (Newton on the Legendre recurrence).
inline std::pair<std::vector<BigFloat>, std::vector<BigFloat>> gauss_legendre(int n) {
  std::vector<BigFloat> nodes(n), weights(n);
  const long prec_bits = static_cast<long>(BigFloat::default_precision() * 3.33) + 4;
  const BigFloat tol = pow(BigFloat(2), -(prec_bits - 8));
  for (int i = 1; i <= n; ++i) {
    BigFloat x(std::cos(3.14159265358979323846 * (i - 0.25) / (n + 0.5)));
    BigFloat dp(1);
    for (int iter = 0; iter < 200; ++iter) {
      BigFloat p0(1), p1 = x;
      for (int k = 2; k <= n; ++k) {
        BigFloat p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = std::move(p1);
        p1 = std::move(p2);
      }
      dp = n * (x * p1 - p0) / (x * x - 1);
      const BigFloat dx = p1 / dp;
      x -= dx;
      if (abs(dx) < tol) {
        p0 = 1;
        p1 = x;
        for (int k = 2; k <= n; ++k) {
          BigFloat p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
          p0 = std::move(p1);
          p1 = std::move(p2);
        }
        dp = n * (x * p1 - p0) / (x * x - 1);
        break;
      }
    }
    nodes[i - 1] = x;
    weights[i - 1] = 2 / ((1 - x * x) * dp * dp);
  }
  return {std::move(nodes), std::move(weights)};
}

}  // namespace cginfer::detail
