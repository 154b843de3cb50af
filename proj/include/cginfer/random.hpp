#pragma once

#include <cstdint>
#include <numbers>
#include <random>

#include "cginfer/linalg.hpp"

namespace cginfer {

/// Seeded generator. Gaussian/uniform variates are produced by fixed
/// arithmetic on the raw mt19937_64 stream, so a seed pins every draw
/// bit-for-bit. Not shared between threads; parallel code gives each
/// worker its own instance seeded base_seed + worker_index.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  /// Uniform in [0, 1) with 53-bit resolution.
  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  /// Standard normal (Box-Muller, pairwise).
  double gaussian() {
    if (have_cached_) {
      have_cached_ = false;
      return cached_;
    }
    double u1;
    do {
      u1 = uniform();
    } while (u1 <= 0.0);
    const double rad = std::sqrt(-2.0 * std::log(u1));
    const double ang = 2.0 * std::numbers::pi * uniform();
    cached_ = rad * std::sin(ang);
    have_cached_ = true;
    return rad * std::cos(ang);
  }

  cdouble complex_gaussian() {
    const double re = gaussian();
    return {re, gaussian()};
  }

  std::uint64_t raw() { return eng_(); }

 private:
  std::mt19937_64 eng_;
  bool have_cached_ = false;
  double cached_ = 0.0;
};

/// Haar-random pure state: D independent standard complex Gaussians,
/// normalized.
inline PureState haar_pure(int dim, Rng& rng) {
  if (dim < 1) throw std::invalid_argument("haar_pure: dim must be >= 1");
  Vector c(dim);
  for (int i = 0; i < dim; ++i) c(i) = rng.complex_gaussian();
  c /= c.norm();
  return PureState{std::move(c)};
}

/// Induced mixed state: Haar pure state on dim*env_dim, environment traced
/// out. env_dim = 1 reproduces pure draws (rank-1 output).
inline Matrix induced_mixed_matrix(int dim, int env_dim, Rng& rng) {
  if (dim < 1 || env_dim < 1)
    throw std::invalid_argument("induced_mixed: dimensions must be >= 1");
  Matrix c(dim, env_dim);
  double n2 = 0.0;
  for (int i = 0; i < dim; ++i)
    for (int k = 0; k < env_dim; ++k) {
      c(i, k) = rng.complex_gaussian();
      n2 += std::norm(c(i, k));
    }
  c /= std::sqrt(n2);
  return c * c.adjoint();
}

inline DensityMatrix induced_mixed(int dim, int env_dim, Rng& rng) {
  Matrix rho = induced_mixed_matrix(dim, env_dim, rng);
  rho = 0.5 * (rho + rho.adjoint().eval());
  return DensityMatrix::from_matrix(std::move(rho));
}

/// Uniform point in the solid Bloch ball (density 3/(4 pi)).
inline BlochVector uniform_bloch_ball(Rng& rng) {
  double x, y, z, n2;
  do {
    x = rng.gaussian();
    y = rng.gaussian();
    z = rng.gaussian();
    n2 = x * x + y * y + z * z;
  } while (n2 < 1e-300);
  const double r = std::cbrt(rng.uniform()) / std::sqrt(n2);
  return BlochVector{x * r, y * r, z * r};
}

}  // namespace cginfer
