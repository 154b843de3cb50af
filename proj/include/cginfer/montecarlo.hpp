#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <thread>
#include <vector>

#include "cginfer/channel.hpp"
#include "cginfer/linalg.hpp"
#include "cginfer/random.hpp"

namespace cginfer {

struct ZeroAcceptance : std::runtime_error {
  double acceptance_upper_bound;
  ZeroAcceptance(const std::string& what, double bound)
      : std::runtime_error(what), acceptance_upper_bound(bound) {}
};

struct Prior {
  enum class Kind { Pure, Mixed };
  Kind kind = Kind::Pure;
  int env_dim = 1;

  static Prior pure() { return Prior{Kind::Pure, 1}; }
  static Prior mixed(int env_dim) {
    if (env_dim < 1) throw std::invalid_argument("Prior::mixed: env_dim must be >= 1");
    return Prior{Kind::Mixed, env_dim};
  }
};

/// Empirical average over the accepted epsilon-ball samples. Standard
/// errors are tracked separately for real and imaginary parts.
struct SampleEstimate {
  Matrix mean_state;
  long long n_proposed = 0;
  long long n_accepted = 0;
  double epsilon = 0.0;
  Eigen::MatrixXd stderr_re, stderr_im;
  std::uint64_t seed = 0;

  double acceptance_rate() const {
    return n_proposed > 0 ? static_cast<double>(n_accepted) / n_proposed : 0.0;
  }
  DensityMatrix state() const {
    Matrix m = 0.5 * (mean_state + mean_state.adjoint());
    m /= m.trace().real();
    return DensityMatrix::from_matrix(std::move(m));
  }
};

namespace detail {

struct RejectionAccumulator {
  Matrix sum;
  Eigen::MatrixXd sum_re2, sum_im2;
  long long accepted = 0;

  explicit RejectionAccumulator(int dim)
      : sum(Matrix::Zero(dim, dim)),
        sum_re2(Eigen::MatrixXd::Zero(dim, dim)),
        sum_im2(Eigen::MatrixXd::Zero(dim, dim)) {}

  void add(const Matrix& rho) {
    sum += rho;
    sum_re2 += rho.real().cwiseProduct(rho.real());
    sum_im2 += rho.imag().cwiseProduct(rho.imag());
    ++accepted;
  }
  void merge(const RejectionAccumulator& o) {
    sum += o.sum;
    sum_re2 += o.sum_re2;
    sum_im2 += o.sum_im2;
    accepted += o.accepted;
  }
};

inline void rejection_worker(const CoarseGrainingChannel& ch, const Matrix& target,
                             double epsilon, int env_dim, long long n, std::uint64_t seed,
                             RejectionAccumulator& acc) {
  const int dim = ch.in_dim();
  Rng rng(seed);
  Matrix c(dim, env_dim);
  Matrix rho_fine(dim, dim);
  for (long long it = 0; it < n; ++it) {
    double n2 = 0.0;
    for (int i = 0; i < dim; ++i)
      for (int k = 0; k < env_dim; ++k) {
        c(i, k) = rng.complex_gaussian();
        n2 += std::norm(c(i, k));
      }
    c /= std::sqrt(n2);
    rho_fine.noalias() = c * c.adjoint();
    if (trace_norm(ch.apply(rho_fine) - target) <= epsilon) acc.add(rho_fine);
  }
}

}  // namespace detail

/// Rejection-sampling estimate of the average assignment over the feasible
/// epsilon-ball: propose prior draws, accept those with
/// ||channel[psi] - rho||_1 <= epsilon, average. Deterministic for a fixed
/// (seed, n_proposed, n_workers): worker w uses seed + w and the partial
/// sums merge in worker order.
inline SampleEstimate rejection_estimate(const CoarseGrainingChannel& ch,
                                         const DensityMatrix& rho, double epsilon,
                                         const Prior& prior, long long n_proposed,
                                         std::uint64_t seed, int n_workers = 1) {
  if (epsilon <= 0.0) throw std::invalid_argument("rejection_estimate: epsilon must be > 0");
  if (rho.dim() != ch.out_dim())
    throw std::invalid_argument("rejection_estimate: rho dimension mismatch with channel");
  const int env_dim = prior.kind == Prior::Kind::Pure ? 1 : prior.env_dim;
  if (static_cast<long long>(ch.in_dim()) * env_dim > 64)
    throw std::invalid_argument(
        "rejection_estimate: purification dimension exceeds the cap of 64");
  if (n_workers < 1) n_workers = 1;

  const int dim = ch.in_dim();
  std::vector<detail::RejectionAccumulator> accs(n_workers, detail::RejectionAccumulator(dim));
  std::vector<std::thread> threads;
  const long long base = n_proposed / n_workers, rem = n_proposed % n_workers;
  for (int w = 0; w < n_workers; ++w) {
    const long long share = base + (w < rem ? 1 : 0);
    threads.emplace_back(detail::rejection_worker, std::cref(ch), std::cref(rho.matrix()),
                         epsilon, env_dim, share, seed + static_cast<std::uint64_t>(w),
                         std::ref(accs[w]));
  }
  for (auto& t : threads) t.join();

  detail::RejectionAccumulator total(dim);
  for (const auto& a : accs) total.merge(a);
  if (total.accepted == 0)
    throw ZeroAcceptance("rejection_estimate: no accepted samples",
                         3.0 / std::max<long long>(1, n_proposed));

  SampleEstimate est;
  est.mean_state = total.sum / static_cast<double>(total.accepted);
  est.n_proposed = n_proposed;
  est.n_accepted = total.accepted;
  est.epsilon = epsilon;
  est.seed = seed;
  const double n = static_cast<double>(total.accepted);
  const double nm1 = std::max(1.0, n - 1.0);
  est.stderr_re = ((total.sum_re2 / n - est.mean_state.real().cwiseAbs2()).cwiseMax(0.0) / nm1)
                      .cwiseSqrt();
  est.stderr_im = ((total.sum_im2 / n - est.mean_state.imag().cwiseAbs2()).cwiseMax(0.0) / nm1)
                      .cwiseSqrt();
  return est;
}

struct FeasibleEntropyScan {
  double max_entropy = 0.0;
  long long n_accepted = 0;
  long long n_proposed = 0;
};

namespace detail {

inline void entropy_worker(const CoarseGrainingChannel& ch, const Matrix& target, double epsilon,
                           int env_dim, long long n, std::uint64_t seed,
                           FeasibleEntropyScan& out) {
  const int dim = ch.in_dim();
  Rng rng(seed);
  Matrix c(dim, env_dim);
  Matrix rho_fine(dim, dim);
  out.max_entropy = 0.0;
  for (long long it = 0; it < n; ++it) {
    double n2 = 0.0;
    for (int i = 0; i < dim; ++i)
      for (int k = 0; k < env_dim; ++k) {
        c(i, k) = rng.complex_gaussian();
        n2 += std::norm(c(i, k));
      }
    c /= std::sqrt(n2);
    rho_fine.noalias() = c * c.adjoint();
    if (trace_norm(ch.apply(rho_fine) - target) <= epsilon) {
      out.max_entropy = std::max(out.max_entropy, von_neumann_entropy(rho_fine));
      ++out.n_accepted;
    }
  }
  out.n_proposed = n;
}

}  // namespace detail

/// Largest von Neumann entropy among accepted epsilon-ball samples; used to
/// bound the maximum-entropy solution from below sample-by-sample.
inline FeasibleEntropyScan rejection_max_entropy(const CoarseGrainingChannel& ch,
                                                 const DensityMatrix& rho, double epsilon,
                                                 const Prior& prior, long long n_proposed,
                                                 std::uint64_t seed, int n_workers = 1) {
  const int env_dim = prior.kind == Prior::Kind::Pure ? 1 : prior.env_dim;
  if (static_cast<long long>(ch.in_dim()) * env_dim > 64)
    throw std::invalid_argument(
        "rejection_max_entropy: purification dimension exceeds the cap of 64");
  if (n_workers < 1) n_workers = 1;
  std::vector<FeasibleEntropyScan> parts(n_workers);
  std::vector<std::thread> threads;
  const long long base = n_proposed / n_workers, rem = n_proposed % n_workers;
  for (int w = 0; w < n_workers; ++w) {
    const long long share = base + (w < rem ? 1 : 0);
    threads.emplace_back(detail::entropy_worker, std::cref(ch), std::cref(rho.matrix()), epsilon,
                         env_dim, share, seed + static_cast<std::uint64_t>(w),
                         std::ref(parts[w]));
  }
  for (auto& t : threads) t.join();
  FeasibleEntropyScan total;
  for (const auto& p : parts) {
    total.max_entropy = std::max(total.max_entropy, p.max_entropy);
    total.n_accepted += p.n_accepted;
    total.n_proposed += p.n_proposed;
  }
  return total;
}

// --- Kolmogorov-Smirnov helpers -------------------------------------------

/// One-sample KS statistic against a CDF; samples need not be sorted.
inline double ks_statistic(std::vector<double> samples,
                           const std::function<double(double)>& cdf) {
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    worst = std::max(worst, std::abs((i + 1) / n - f));
    worst = std::max(worst, std::abs(i / n - f));
  }
  return worst;
}

inline double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  std::size_t i = 0, k = 0;
  double worst = 0.0;
  while (i < a.size() && k < b.size()) {
    const double x = std::min(a[i], b[k]);
    while (i < a.size() && a[i] <= x) ++i;
    while (k < b.size() && b[k] <= x) ++k;
    worst = std::max(worst, std::abs(i / na - k / nb));
  }
  return worst;
}

inline double ks_alpha_constant(double alpha) { return std::sqrt(-0.5 * std::log(alpha / 2.0)); }

inline double ks_critical_one_sample(double alpha, std::size_t n) {
  return ks_alpha_constant(alpha) / std::sqrt(static_cast<double>(n));
}

inline double ks_critical_two_sample(double alpha, std::size_t n, std::size_t m) {
  const double nn = static_cast<double>(n), mm = static_cast<double>(m);
  return ks_alpha_constant(alpha) * std::sqrt((nn + mm) / (nn * mm));
}

struct Histogram {
  double lo = 0.0, hi = 1.0;
  std::vector<long long> counts;

  double bin_width() const { return (hi - lo) / static_cast<double>(counts.size()); }
  double center(std::size_t i) const { return lo + (i + 0.5) * bin_width(); }
  double density(std::size_t i, std::size_t n_total) const {
    return static_cast<double>(counts[i]) / (static_cast<double>(n_total) * bin_width());
  }
};

inline Histogram make_histogram(const std::vector<double>& samples, int n_bins, double lo,
                                double hi) {
  Histogram h{lo, hi, std::vector<long long>(static_cast<std::size_t>(n_bins), 0)};
  for (double s : samples) {
    if (s < lo || s > hi) continue;
    auto idx = static_cast<std::size_t>((s - lo) / (hi - lo) * n_bins);
    if (idx >= h.counts.size()) idx = h.counts.size() - 1;
    ++h.counts[idx];
  }
  return h;
}

}  // namespace cginfer
