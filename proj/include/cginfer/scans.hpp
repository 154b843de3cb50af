#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cginfer/aam.hpp"
#include "cginfer/mep.hpp"
#include "cginfer/montecarlo.hpp"

namespace cginfer {

/// Distances between the pure- and mixed-prior BnS assignments for states
/// drawn uniformly from the Bloch ball; compare to bns_prior_distance_pdf.
inline std::vector<double> distance_histogram_pure_vs_mixed(int env_dim, int n_states,
                                                            Rng& rng) {
  if (env_dim < 2)
    throw std::invalid_argument("distance_histogram_pure_vs_mixed: env_dim must be >= 2");
  std::vector<double> deltas;
  deltas.reserve(static_cast<std::size_t>(n_states));
  for (int i = 0; i < n_states; ++i) {
    const BlochVector b = uniform_bloch_ball(rng);
    if (1.0 + b.z < kDivisionFloor) continue;  // measure-zero pole
    deltas.push_back(bns_prior_distance(b, env_dim));
  }
  return deltas;
}

struct DistanceScanRow {
  BlochVector bloch;
  double delta = 0.0;
  bool ok = true;
  std::string error;
};

/// Trace distance between the MEP and BnS-AAM assignments over random
/// effective states. env_dim = 1 is the pure prior; env_dim < 0 selects the
/// mixed-prior infinite-environment limit. Solver failures are recorded per
/// row and excluded from aggregates by the caller.
inline std::vector<DistanceScanRow> mep_aam_distance_scan_bns(int env_dim, int n_states,
                                                              Rng& rng, double tol = 1e-10) {
  std::vector<DistanceScanRow> rows;
  rows.reserve(static_cast<std::size_t>(n_states));
  for (int i = 0; i < n_states; ++i) {
    DistanceScanRow row;
    row.bloch = uniform_bloch_ball(rng);
    try {
      const DensityMatrix rho = qubit_state(row.bloch);
      const MepSolution mep = mep_bns(rho, tol);
      if (!mep.converged) throw std::runtime_error("mep_bns: " + mep.status);
      const AssignmentResult aam = env_dim < 0    ? aam_bns_mixed_limit(rho)
                                   : env_dim == 1 ? aam_bns_pure(rho)
                                                  : aam_bns_mixed(rho, env_dim);
      row.delta = trace_distance(mep.state, aam.state);
    } catch (const std::exception& e) {
      row.ok = false;
      row.error = e.what();
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

struct SuDistancePoint {
  double r = 0.0;
  double delta = 0.0;
  bool ok = true;
  std::string error;
};

/// Trace distance between the MEP and Lambda_J AAM assignments as a function
/// of the Bloch radius (both are diagonal in the same basis, so the distance
/// is half the l1 distance of the weight vectors).
inline std::vector<SuDistancePoint> mep_aam_distance_scan_su2(double j, int env_dim,
                                                              const std::vector<double>& r_grid,
                                                              double tol = 1e-7) {
  const int dim = two_j_of(j) + 1;
  std::vector<SuDistancePoint> points;
  points.reserve(r_grid.size());
  for (double r : r_grid) {
    SuDistancePoint pt;
    pt.r = r;
    try {
      const Eigen::VectorXd pa = aam_su2_pm(j, env_dim, r, PmMethod::Quadrature, tol);
      Eigen::VectorXd pe(dim);
      if (r < 1e-12) {
        pe.setConstant(1.0 / dim);
      } else if (r >= 1.0 - 1e-12) {
        pe.setZero();
        pe(0) = 1.0;
      } else {
        const double lam = brillouin_inverse(j, r);
        for (int k = 0; k < dim; ++k) pe(k) = lam * (j - k) / j;
        pe = (pe.array() - pe.maxCoeff()).exp();
        pe /= pe.sum();
      }
      pt.delta = 0.5 * (pa - pe).cwiseAbs().sum();
    } catch (const std::exception& e) {
      pt.ok = false;
      pt.error = e.what();
    }
    points.push_back(std::move(pt));
  }
  return points;
}

/// Partial-trace channel: MEP and AAM coincide, so the scan is a zero check.
inline std::vector<DistanceScanRow> mep_aam_distance_scan_ptrace(int env_dim, int n_states,
                                                                 Rng& rng,
                                                                 const MepOptions& opt = {}) {
  const CoarseGrainingChannel ch = make_partial_trace_channel(2, env_dim);
  std::vector<DistanceScanRow> rows;
  rows.reserve(static_cast<std::size_t>(n_states));
  for (int i = 0; i < n_states; ++i) {
    DistanceScanRow row;
    row.bloch = uniform_bloch_ball(rng);
    try {
      const DensityMatrix rho = qubit_state(row.bloch);
      const MepSolution mep = mep_qubit_targets(ch, rho, opt);
      if (!mep.converged) throw std::runtime_error("mep_generic: " + mep.status);
      row.delta = trace_distance(mep.state, aam_partial_trace(rho, env_dim).state);
    } catch (const std::exception& e) {
      row.ok = false;
      row.error = e.what();
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace cginfer
