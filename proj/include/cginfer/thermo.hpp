#pragma once

#include <iostream>
#include <numbers>
#include <string>
#include <vector>

#include "cginfer/aam.hpp"
#include "cginfer/linalg.hpp"
#include "cginfer/mep.hpp"

namespace cginfer {

/// Driven J_z^2 protocol: H(t) = gamma cos(omega t) J_z^2, with the initial
/// state assigned from coarse-grained data by one of the inference methods.
struct WorkScenario {
  double j = 1.5;
  double gamma = 1.0;
  BlochVector initial_bloch{0.0, 0.0, 0.7};
  int env_dim = 0;       // mixed-prior environment; 0 means the 2j+1 default
  int grid_points = 101; // omega*tau grid on [0, 2pi]

  int effective_env_dim() const { return env_dim > 0 ? env_dim : two_j_of(j) + 1; }
};

/// Average work gamma (cos(omega tau) - 1) tr(psi0 J_z^2). Warns when the
/// initial state fails to commute with J_z^2, where this closed form is the
/// only uncontroversial definition.
inline double average_work(const Matrix& psi0, double j, double gamma, double omega_tau) {
  const SpinOperators ops = angular_momentum(j);
  if (psi0.rows() != ops.dim || psi0.cols() != ops.dim)
    throw std::invalid_argument("average_work: state dimension does not match j");
  const Matrix jz2 = ops.jz * ops.jz;
  const double comm = (psi0 * jz2 - jz2 * psi0).cwiseAbs().maxCoeff();
  if (comm > 1e-8)
    std::cerr << "average_work: warning, [psi0, Jz^2] residual " << comm << "\n";
  return gamma * (std::cos(omega_tau) - 1.0) * (psi0 * jz2).trace().real();
}

inline double average_work(const DensityMatrix& psi0, double j, double gamma,
                           double omega_tau) {
  return average_work(psi0.matrix(), j, gamma, omega_tau);
}

struct WorkCurve {
  std::string method;  // "aam-pure" | "aam-mixed" | "mep"
  std::vector<double> omega_tau;
  std::vector<double> work_over_gamma;
  double jz2_expectation = 0.0;
};

/// Work curves for the three assignment methods over the omega*tau grid.
inline std::vector<WorkCurve> work_comparison(const WorkScenario& s) {
  const SpinOperators ops = angular_momentum(s.j);
  const Matrix jz2 = ops.jz * ops.jz;
  const int de = s.effective_env_dim();

  std::vector<std::pair<std::string, Matrix>> assigned;
  assigned.emplace_back("aam-pure", aam_su2_state(s.j, 1, s.initial_bloch).state.matrix());
  assigned.emplace_back("aam-mixed", aam_su2_state(s.j, de, s.initial_bloch).state.matrix());
  assigned.emplace_back("mep", mep_su2(s.j, s.initial_bloch).state.matrix());

  std::vector<WorkCurve> curves;
  for (auto& [method, psi] : assigned) {
    WorkCurve c;
    c.method = method;
    c.jz2_expectation = (psi * jz2).trace().real();
    for (int k = 0; k < s.grid_points; ++k) {
      const double wt = 2.0 * std::numbers::pi * k / (s.grid_points - 1);
      c.omega_tau.push_back(wt);
      c.work_over_gamma.push_back((std::cos(wt) - 1.0) * c.jz2_expectation);
    }
    curves.push_back(std::move(c));
  }
  return curves;
}

}  // namespace cginfer
