#pragma once

#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "cginfer/aam.hpp"
#include "cginfer/channel.hpp"
#include "cginfer/mep.hpp"
#include "cginfer/montecarlo.hpp"
#include "cginfer/thermo.hpp"

namespace cginfer {

inline constexpr const char* kVersion = "0.1.0";

struct RunConfig {
  std::uint64_t seed = 12345;
  double epsilon = 0.025;
  double quadrature_tol = 1e-7;
  double solver_tol = 1e-10;
  std::string output_dir = ".";
  std::string format = "csv";  // csv | json
  int threads = 1;

  void check() const {
    if (epsilon <= 0.0 || quadrature_tol <= 0.0 || solver_tol <= 0.0)
      throw std::invalid_argument("RunConfig: tolerances must be positive");
    if (format != "csv" && format != "json")
      throw std::invalid_argument("RunConfig: format must be csv or json");
    if (threads < 1) throw std::invalid_argument("RunConfig: threads must be >= 1");
  }
};

using json = nlohmann::json;

inline void to_json(json& out, const RunConfig& c) {
  out = json{{"seed", c.seed},           {"epsilon", c.epsilon},
             {"quadrature_tol", c.quadrature_tol}, {"solver_tol", c.solver_tol},
             {"output_dir", c.output_dir}, {"format", c.format},
             {"threads", c.threads}};
}

inline void from_json(const json& in, RunConfig& c) {
  c.seed = in.value("seed", c.seed);
  c.epsilon = in.value("epsilon", c.epsilon);
  c.quadrature_tol = in.value("quadrature_tol", c.quadrature_tol);
  c.solver_tol = in.value("solver_tol", c.solver_tol);
  c.output_dir = in.value("output_dir", c.output_dir);
  c.format = in.value("format", c.format);
  c.threads = in.value("threads", c.threads);
}

/// FNV-1a hash of the canonical (key-sorted) config serialization.
inline std::string config_hash(const RunConfig& c) {
  const std::string dump = json(c).dump();
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : dump) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

inline std::string format_sig(double v, int digits = 12) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.*g", digits, v);
  return std::string(buf);
}

inline std::string csv_header_comment(const RunConfig& c) {
  return std::string("# cginfer ") + kVersion + " seed=" + std::to_string(c.seed) +
         " config=" + config_hash(c) + "\n";
}

// --- JSON encodings of library types ---------------------------------------

inline json json_of(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k)
      row.push_back(json::array({m(i, k).real(), m(i, k).imag()}));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Matrix matrix_from_json(const json& rows) {
  const auto nr = static_cast<Eigen::Index>(rows.size());
  if (nr == 0) throw std::invalid_argument("matrix_from_json: empty matrix");
  const auto nc = static_cast<Eigen::Index>(rows.at(0).size());
  Matrix m(nr, nc);
  for (Eigen::Index i = 0; i < nr; ++i)
    for (Eigen::Index k = 0; k < nc; ++k) {
      const json& cell = rows.at(i).at(k);
      m(i, k) = cdouble(cell.at(0).get<double>(), cell.at(1).get<double>());
    }
  return m;
}

inline json json_of(const DensityMatrix& rho) {
  return json{{"dim", rho.dim()}, {"matrix", json_of(rho.matrix())}};
}

inline json json_of(const AssignmentResult& a) {
  return json{{"method", a.method},
              {"prior_env_dim", a.prior_env_dim},
              {"residual", a.residual},
              {"state", json_of(a.state)}};
}

inline json json_of(const MepSolution& s) {
  std::vector<double> mult(s.multipliers.data(), s.multipliers.data() + s.multipliers.size());
  return json{{"method", "mep"},
              {"multipliers", mult},
              {"entropy", s.entropy},
              {"residual", s.residual},
              {"iterations", s.iterations},
              {"converged", s.converged},
              {"status", s.status},
              {"log_partition", s.log_partition},
              {"state", json_of(s.state)}};
}

inline json json_of(const SampleEstimate& e) {
  json se_re = json::array(), se_im = json::array();
  for (Eigen::Index i = 0; i < e.stderr_re.rows(); ++i) {
    json r1 = json::array(), r2 = json::array();
    for (Eigen::Index k = 0; k < e.stderr_re.cols(); ++k) {
      r1.push_back(e.stderr_re(i, k));
      r2.push_back(e.stderr_im(i, k));
    }
    se_re.push_back(std::move(r1));
    se_im.push_back(std::move(r2));
  }
  return json{{"mean_state", json_of(e.mean_state)},
              {"n_proposed", e.n_proposed},
              {"n_accepted", e.n_accepted},
              {"acceptance_rate", e.acceptance_rate()},
              {"epsilon", e.epsilon},
              {"stderr_re", se_re},
              {"stderr_im", se_im},
              {"seed", e.seed}};
}

/// Channel serialization: label, dims, transfer matrix entries as [re, im]
/// pairs in row-major order (the transfer matrix is real in the Hermitian
/// operator basis, so im == 0 throughout).
inline json json_of(const CoarseGrainingChannel& ch) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < ch.transfer().rows(); ++i) {
    json row = json::array();
    for (Eigen::Index k = 0; k < ch.transfer().cols(); ++k)
      row.push_back(json::array({ch.transfer()(i, k), 0.0}));
    rows.push_back(std::move(row));
  }
  return json{{"label", ch.label()},
              {"in_dim", ch.in_dim()},
              {"out_dim", ch.out_dim()},
              {"transfer", rows}};
}

inline CoarseGrainingChannel channel_from_json(const json& in) {
  const int in_dim = in.at("in_dim").get<int>();
  const int out_dim = in.at("out_dim").get<int>();
  const json& rows = in.at("transfer");
  Eigen::MatrixXd t(out_dim * out_dim, in_dim * in_dim);
  if (static_cast<Eigen::Index>(rows.size()) != t.rows())
    throw std::invalid_argument("channel_from_json: transfer row count mismatch");
  for (Eigen::Index i = 0; i < t.rows(); ++i)
    for (Eigen::Index k = 0; k < t.cols(); ++k)
      t(i, k) = rows.at(i).at(k).at(0).get<double>();
  return CoarseGrainingChannel(in.value("label", std::string("custom")), in_dim, out_dim,
                               std::move(t));
}

// --- File writers -----------------------------------------------------------

inline void write_text_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  out << content;
}

inline void write_json_file(const std::filesystem::path& path, const RunConfig& cfg, json body) {
  body["version"] = kVersion;
  body["seed"] = cfg.seed;
  body["config_hash"] = config_hash(cfg);
  write_text_file(path, body.dump(2) + "\n");
}

/// PmCurve CSV: header `m,r,p`, one row per (m, r), r printed with 12
/// significant digits.
inline void write_pm_curve_csv(const std::filesystem::path& path, const PmCurve& curve,
                               const RunConfig& cfg) {
  std::string out = csv_header_comment(cfg);
  out += "m,r,p\n";
  const int dim = static_cast<int>(curve.p.rows());
  for (int mi = 0; mi < dim; ++mi) {
    const double m = curve.j - mi;
    for (std::size_t gi = 0; gi < curve.r_grid.size(); ++gi) {
      out += format_sig(m) + "," + format_sig(curve.r_grid[gi]) + "," +
             format_sig(curve.p(mi, static_cast<Eigen::Index>(gi))) + "\n";
    }
  }
  write_text_file(path, out);
}

/// Work CSV: columns method, j, omega_tau, W_over_gamma.
inline void write_work_csv(const std::filesystem::path& path,
                           const std::vector<std::pair<double, std::vector<WorkCurve>>>& table,
                           const RunConfig& cfg) {
  std::string out = csv_header_comment(cfg);
  out += "method,j,omega_tau,W_over_gamma\n";
  for (const auto& [j, curves] : table)
    for (const WorkCurve& c : curves)
      for (std::size_t i = 0; i < c.omega_tau.size(); ++i)
        out += c.method + "," + format_sig(j) + "," + format_sig(c.omega_tau[i]) + "," +
               format_sig(c.work_over_gamma[i]) + "\n";
  write_text_file(path, out);
}

}  // namespace cginfer
