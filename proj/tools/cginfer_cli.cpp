// Command-line front end: state assignment, figure-data generation, and the
// acceptance-check suite, with seeded reproducible outputs.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "cginfer/io.hpp"
#include "cginfer/scans.hpp"
#include "cginfer/thermo.hpp"
#include "cginfer/validate.hpp"

namespace fs = std::filesystem;
using namespace cginfer;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitNumerical = 3;

struct CliArgs {
  RunConfig cfg;
  std::string channel, method, suite;
  std::string bloch_arg, state_file, out_path;
  int env_dim = 2;
  double j = 1.5;
  int figure = 0;
};

BlochVector parse_bloch(const std::string& arg) {
  std::stringstream ss(arg);
  std::string tok;
  std::vector<double> vals;
  while (std::getline(ss, tok, ',')) vals.push_back(std::stod(tok));
  if (vals.size() != 3) throw std::invalid_argument("--bloch expects x,y,z");
  return BlochVector::checked(vals[0], vals[1], vals[2]);
}

DensityMatrix load_state(const CliArgs& a) {
  if (!a.state_file.empty()) {
    std::ifstream in(a.state_file);
    if (!in) throw std::invalid_argument("cannot read state file: " + a.state_file);
    json parsed = json::parse(in);
    return DensityMatrix::from_matrix(
        matrix_from_json(parsed.contains("matrix") ? parsed["matrix"] : parsed));
  }
  return qubit_state(parse_bloch(a.bloch_arg.empty() ? "0,0,0" : a.bloch_arg));
}

fs::path out_file(const CliArgs& a, const std::string& fallback) {
  if (!a.out_path.empty()) return a.out_path;
  return fs::path(a.cfg.output_dir) / fallback;
}

int cmd_assign(const CliArgs& a) {
  json body;
  if (a.channel == "ptrace") {
    const DensityMatrix rho = load_state(a);
    if (a.method == "mep") {
      const CoarseGrainingChannel ch = make_partial_trace_channel(rho.dim(), a.env_dim);
      const MepSolution sol = mep_generic(
          ch, qubit_tomographic_observables(),
          [&] {
            const BlochVector b = bloch_of(rho.matrix());
            Eigen::VectorXd t(3);
            t << b.x, b.y, b.z;
            return t;
          }(),
          MepOptions{a.cfg.solver_tol, 200});
      if (!sol.converged) {
        std::cerr << "solver failed: " << sol.status << "\n";
        return kExitNumerical;
      }
      body = json_of(sol);
    } else {
      body = json_of(aam_partial_trace(rho, a.env_dim));
    }
  } else if (a.channel == "bns") {
    const DensityMatrix rho = load_state(a);
    if (a.method == "aam-pure") {
      body = json_of(aam_bns_pure(rho));
    } else if (a.method == "aam-mixed") {
      body = json_of(aam_bns_mixed(rho, a.env_dim));
    } else {
      const MepSolution sol = mep_bns(rho, a.cfg.solver_tol);
      if (!sol.converged) {
        std::cerr << "solver failed: " << sol.status << "\n";
        return kExitNumerical;
      }
      body = json_of(sol);
    }
  } else if (a.channel == "su2") {
    const BlochVector b = parse_bloch(a.bloch_arg.empty() ? "0,0,0" : a.bloch_arg);
    if (a.method == "mep") {
      const MepSolution sol = mep_su2(a.j, b, a.cfg.solver_tol);
      body = json_of(sol);
    } else {
      const int de = a.method == "aam-mixed" ? a.env_dim : 1;
      body = json_of(aam_su2_state(a.j, de, b, PmMethod::Quadrature, a.cfg.quadrature_tol));
    }
  } else {
    std::cerr << "unknown channel: " << a.channel << "\n";
    return kExitUsage;
  }
  const fs::path path = out_file(a, "assign_" + a.channel + "_" + a.method + ".json");
  write_json_file(path, a.cfg, std::move(body));
  std::cout << path.string() << "\n";
  return kExitOk;
}

void write_csv(const fs::path& path, const RunConfig& cfg, const std::string& header,
               const std::string& rows) {
  write_text_file(path, csv_header_comment(cfg) + header + "\n" + rows);
}

std::vector<double> default_grid(int n = 21) {
  std::vector<double> g;
  for (int i = 0; i < n; ++i) g.push_back(static_cast<double>(i) / (n - 1));
  return g;
}

int cmd_figure(const CliArgs& a) {
  const fs::path dir = a.out_path.empty() ? fs::path(a.cfg.output_dir) : fs::path(a.out_path);
  fs::create_directories(dir);
  json manifest{{"figure", a.figure}, {"files", json::array()}, {"parameters", json::object()}};
  auto add_file = [&](const fs::path& p) { manifest["files"].push_back(p.filename().string()); };
  const int n = a.figure;

  if (n == 2) {
    manifest["parameters"] = {{"env_dims", {2, 3, 4, 8, 1000000}}, {"n_samples", 100000}};
    for (int de : {2, 3, 4, 8, 1000000}) {
      const double hi = bns_prior_distance_support(de);
      std::string rows;
      for (int i = 0; i <= 200; ++i) {
        const double d = hi * i / 200.0;
        rows += format_sig(d) + "," + format_sig(bns_prior_distance_pdf(d, de)) + "\n";
      }
      const fs::path curve = dir / ("fig2_pdf_de" + std::to_string(de) + ".csv");
      write_csv(curve, a.cfg, "delta,density", rows);
      add_file(curve);

      Rng rng(a.cfg.seed + de);
      const std::vector<double> deltas = distance_histogram_pure_vs_mixed(de, 100000, rng);
      const Histogram h = make_histogram(deltas, 50, 0.0, hi);
      std::string hrows;
      for (std::size_t b = 0; b < h.counts.size(); ++b)
        hrows += format_sig(h.center(b)) + "," + format_sig(h.density(b, deltas.size())) + "," +
                 std::to_string(h.counts[b]) + "\n";
      const fs::path hist = dir / ("fig2_hist_de" + std::to_string(de) + ".csv");
      write_csv(hist, a.cfg, "delta,density,count", hrows);
      add_file(hist);
    }
  } else if (n == 3) {
    const int n_states = 20000;
    manifest["parameters"] = {{"env_dims", {1, 4, 8, 16, -1}}, {"n_states", n_states}};
    for (int de : {1, 4, 8, 16, -1}) {
      Rng rng(a.cfg.seed + 100 + de);
      const auto rows = mep_aam_distance_scan_bns(de, n_states, rng, a.cfg.solver_tol);
      std::vector<double> deltas;
      for (const auto& r : rows)
        if (r.ok) deltas.push_back(r.delta);
      const Histogram h = make_histogram(deltas, 60, 0.0, 0.12);
      std::string hrows;
      for (std::size_t b = 0; b < h.counts.size(); ++b)
        hrows += format_sig(h.center(b)) + "," + format_sig(h.density(b, deltas.size())) + "," +
                 std::to_string(h.counts[b]) + "\n";
      const std::string tag = de < 0 ? "inf" : std::to_string(de);
      const fs::path hist = dir / ("fig3_hist_de" + tag + ".csv");
      write_csv(hist, a.cfg, "delta_prime,density,count", hrows);
      add_file(hist);
    }
  } else if (n == 4 || n == 5 || n == 6) {
    manifest["parameters"] = {{"j_values", {1.5, 2.5, 3.5, 4.5}}, {"grid_points", 21}};
    for (double j : {1.5, 2.5, 3.5, 4.5}) {
      const int dim = two_j_of(j) + 1;
      const std::string jtag = std::to_string(two_j_of(j)) + "half";
      fs::path path;
      if (n == 6) {
        std::string rows;
        for (double r : default_grid()) {
          Eigen::VectorXd p(dim);
          if (r < 1e-12) {
            p.setConstant(1.0 / dim);
          } else if (r >= 1.0 - 1e-12) {
            p.setZero();
            p(0) = 1.0;
          } else {
            const double lam = brillouin_inverse(j, r);
            for (int k = 0; k < dim; ++k) p(k) = lam * (j - k) / j;
            p = (p.array() - p.maxCoeff()).exp();
            p /= p.sum();
          }
          for (int k = 0; k < dim; ++k)
            rows += format_sig(j - k) + "," + format_sig(r) + "," + format_sig(p(k)) + "\n";
        }
        path = dir / ("fig6_mep_pm_j" + jtag + ".csv");
        write_csv(path, a.cfg, "m,r,p", rows);
      } else {
        const int de = n == 4 ? 1 : dim;
        const PmCurve curve = aam_su2_pm_curve(j, de, default_grid(), a.cfg.quadrature_tol);
        path = dir / ("fig" + std::to_string(n) + "_aam_pm_j" + jtag + ".csv");
        write_pm_curve_csv(path, curve, a.cfg);
      }
      add_file(path);
    }
  } else if (n == 7) {
    manifest["parameters"] = {{"j_values", {1.5, 2.5, 3.5, 4.5}}, {"grid_points", 21}};
    for (int panel = 0; panel < 2; ++panel) {
      std::string rows;
      for (double j : {1.5, 2.5, 3.5, 4.5}) {
        const int de = panel == 0 ? 1 : two_j_of(j) + 1;
        for (const auto& pt :
             mep_aam_distance_scan_su2(j, de, default_grid(), a.cfg.quadrature_tol))
          if (pt.ok)
            rows += format_sig(j) + "," + std::to_string(de) + "," + format_sig(pt.r) + "," +
                    format_sig(pt.delta) + "\n";
      }
      const fs::path path = dir / (panel == 0 ? "fig7a_dprime_pure.csv" : "fig7b_dprime_mixed.csv");
      write_csv(path, a.cfg, "j,env_dim,r,delta_prime", rows);
      add_file(path);
    }
  } else if (n == 8) {
    manifest["parameters"] = {{"j", 3.5}, {"env_dims", {4, 8, 16, 32}}, {"grid_points", 11}};
    std::string rows;
    std::string inset;
    for (int de : {4, 8, 16, 32}) {
      for (const auto& pt :
           mep_aam_distance_scan_su2(3.5, de, default_grid(11), a.cfg.quadrature_tol))
        if (pt.ok)
          rows += std::to_string(de) + "," + format_sig(pt.r) + "," + format_sig(pt.delta) + "\n";
      const auto mid = mep_aam_distance_scan_su2(3.5, de, {0.5}, a.cfg.quadrature_tol);
      if (mid[0].ok) inset += std::to_string(de) + "," + format_sig(mid[0].delta) + "\n";
    }
    const fs::path path = dir / "fig8_dprime_j7half.csv";
    write_csv(path, a.cfg, "env_dim,r,delta_prime", rows);
    add_file(path);
    const fs::path ipath = dir / "fig8_inset_saturation.csv";
    write_csv(ipath, a.cfg, "env_dim,delta_prime_at_half", inset);
    add_file(ipath);
  } else if (n == 9) {
    manifest["parameters"] = {{"j_values", {1.5, 2.5, 3.5}}, {"initial_bloch", {0.0, 0.0, 0.7}}};
    std::vector<std::pair<double, std::vector<WorkCurve>>> table;
    for (double j : {1.5, 2.5, 3.5}) {
      WorkScenario sc;
      sc.j = j;
      table.emplace_back(j, work_comparison(sc));
    }
    const fs::path path = dir / "fig9_work.csv";
    write_work_csv(path, table, a.cfg);
    add_file(path);
  } else if (n == 10 || n == 11) {
    const long long n_prop = 1'000'000;
    std::string rows;
    const CoarseGrainingChannel ch = n == 10 ? make_bns_channel() : make_su2_channel(1.5);
    manifest["parameters"] = {{"n_proposed", n_prop}, {"epsilon", a.cfg.epsilon}};
    std::vector<std::pair<std::string, BlochVector>> states;
    if (n == 10) {
      int idx = 0;
      for (const BlochVector& b : bns_reference_states())
        states.emplace_back(std::to_string(idx++), b);
    } else {
      for (double r : {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7})
        states.emplace_back(format_sig(r), BlochVector{0, 0, r});
    }
    int idx = 0;
    for (const auto& [tag, b] : states) {
      const DensityMatrix rho = qubit_state(b);
      const Matrix pure_ref = n == 10 ? aam_bns_pure(rho).state.matrix()
                                      : aam_su2_state(1.5, 1, b).state.matrix();
      const Matrix mixed_ref = n == 10 ? aam_bns_mixed(rho, 2).state.matrix()
                                       : aam_su2_state(1.5, 2, b).state.matrix();
      double total_error = std::numeric_limits<double>::quiet_NaN();
      std::string note = "ok";
      try {
        const SampleEstimate ep = rejection_estimate(ch, rho, a.cfg.epsilon, Prior::pure(),
                                                     n_prop, a.cfg.seed + 17 * idx,
                                                     a.cfg.threads);
        const SampleEstimate em = rejection_estimate(ch, rho, a.cfg.epsilon, Prior::mixed(2),
                                                     n_prop, a.cfg.seed + 17 * idx + 7,
                                                     a.cfg.threads);
        total_error = trace_norm(ep.mean_state - pure_ref) + trace_norm(em.mean_state - mixed_ref);
      } catch (const ZeroAcceptance&) {
        note = "zero-acceptance";
      }
      const double prior_gap = trace_norm(pure_ref - mixed_ref);
      rows += tag + "," + format_sig(total_error) + "," + format_sig(prior_gap) + "," + note + "\n";
      ++idx;
    }
    const fs::path path =
        dir / (n == 10 ? "fig10_bns_rs_bars.csv" : "fig11_su2_rs_bars.csv");
    write_csv(path, a.cfg, (n == 10 ? std::string("state_index") : std::string("r")) +
                               ",total_error,prior_gap,note",
              rows);
    add_file(path);
  } else {
    std::cerr << "unsupported figure number: " << n << " (supported: 2..11)\n";
    return kExitUsage;
  }

  write_json_file(dir / ("fig" + std::to_string(n) + "_manifest.json"), a.cfg,
                  std::move(manifest));
  std::cout << dir.string() << "\n";
  return kExitOk;
}

int cmd_validate(const CliArgs& a) {
  ValidateOptions opt;
  opt.config = a.cfg;
  opt.fast = a.suite == "fast";
  const std::vector<CriterionResult> results = run_acceptance(opt);
  const std::string report = format_report(results);
  std::cout << report;
  if (!a.out_path.empty() || !a.cfg.output_dir.empty()) {
    const fs::path dir = a.out_path.empty() ? fs::path(a.cfg.output_dir) : fs::path(a.out_path);
    fs::create_directories(dir);
    write_text_file(dir / "validate_report.txt",
                    csv_header_comment(a.cfg) + "# suite=" + a.suite + "\n" + report);
  }
  for (const CriterionResult& r : results)
    if (!r.pass) return kExitNumerical;
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CliArgs a;

  // --config is applied first; explicit flags override its values
  for (int i = 1; i + 1 < argc; ++i) {
    if (std::string(argv[i]) == "--config") {
      std::ifstream in(argv[i + 1]);
      if (!in) {
        std::cerr << "cannot read config file: " << argv[i + 1] << "\n";
        return kExitUsage;
      }
      try {
        json parsed = json::parse(in);
        a.cfg = parsed.get<RunConfig>();
      } catch (const std::exception& e) {
        std::cerr << "bad config file: " << e.what() << "\n";
        return kExitUsage;
      }
    }
  }

  CLI::App app{"coarse-grained quantum state inference toolkit"};
  app.set_version_flag("--version", std::string(kVersion));
  std::string config_dummy;
  app.add_option("--config", config_dummy, "JSON config file (flags override it)");
  app.add_option("--seed", a.cfg.seed, "random seed recorded in outputs");
  app.add_option("--epsilon", a.cfg.epsilon, "rejection-sampling preparation error");
  app.add_option("--tol", a.cfg.solver_tol, "solver tolerance");
  app.add_option("--qtol", a.cfg.quadrature_tol, "assignment-evaluator tolerance");
  app.add_option("--threads", a.cfg.threads, "Monte Carlo worker count");
  app.add_option("--format", a.cfg.format, "output format for curves (csv|json)");

  CLI::App* assign = app.add_subcommand("assign", "assign a fine-grained state");
  assign->add_option("channel", a.channel, "ptrace | bns | su2")->required();
  assign->add_option("method", a.method, "aam-pure | aam-mixed | mep")->required();
  assign->add_option("--bloch", a.bloch_arg, "effective qubit state as x,y,z");
  assign->add_option("--state", a.state_file, "effective state JSON file");
  assign->add_option("--de", a.env_dim, "environment dimension (mixed prior / ptrace)");
  assign->add_option("--j", a.j, "spin j for the su2 channel");
  assign->add_option("--out", a.out_path, "output file");

  CLI::App* figure = app.add_subcommand("figure", "emit figure data as CSV + manifest");
  figure->add_option("n", a.figure, "figure number (2..11)")->required();
  figure->add_option("--out", a.out_path, "output directory");

  CLI::App* validate = app.add_subcommand("validate", "run the acceptance-check suite");
  validate->add_option("suite", a.suite, "fast | full")->required();
  validate->add_option("--out", a.out_path, "report directory");

  app.require_subcommand(1);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    a.cfg.check();
    if (assign->parsed()) {
      if (a.method != "aam-pure" && a.method != "aam-mixed" && a.method != "mep") {
        std::cerr << "unknown method: " << a.method << "\n";
        return kExitUsage;
      }
      return cmd_assign(a);
    }
    if (figure->parsed()) return cmd_figure(a);
    if (validate->parsed()) {
      if (a.suite != "fast" && a.suite != "full") {
        std::cerr << "suite must be fast or full\n";
        return kExitUsage;
      }
      return cmd_validate(a);
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitUsage;
}
