#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "hinf/hinf.hpp"

namespace {

using hinf::CMat;
using hinf::Complex;
using hinf::CVec;
using nlohmann::json;

constexpr int kExitUsage = 2;
constexpr int kExitUnstable = 3;
constexpr int kExitSolver = 4;
constexpr int kExitOutput = 5;

std::string fmt9(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

std::string fmt_full(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

struct BandFlags {
  std::vector<double> low;
  std::vector<double> high;
  std::vector<double> band;

  hinf::FrequencyBand resolve() const {
    const int given = (low.empty() ? 0 : 1) + (high.empty() ? 0 : 1) +
                      (band.empty() ? 0 : 1);
    if (given > 1)
      throw hinf::ParseError("at most one of --low, --high, --band may be given");
    try {
      if (!low.empty()) return hinf::FrequencyBand::low(low[0]);
      if (!high.empty()) return hinf::FrequencyBand::high(high[0]);
      if (!band.empty()) return hinf::FrequencyBand::middle(band[0], band[1]);
    } catch (const hinf::InputError& e) {
      throw hinf::ParseError(e.what());  // flag validation is a usage error
    }
    return hinf::FrequencyBand::full();
  }

  std::string describe() const {
    if (!low.empty()) return "low(" + fmt9(low[0]) + ")";
    if (!high.empty()) return "high(" + fmt9(high[0]) + ")";
    if (!band.empty()) return "band(" + fmt9(band[0]) + ", " + fmt9(band[1]) + ")";
    return "full";
  }
};

struct CommonOpts {
  std::string system_file;
  BandFlags band;
  hinf::SolverSettings solver;
  bool as_json = false;
};

void add_common(CLI::App* cmd, CommonOpts& opts, bool with_json) {
  cmd->add_option("system", opts.system_file, "System file (JSON)")->required();
  cmd->add_option("--low", opts.band.low, "Low band edge theta0 (rad)")
      ->expected(1);
  cmd->add_option("--high", opts.band.high, "High band edge theta0 (rad)")
      ->expected(1);
  cmd->add_option("--band", opts.band.band, "Middle band theta1 theta2 (rad)")
      ->expected(2);
  cmd->add_option("--tol-feas", opts.solver.tol_feas, "Feasibility tolerance");
  cmd->add_option("--tol-gap", opts.solver.tol_gap, "Duality gap tolerance");
  cmd->add_option("--max-iters", opts.solver.max_iters, "Iteration cap");
  if (with_json) cmd->add_flag("--json", opts.as_json, "Emit a JSON report");
}

json vec_to_json(const CVec& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i)
    out.push_back(json::array({v(i).real(), v(i).imag()}));
  return out;
}

double certificate_residual(const hinf::StateSpace& sys,
                            const hinf::RankOneCertificate& cert) {
  const CVec advanced = sys.A() * cert.x_opt + sys.B() * cert.w_opt;
  return (std::polar(1.0, cert.theta_opt) * cert.x_opt - advanced).norm();
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw hinf::Error("cannot open output file: " + path);
  return out;
}

int run_norm(const CommonOpts& opts) {
  const hinf::StateSpace sys = hinf::load_system(opts.system_file);
  const hinf::FrequencyBand band = opts.band.resolve();
  hinf::AnalyzeSettings settings;
  settings.solver = opts.solver;
  const hinf::AnalysisResult res = hinf::analyze(sys, band, settings);
  const double residual = certificate_residual(sys, res.certificate);
  const double gain_at = hinf::gain(sys, res.certificate.theta_opt);

  if (opts.as_json) {
    json j;
    j["norm"] = res.norm;
    j["mu_opt"] = res.certificate.mu_opt;
    j["theta_opt"] = res.certificate.theta_opt;
    j["band"] = opts.band.describe();
    j["solver"] = {{"status", hinf::to_string(res.solution.status)},
                   {"objective", res.solution.objective},
                   {"dual_objective", res.solution.dual_objective},
                   {"iterations", res.solution.iterations},
                   {"primal_residual", res.solution.residuals.primal_eq},
                   {"psd_violation", res.solution.residuals.psd_violation},
                   {"duality_gap", res.solution.residuals.duality_gap}};
    j["certificate"] = {{"x", vec_to_json(res.certificate.x_opt)},
                        {"w", vec_to_json(res.certificate.w_opt)},
                        {"theta", res.certificate.theta_opt},
                        {"mu", res.certificate.mu_opt},
                        {"dynamics_residual", residual},
                        {"gain_at_theta", gain_at}};
    std::cout << j.dump(2) << "\n";
    return 0;
  }

  std::cout << "norm               " << fmt9(res.norm) << "\n"
            << "theta_opt          " << fmt9(res.certificate.theta_opt) << "\n"
            << "mu_opt             " << fmt9(res.certificate.mu_opt) << "\n"
            << "band               " << opts.band.describe() << "\n"
            << "solver_status      " << hinf::to_string(res.solution.status) << "\n"
            << "iterations         " << res.solution.iterations << "\n"
            << "primal_residual    " << fmt9(res.solution.residuals.primal_eq) << "\n"
            << "psd_violation      " << fmt9(res.solution.residuals.psd_violation) << "\n"
            << "duality_gap        " << fmt9(res.solution.residuals.duality_gap) << "\n"
            << "dynamics_residual  " << fmt9(residual) << "\n"
            << "gain_at_theta      " << fmt9(gain_at) << "\n";
  return 0;
}

int run_worst_input(const CommonOpts& opts, int steps, const std::string& out_path) {
  const hinf::StateSpace sys = hinf::load_system(opts.system_file);
  const hinf::FrequencyBand band = opts.band.resolve();
  hinf::AnalyzeSettings settings;
  settings.solver = opts.solver;
  const hinf::AnalysisResult res = hinf::analyze(sys, band, settings);
  const hinf::RankOneCertificate& cert = res.certificate;

  std::ofstream file;
  if (!out_path.empty()) file = open_output(out_path);
  std::ostream& out = out_path.empty() ? std::cout : file;

  out << "k";
  for (Eigen::Index i = 0; i < sys.m(); ++i)
    out << ",w" << i << "_re,w" << i << "_im";
  for (Eigen::Index i = 0; i < sys.l(); ++i)
    out << ",z" << i << "_re,z" << i << "_im";
  out << ",running_power\n";

  CVec x = CVec::Zero(sys.n());
  double acc = 0.0;
  double final_power = 0.0;
  for (int k = 0; k < steps; ++k) {
    const CVec w = std::polar(1.0, cert.theta_opt * k) * cert.w_opt;
    const CVec z = sys.C() * x + sys.D() * w;
    acc += z.squaredNorm();
    final_power = acc / (k + 1);
    out << k;
    for (Eigen::Index i = 0; i < sys.m(); ++i)
      out << "," << fmt_full(w(i).real()) << "," << fmt_full(w(i).imag());
    for (Eigen::Index i = 0; i < sys.l(); ++i)
      out << "," << fmt_full(z(i).real()) << "," << fmt_full(z(i).imag());
    out << "," << fmt_full(final_power) << "\n";
    x = sys.A() * x + sys.B() * w;
  }
  if (!out.good()) throw hinf::Error("write failed: " + out_path);

  const double rel =
      std::abs(final_power - cert.mu_opt) / std::max(1.0, cert.mu_opt);
  std::cout << "final_running_power " << fmt9(final_power) << "\n"
            << "mu_opt              " << fmt9(cert.mu_opt) << "\n"
            << "relative_error      " << fmt9(rel) << "\n";
  return 0;
}

int run_kyp_dual(const CommonOpts& opts) {
  const hinf::StateSpace sys = hinf::load_system(opts.system_file);
  const hinf::FrequencyBand band = opts.band.resolve().canonical();

  const hinf::DualProblem dual = band.is_full()
                                     ? hinf::build_dual_kyp(sys)
                                     : hinf::build_dual_gkyp(sys, band);
  const hinf::DualSolution d = hinf::solve_dual_lmi(dual, opts.solver);
  const hinf::SolverSolution primal =
      hinf::solve(hinf::build_primal(sys, band), opts.solver);
  const double gap = std::abs(d.lambda - primal.objective);

  if (opts.as_json) {
    json j;
    j["lambda"] = d.lambda;
    j["band"] = opts.band.describe();
    j["status"] = hinf::to_string(d.status);
    j["p_norm"] = d.p_norm;
    j["attained"] = !d.not_attained;
    j["primal_objective"] = primal.objective;
    j["primal_dual_gap"] = gap;
    j["iterations"] = d.iterations;
    std::cout << j.dump(2) << "\n";
    return 0;
  }

  std::cout << "lambda             " << fmt9(d.lambda) << "\n"
            << "band               " << opts.band.describe() << "\n"
            << "status             " << hinf::to_string(d.status) << "\n"
            << "p_norm             " << fmt9(d.p_norm) << "\n"
            << "primal_objective   " << fmt9(primal.objective) << "\n"
            << "primal_dual_gap    " << fmt9(gap) << "\n"
            << "attainment         "
            << (d.not_attained ? "NOT-ATTAINED (||P|| exceeded cap)" : "ATTAINED")
            << "\n";
  return 0;
}

int run_bode(const CommonOpts& opts, int grid, const std::string& out_path) {
  const hinf::StateSpace sys = hinf::load_system(opts.system_file);
  hinf::require_schur_stable(sys);

  std::ofstream file;
  if (!out_path.empty()) file = open_output(out_path);
  std::ostream& out = out_path.empty() ? std::cout : file;

  out << "theta,gain\n";
  constexpr double pi = 3.14159265358979323846;
  for (int i = 0; i < grid; ++i) {
    const double theta = grid == 1 ? -pi : -pi + 2 * pi * i / (grid - 1);
    out << fmt_full(theta) << "," << fmt_full(hinf::gain(sys, theta)) << "\n";
  }
  if (!out.good()) throw hinf::Error("write failed: " + out_path);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"H-infinity analysis of discrete-time LTI systems: lifted SDP "
               "norm computation, worst-case sinusoid certificates, KYP duals "
               "and Bode data"};
  app.require_subcommand(1);

  CommonOpts norm_opts;
  CLI::App* norm_cmd = app.add_subcommand(
      "norm", "Compute the (band-restricted) H-infinity norm with certificate");
  add_common(norm_cmd, norm_opts, true);

  CommonOpts worst_opts;
  int steps = 10000;
  std::string worst_out;
  CLI::App* worst_cmd = app.add_subcommand(
      "worst-input", "Emit the worst-case input and response as CSV");
  add_common(worst_cmd, worst_opts, false);
  worst_cmd->add_option("--steps", steps, "Number of simulation steps")
      ->check(CLI::PositiveNumber);
  worst_cmd->add_option("--out", worst_out, "Output CSV path (default stdout)");

  CommonOpts dual_opts;
  CLI::App* dual_cmd = app.add_subcommand(
      "kyp-dual", "Solve the (generalized) KYP dual LMI and diagnose attainment");
  add_common(dual_cmd, dual_opts, true);

  CommonOpts bode_opts;
  int grid = 1024;
  std::string bode_out;
  CLI::App* bode_cmd =
      app.add_subcommand("bode", "Emit gain-versus-frequency CSV data");
  add_common(bode_cmd, bode_opts, false);
  bode_cmd->add_option("--grid", grid, "Number of grid rows")
      ->check(CLI::PositiveNumber);
  bode_cmd->add_option("--out", bode_out, "Output CSV path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (app.got_subcommand(norm_cmd)) return run_norm(norm_opts);
    if (app.got_subcommand(worst_cmd))
      return run_worst_input(worst_opts, steps, worst_out);
    if (app.got_subcommand(dual_cmd)) return run_kyp_dual(dual_opts);
    if (app.got_subcommand(bode_cmd)) return run_bode(bode_opts, grid, bode_out);
  } catch (const hinf::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const hinf::StabilityError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUnstable;
  } catch (const hinf::DimensionError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const hinf::Error& e) {
    const std::string what = e.what();
    if (what.rfind("cannot open output file", 0) == 0 ||
        what.rfind("write failed", 0) == 0) {
      std::cerr << "error: " << what << "\n";
      return kExitOutput;
    }
    std::cerr << "error: " << what << "\n";
    return kExitSolver;
  }
  return kExitUsage;
}
