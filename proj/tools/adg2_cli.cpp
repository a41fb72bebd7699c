// adg2: verification suites, maximal-section solver, gauge and Fueter evaluation.
// Exit codes: 0 pass/converged, 1 check failure or non-convergence, 2 input error.

#include <CLI11.hpp>

#include <cmath>
#include <iostream>
#include <sstream>
#include <string>

#include "adg2/gauge_fueter.hpp"
#include "adg2/io.hpp"
#include "adg2/maxsec.hpp"
#include "adg2/verify.hpp"

namespace {

using namespace adg2;

constexpr int kOk = 0;
constexpr int kFail = 1;
constexpr int kInputError = 2;

// Writes to `path` atomically, or to stdout when the path is empty or "-".
void emit(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-")
    std::cout << content;
  else
    atomic_write(path, content);
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

int cmd_verify(const std::string& suite, std::uint64_t seed, bool corrupt, bool timing, const std::string& out) {
  VerifyOptions opt;
  opt.seed = seed;
  opt.corrupt_conventions = corrupt;
  Report rep = run_suite(suite, opt);
  emit(out, dump(rep.to_json(timing)));
  for (const auto& c : rep.checks)
    if (!c.pass) std::cerr << "FAIL " << c.id << " (max_residual " << c.max_residual << ")\n";
  return rep.all_pass() ? kOk : kFail;
}

int cmd_maxsec_solve(const std::string& input, const std::string& boundary, double tol, int max_iter,
                     const std::string& out, const std::string& report) {
  PositiveSectionGrid init = grid_from_json(read_json_file(input));
  SolveOptions opt;
  opt.tol = tol;
  opt.max_iter = max_iter;
  SolveResult res = boundary.empty() ? solve_dirichlet(init, opt)
                                     : solve_dirichlet(grid_from_json(read_json_file(boundary)), init, opt);
  if (!out.empty()) atomic_write(out, dump(grid_to_json(res.grid)));
  if (!report.empty()) atomic_write(report, history_csv(res.history));
  Json summary = {{"converged", res.converged},
                  {"iterations", res.iterations},
                  {"grad_inf_norm", res.residual},
                  {"area", area(res.grid)},
                  {"min_eig_G", min_eig_G(res.grid)}};
  if (!res.diagnostic.empty()) summary["diagnostic"] = res.diagnostic;
  std::cout << dump(summary);
  if (!res.converged) {
    std::cerr << "not converged: " << res.diagnostic << "\n";
    return kFail;
  }
  return kOk;
}

Eigen::MatrixXd read_psi(const std::string& path) {
  Json j = read_json_file(path);
  if (j.is_object()) return matrix_from_json(require(j, "psi", ""), "/psi", kH2Dim, kH2Dim);
  return matrix_from_json(j, "", kH2Dim, kH2Dim);
}

int cmd_maxsec_dualize(const std::string& psi_path, const std::string& input, const std::string& out) {
  PositiveSectionGrid s = grid_from_json(read_json_file(input));
  Eigen::MatrixXd Psi = read_psi(psi_path);
  if (!is_isometry(s.Q, Psi, 1e-9)) throw SchemaError("", "psi is not an isometry of the grid's pairing Q");
  PositiveSectionGrid d = dualize(s, Psi);
  emit(out, dump(grid_to_json(d)));
  std::cerr << "area " << area(s) << " -> " << area(d) << "\n";
  return kOk;
}

int cmd_gauge_residual(const std::string& field, const std::string& out) {
  LatticeConnection A = connection_from_json(read_json_file(field));
  InstantonResidual r = instanton_residual(A);
  emit(out, residual_csv(A.grid(), r));
  Json summary = {{"fibre_max", r.fibre.max_abs()}, {"horiz_max", r.horiz.max_abs()}};
  (out.empty() || out == "-" ? std::cerr : std::cout) << summary.dump() << "\n";
  return kOk;
}

ConnectionPath read_path(const std::string& path) {
  Json j = read_json_file(path);
  const Json& times = require_array(require(j, "times", ""), "/times");
  const Json& samples = require_array(require(j, "samples", ""), "/samples", times.size());
  std::vector<double> t;
  for (std::size_t k = 0; k < times.size(); ++k) t.push_back(require_number(times[k], pointer_join("/times", k)));
  std::vector<LatticeConnection> conns;
  for (std::size_t k = 0; k < samples.size(); ++k) {
    try {
      conns.push_back(connection_from_json(samples[k]));
    } catch (const SchemaError& e) {
      throw SchemaError(pointer_join("/samples", k) + e.pointer(), e.what());
    }
  }
  return ConnectionPath::from_samples(std::move(t), std::move(conns));
}

int cmd_gauge_cs(const std::string& path, const std::string& out) {
  ConnectionPath p = read_path(path);
  emit(out, dump(Json{{"cs_instanton", cs_instanton(p)}, {"samples", p.times.size()}}));
  return kOk;
}

int cmd_fueter_residual(const std::string& section, const std::string& out) {
  FueterSectionGrid s = section_from_json(read_json_file(section));
  Eigen::Matrix4Xd d = fueter_residual(s);
  emit(out, fueter_csv(s, d));
  double mx = d.size() ? d.cwiseAbs().maxCoeff() : 0.0;
  (out.empty() || out == "-" ? std::cerr : std::cout) << Json{{"max_abs", mx}}.dump() << "\n";
  return kOk;
}

int cmd_fueter_from_connection(const std::string& field, double flat_tol, const std::string& out) {
  LatticeConnection A = connection_from_json(read_json_file(field));
  emit(out, dump(section_to_json(holonomy_section(A, flat_tol))));
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"adg2: adiabatic G2 fibration toolkit"};
  app.require_subcommand(1);

  std::string suite, out, input, boundary, report, psi, field, path, section;
  std::uint64_t seed = 7;
  bool corrupt = false, timing = false;
  double tol = 1e-8, flat_tol = 1e-2;
  int max_iter = 500;

  auto* verify = app.add_subcommand("verify", "run an exact identity suite");
  verify->add_option("suite", suite, "excalc, g2lin, hk, spin or all")->required();
  verify->add_option("--seed", seed, "randomness seed");
  verify->add_option("--out", out, "report path (default stdout)");
  verify->add_flag("--timing", timing, "record runtime_ms in the report");
  verify->add_flag("--corrupt-conventions", corrupt)->group("");  // test hook

  auto* maxsec = app.add_subcommand("maxsec", "positive sections of the (3,19) lattice");
  maxsec->require_subcommand(1);
  auto* solve = maxsec->add_subcommand("solve", "solve the maximal submanifold equation with Dirichlet data");
  solve->add_option("--input", input, "grid JSON (boundary values and initial interior)")->required();
  solve->add_option("--boundary", boundary, "optional grid JSON whose boundary values override --input");
  solve->add_option("--tol", tol, "tolerance on the gradient sup-norm");
  solve->add_option("--max-iter", max_iter, "iteration cap");
  solve->add_option("--out", out, "solved grid JSON");
  solve->add_option("--report", report, "iteration history CSV");
  auto* dual = maxsec->add_subcommand("dualize", "apply a lattice isometry node-wise");
  dual->add_option("--psi", psi, "22x22 isometry JSON")->required();
  dual->add_option("--input", input, "grid JSON")->required();
  dual->add_option("--out", out, "output grid JSON (default stdout)");

  auto* gauge = app.add_subcommand("gauge", "lattice connections on B x T4");
  gauge->require_subcommand(1);
  auto* gres = gauge->add_subcommand("residual", "adiabatic instanton residual");
  gres->add_option("--field", field, "connection JSON")->required();
  gres->add_option("--out", out, "residual CSV (default stdout)");
  auto* gcs = gauge->add_subcommand("cs", "instanton Chern-Simons functional of a path");
  gcs->add_option("--path", path, "path JSON {times, samples}")->required();
  gcs->add_option("--out", out, "result JSON (default stdout)");

  auto* fueter = app.add_subcommand("fueter", "sections of the dual torus bundle");
  fueter->require_subcommand(1);
  auto* fres = fueter->add_subcommand("residual", "Fueter operator of a section");
  fres->add_option("--section", section, "section JSON")->required();
  fres->add_option("--out", out, "residual CSV (default stdout)");
  auto* ffc = fueter->add_subcommand("from-connection", "holonomy section of a fibrewise flat U(1) connection");
  ffc->add_option("--field", field, "connection JSON")->required();
  ffc->add_option("--flat-tol", flat_tol, "largest fibre curvature accepted");
  ffc->add_option("--out", out, "section JSON (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kInputError;
  }

  try {
    if (*verify) return cmd_verify(suite, seed, corrupt, timing, out);
    if (*solve) return cmd_maxsec_solve(input, boundary, tol, max_iter, out, report);
    if (*dual) return cmd_maxsec_dualize(psi, input, out);
    if (*gres) return cmd_gauge_residual(field, out);
    if (*gcs) return cmd_gauge_cs(path, out);
    if (*fres) return cmd_fueter_residual(section, out);
    if (*ffc) return cmd_fueter_from_connection(field, flat_tol, out);
  } catch (const SchemaError& e) {
    std::cerr << "schema error at " << (e.pointer().empty() ? "/" : e.pointer()) << ": " << e.what() << "\n";
    return kInputError;
  } catch (const NotFlatError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kInputError;
  } catch (const NotPositiveError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kInputError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kInputError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  }
  return kInputError;
}
