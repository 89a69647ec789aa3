// Command line front end: ingest a problem file, run the stability /
// Riccati / saddle pipeline, and verify solutions by Monte-Carlo.
//
// Exit codes:
//   0  success
//   1  internal error
//   2  problem or report file could not be parsed
//  10  no stabilizing Riccati solution
//  11  stabilizer search inconclusive (rank-deficient N, budget exhausted)
//  12  range condition violated
//  13  feedforward drift not Hurwitz
//  14  stabilizer synthesis found nothing within budget
//  20  Monte-Carlo verification failed

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "lqgame/problem_io.hpp"
#include "lqgame/version.hpp"

namespace {

using json = nlohmann::ordered_json;
using namespace lqgame;

constexpr int kExitParse = 2;
constexpr int kExitNoStabilizing = 10;
constexpr int kExitInconclusive = 11;
constexpr int kExitRangeViolation = 12;
constexpr int kExitEtaDrift = 13;
constexpr int kExitSynthesisNotFound = 14;
constexpr int kExitVerifyFailed = 20;

json matrix_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

json vector_json(const Vector& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

Matrix matrix_from_json_text(const std::string& text, const std::string& what) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(what + ": " + e.what());
  }
  if (!j.is_array()) throw ParseError(what + ": expected nested row arrays");
  const size_t rows = j.size();
  size_t cols = rows > 0 && j[0].is_array() ? j[0].size() : 0;
  Matrix m(rows, cols);
  for (size_t r = 0; r < rows; ++r) {
    if (!j[r].is_array() || j[r].size() != cols) {
      throw ParseError(what + ": ragged rows");
    }
    for (size_t c = 0; c < cols; ++c) m(r, c) = j[r][c].get<double>();
  }
  return m;
}

struct CommonFlags {
  std::optional<std::uint64_t> seed;
  std::optional<int> paths;
  std::optional<double> dt;
  std::optional<double> horizon;
  std::optional<double> tol;
  std::string output = "json";
  std::string out_path;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--seed", flags.seed, "Override the simulation / search seed");
  cmd->add_option("--paths", flags.paths, "Override the Monte-Carlo path count");
  cmd->add_option("--dt", flags.dt, "Override the simulation step");
  cmd->add_option("--horizon", flags.horizon, "Override the simulation horizon");
  cmd->add_option("--tol", flags.tol, "Riccati residual acceptance tolerance");
  cmd->add_option("--output", flags.output, "Report format: json or text")
      ->check(CLI::IsMember({"json", "text"}));
  cmd->add_option("-o,--out", flags.out_path, "Write the report to this file");
}

SimConfig resolve_sim(const Problem& pb, const CommonFlags& flags) {
  SimConfig cfg = pb.sim.to_config();
  if (flags.seed) cfg.seed = *flags.seed;
  if (flags.paths) cfg.paths = *flags.paths;
  if (flags.dt) cfg.dt = *flags.dt;
  if (flags.horizon) cfg.horizon_T = *flags.horizon;
  return cfg;
}

json config_json(const std::string& problem_path, const SimConfig& cfg,
                 const SynthesisOptions& opts) {
  return json{{"problem", problem_path},
              {"are_tol", opts.are.tol},
              {"classify_tol", opts.classify.tol},
              {"range_tol", opts.range_tol},
              {"seed", cfg.seed},
              {"sim", json{{"dt", cfg.dt},
                           {"horizon", cfg.horizon_T},
                           {"paths", cfg.paths},
                           {"antithetic", cfg.antithetic},
                           {"workers", cfg.workers}}}};
}

json tool_json() {
  return json{{"name", kToolName}, {"version", kVersion}};
}

json stability_json(const StabilityReport& rep) {
  json j{{"stable", rep.stable},
         {"boundary", rep.boundary},
         {"spectral_abscissa", rep.spectral_abscissa}};
  if (rep.lyapunov_P) {
    j["lyapunov_P"] = matrix_json(rep.lyapunov_P->mat());
    j["lyapunov_residual"] = rep.residual_norm;
  }
  return j;
}

json classification_json(const AREClassification& c) {
  json j{{"is_solution", c.is_solution},
         {"range_ok", c.range_ok},
         {"sign_ok", c.sign_ok},
         {"stabilizing", c.stabilizing},
         {"inconclusive", c.inconclusive},
         {"projector_rank", c.projector_rank},
         {"residual_norm", c.residual_norm},
         {"range_defect", c.range_defect}};
  if (c.gain_Theta) j["gain"] = matrix_json(*c.gain_Theta);
  if (c.Pi) j["Pi"] = matrix_json(*c.Pi);
  if (c.unique_gain) j["unique_gain"] = matrix_json(*c.unique_gain);
  return j;
}

json are_section(const GameSpec& spec, const std::vector<SymMatrix>& roots,
                 const ClassifyOptions& copts) {
  json list = json::array();
  for (const SymMatrix& p : roots) {
    list.push_back(json{{"P", matrix_json(p.mat())},
                        {"residual", are_residual(spec, p).norm_inf()},
                        {"classification",
                         classification_json(classify(spec, p, copts))}});
  }
  return json{{"solutions", std::move(list)}};
}

std::string series_csv(const PathEnsemble& ens) {
  std::ostringstream csv;
  csv << "t,mean_square_x\n";
  const size_t stride = std::max<size_t>(1, ens.times.size() / 200);
  for (size_t i = 0; i < ens.times.size(); i += stride) {
    csv << ens.times[i] << "," << ens.mean_square(static_cast<int>(i)) << "\n";
  }
  return csv.str();
}

void emit(const json& report, const CommonFlags& flags) {
  std::string text;
  if (flags.output == "json") {
    text = report.dump(2) + "\n";
  } else {
    std::ostringstream os;
    os << report["tool"]["name"].get<std::string>() << " "
       << report["tool"]["version"].get<std::string>() << "\n";
    for (const auto& [key, value] : report.items()) {
      if (key == "tool") continue;
      os << "[" << key << "]\n" << value.dump(2) << "\n";
    }
    text = os.str();
  }
  if (flags.out_path.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(flags.out_path);
    out << text;
  }
}

int run_check_stability(const std::string& problem_path, const std::string& theta_text,
                        const CommonFlags& flags) {
  const Problem pb = load_problem(problem_path);
  const SimConfig cfg = resolve_sim(pb, flags);
  json report;
  report["tool"] = tool_json();
  report["config"] = config_json(problem_path, cfg, {});

  const StabilityReport open_loop =
      is_l2_stable(UncontrolledSystem(pb.spec.A, pb.spec.C));
  report["stability"] = json{{"open_loop", stability_json(open_loop)}};

  const ControlledSystem sys = pb.spec.system();
  int exit_code = 0;
  if (!theta_text.empty()) {
    const Matrix theta = matrix_from_json_text(theta_text, "--theta");
    report["stability"]["theta"] = matrix_json(theta);
    report["stability"]["is_stabilizer"] = is_stabilizer(theta, sys);
  } else {
    const auto theta = synthesize_stabilizer(sys, 4000, cfg.seed);
    if (theta) {
      report["stability"]["synthesized_theta"] = matrix_json(*theta);
      report["stability"]["is_stabilizer"] = true;
    } else {
      report["stability"]["synthesized_theta"] = nullptr;
      report["diagnostics"] = json::array({"stabilizer synthesis exhausted its budget"});
      exit_code = kExitSynthesisNotFound;
    }
  }
  emit(report, flags);
  return exit_code;
}

int run_solve(const std::string& problem_path, const CommonFlags& flags) {
  const Problem pb = load_problem(problem_path);
  const SimConfig cfg = resolve_sim(pb, flags);
  SynthesisOptions opts;
  opts.are.seed = cfg.seed;
  opts.classify.seed = cfg.seed;
  if (flags.tol) opts.are.tol = *flags.tol;

  json report;
  report["tool"] = tool_json();
  report["config"] = config_json(problem_path, cfg, opts);
  report["stability"] =
      json{{"open_loop", stability_json(is_l2_stable(
                UncontrolledSystem(pb.spec.A, pb.spec.C)))}};

  const std::vector<SymMatrix> roots = solve_are(pb.spec, opts.are);
  report["are"] = are_section(pb.spec, roots, opts.classify);

  const SynthesisResult result = synthesize(pb.spec, opts);
  int exit_code = 0;
  if (const auto* sol = std::get_if<SaddleSolution>(&result)) {
    json saddle;
    saddle["found"] = true;
    saddle["solution"] = json::parse(serialize_saddle(*sol));
    saddle["value"] = json{{"quadratic", matrix_json(sol->P.mat())},
                           {"linear", vector_json(2.0 * sol->eta.eval(0.0))},
                           {"constant", sol->value_constant}};
    saddle["value_at_x0"] = value_at(*sol, pb.x0);
    report["saddle"] = std::move(saddle);
  } else {
    const Diagnosis& diag = std::get<Diagnosis>(result);
    report["saddle"] = json{{"found", false},
                            {"diagnosis", to_string(diag.kind)},
                            {"detail", diag.detail}};
    switch (diag.kind) {
      case DiagnosisKind::NoStabilizingSolution: exit_code = kExitNoStabilizing; break;
      case DiagnosisKind::StabilizerSearchInconclusive:
        exit_code = kExitInconclusive;
        break;
      case DiagnosisKind::RangeViolation: exit_code = kExitRangeViolation; break;
      case DiagnosisKind::EtaDriftUnstable: exit_code = kExitEtaDrift; break;
    }
  }
  emit(report, flags);
  return exit_code;
}

int run_verify(const std::string& problem_path, const std::string& report_path,
               const CommonFlags& flags) {
  const Problem pb = load_problem(problem_path);
  const SimConfig cfg = resolve_sim(pb, flags);

  std::ifstream in(report_path);
  if (!in) throw ParseError(report_path + ": cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  json prior;
  try {
    prior = json::parse(ss.str());
  } catch (const json::parse_error& e) {
    throw ParseError(report_path + ": " + e.what());
  }
  if (!prior.contains("saddle") || !prior["saddle"].value("found", false)) {
    throw ParseError(report_path + ": report has no saddle solution to verify");
  }
  const SaddleSolution sol = parse_saddle(prior["saddle"]["solution"].dump());

  json verification;
  json rows = json::array();
  bool all_ok = true;

  const PathEnsemble ens = simulate(pb.spec, sol.Theta, sol.u_star, pb.x0, cfg);
  const CostEstimate cost = estimate_cost(pb.spec, ens, sol.Theta, sol.u_star);
  const double value = value_at(sol, pb.x0);
  // 3 SE for the sampling error, the fitted tail for the horizon cutoff,
  // and a 10 dt (1 + |V|) allowance for the Euler weak bias, which the
  // standard error cannot see when the loop carries little or no noise.
  const double value_band = 3.0 * cost.std_error + ens.truncation_tail_bound +
                            10.0 * cfg.dt * (1.0 + std::abs(value));
  const bool value_ok = std::abs(cost.mean - value) <= value_band;
  all_ok = all_ok && value_ok;
  rows.push_back(json{{"label", "value"},
                      {"estimate", cost.mean},
                      {"std_error", cost.std_error},
                      {"oracle", value},
                      {"band", value_band},
                      {"verdict", value_ok ? "pass" : "fail"}});

  const StationarityReport stat = verify_stationarity(pb.spec, sol, pb.x0, cfg);
  all_ok = all_ok && stat.ok;
  rows.push_back(json{{"label", "stationarity"},
                      {"estimate", stat.max_mean_residual},
                      {"std_error", stat.max_std_error},
                      {"oracle", 0.0},
                      {"band", stat.tolerance},
                      {"verdict", stat.ok ? "pass" : "fail"}});

  // Feedforward perturbations keep the loop matrix unchanged, so they are
  // always simulable; one per player.
  std::vector<SaddlePerturbation> perts;
  for (int player = 1; player <= 2; ++player) {
    const Eigen::Index mi = player == 1 ? pb.spec.m1() : pb.spec.m2();
    if (mi == 0) continue;
    ExpPoly delta(mi);
    delta.add_term(0, 1.0, Vector::Constant(mi, 0.5));
    perts.push_back(SaddlePerturbation{player, std::nullopt, delta,
                                       "u" + std::to_string(player) + "+0.5e^-t"});
  }
  try {
    const SaddleReport saddle_rep = verify_saddle(pb.spec, sol, perts, pb.x0, cfg);
    for (const SaddleArm& arm : saddle_rep.arms) {
      rows.push_back(json{{"label", arm.perturbation.label},
                          {"estimate", arm.cost.mean},
                          {"std_error", arm.cost.std_error},
                          {"paired_diff", arm.paired_diff.mean},
                          {"paired_se", arm.paired_diff.std_error},
                          {"verdict", arm.ok ? "pass" : "fail"}});
    }
  } catch (const SaddleViolation& v) {
    all_ok = false;
    for (const SaddleArm& arm : v.report.arms) {
      rows.push_back(json{{"label", arm.perturbation.label},
                          {"estimate", arm.cost.mean},
                          {"std_error", arm.cost.std_error},
                          {"paired_diff", arm.paired_diff.mean},
                          {"paired_se", arm.paired_diff.std_error},
                          {"verdict", arm.ok ? "pass" : "fail"}});
    }
  }

  verification["rows"] = std::move(rows);
  verification["tail_bound"] = ens.truncation_tail_bound;
  verification["all_ok"] = all_ok;

  json report = prior;
  report["tool"] = tool_json();
  report["config"]["verify_sim"] = json{{"dt", cfg.dt},
                                        {"horizon", cfg.horizon_T},
                                        {"paths", cfg.paths},
                                        {"seed", cfg.seed},
                                        {"antithetic", cfg.antithetic}};
  report["verification"] = std::move(verification);
  report["series"] = json{{"csv", series_csv(ens)}};
  emit(report, flags);
  return all_ok ? 0 : kExitVerifyFailed;
}

int run_report(const std::string& report_path, bool csv_only,
               const CommonFlags& flags) {
  std::ifstream in(report_path);
  if (!in) throw ParseError(report_path + ": cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  json report;
  try {
    report = json::parse(ss.str());
  } catch (const json::parse_error& e) {
    throw ParseError(report_path + ": " + e.what());
  }
  if (csv_only) {
    if (!report.contains("series")) throw ParseError(report_path + ": no series section");
    std::cout << report["series"]["csv"].get<std::string>();
    return 0;
  }
  CommonFlags f = flags;
  if (f.output.empty()) f.output = "text";
  emit(report, f);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Infinite-horizon stochastic linear-quadratic zero-sum games: "
               "stability tests, Riccati solutions, saddle synthesis and "
               "Monte-Carlo verification"};
  app.require_subcommand(1);

  std::string problem_path, report_path, theta_text;
  bool csv_only = false;
  CommonFlags flags;

  CLI::App* check = app.add_subcommand("check-stability",
                                       "Mean-square stability and stabilizer checks");
  check->add_option("problem", problem_path, "Problem file")->required();
  check->add_option("--theta", theta_text,
                    "Feedback gain as nested JSON rows, e.g. [[-1.0]]");
  add_common(check, flags);

  CLI::App* solve = app.add_subcommand("solve", "Run the full synthesis pipeline");
  solve->add_option("problem", problem_path, "Problem file")->required();
  add_common(solve, flags);

  CLI::App* verify = app.add_subcommand("verify",
                                        "Monte-Carlo verification of a solve report");
  verify->add_option("problem", problem_path, "Problem file")->required();
  verify->add_option("--report", report_path, "Report produced by solve")->required();
  add_common(verify, flags);

  CLI::App* render = app.add_subcommand("report", "Render a report file");
  render->add_option("report", report_path, "Report file")->required();
  render->add_flag("--csv", csv_only, "Print only the numeric series CSV");
  add_common(render, flags);

  CLI11_PARSE(app, argc, argv);

  try {
    if (check->parsed()) return run_check_stability(problem_path, theta_text, flags);
    if (solve->parsed()) return run_solve(problem_path, flags);
    if (verify->parsed()) return run_verify(problem_path, report_path, flags);
    if (render->parsed()) return run_report(report_path, csv_only, flags);
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitParse;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
