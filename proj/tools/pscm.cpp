#include <CLI11.hpp>
#include <cmath>
#include <cstdlib>
#include <iostream>
#include <nlohmann/json.hpp>
#include <optional>
#include <sstream>
#include <string>

#include "pscm/dot.hpp"
#include "pscm/evaluation.hpp"
#include "pscm/experiments.hpp"
#include "pscm/identifiability.hpp"
#include "pscm/io.hpp"
#include "pscm/model.hpp"
#include "pscm/recovery.hpp"
#include "pscm/separation.hpp"

namespace {

using namespace pscm;

bool log_enabled() {
  const char* v = std::getenv("PSCM_LOG");
  return v && *v && std::string(v) != "0" && std::string(v) != "off";
}

void log_note(const std::string& msg) {
  if (log_enabled()) std::cerr << "[pscm] " << msg << "\n";
}

void emit(const std::string& path, const std::string& content) {
  if (path == "-")
    std::cout << content;
  else
    write_text_file(path, content);
}

void emit_matrix(const std::string& path, const Matrix& m) {
  if (path == "-") {
    write_matrix_csv(std::cout, m);
  } else {
    write_matrix_csv_file(path, m);
  }
}

std::vector<std::string> split_names(const std::string& csv) {
  std::vector<std::string> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(item);
  return out;
}

const char* kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::config: return "config";
    case ErrorKind::data: return "data";
    case ErrorKind::model: return "model";
    case ErrorKind::internal: return "internal";
  }
  return "internal";
}

nlohmann::json mask_to_json(const std::vector<std::vector<bool>>& mask) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : mask) {
    nlohmann::json r = nlohmann::json::array();
    for (bool b : row) r.push_back(b ? 1 : 0);
    rows.push_back(std::move(r));
  }
  return rows;
}

nlohmann::json assumptions_to_json(const AssumptionsReport& rep) {
  nlohmann::json issues = nlohmann::json::array();
  for (const auto& issue : rep.issues)
    issues.push_back(nlohmann::json{{"what", issue.what}, {"i", issue.i}, {"j", issue.j}});
  return nlohmann::json{{"model_valid", rep.model_valid},
                        {"edge_supports_ok", rep.edge_supports_ok},
                        {"ancestor_supports_ok", rep.ancestor_supports_ok},
                        {"generic_rank_ok", rep.generic_rank_ok},
                        {"overall", rep.overall()},
                        {"issues", std::move(issues)}};
}

struct GenerateArgs {
  int p = 0;
  int m = 0;
  double ratio = 0.0;
  double d_e = 1.5;
  double d_o = 1.5;
  double coeff_lo = 0.5;
  double coeff_hi = 1.0;
  bool distinct = false;
  std::uint64_t seed = 0;
  std::string out = "-";
};

void cmd_generate(const GenerateArgs& args) {
  GenerationConfig cfg;
  cfg.p = args.p;
  if (args.m > 0 && args.ratio > 0) throw config_error("pass either --m or --ratio, not both");
  cfg.m = args.m > 0 ? args.m
                     : args.ratio > 0 ? static_cast<int>(std::llround(args.ratio * args.p))
                                      : args.p;
  cfg.causal_degree = args.d_e;
  cfg.exogenous_degree = args.d_o;
  cfg.coeff_lo = args.coeff_lo;
  cfg.coeff_hi = args.coeff_hi;
  cfg.distinct_source = args.distinct;
  cfg.seed = args.seed;
  Pscm model = generate_random_model(cfg);
  log_note("generated model with " + std::to_string(model.generation_rejections) + " rejections");
  emit(args.out, model_to_json_string(model));
}

struct SimulateArgs {
  std::string model_path;
  int n = 0;
  std::string dist = "uniform";
  std::uint64_t seed = 0;
  std::string out = "-";
};

void cmd_simulate(const SimulateArgs& args) {
  Pscm model = read_model_file(args.model_path);
  Dataset data = simulate(model, args.n, source_dist_from_string(args.dist), args.seed);
  emit_matrix(args.out, data.X);
}

struct SeparateArgs {
  std::string mode = "ica";
  std::string model_path;
  std::string data_path;
  std::string method = "bootstrap";
  int m = 0;
  std::string contrast = "logcosh";
  int max_iter = 500;
  double conv_tol = 1e-6;
  int n_boot = 50;
  double confidence = 0.95;
  std::uint64_t seed = 0;
  std::string out = "-";
  std::string sidecar;
};

void cmd_separate(const SeparateArgs& args) {
  if (args.mode == "oracle") {
    if (args.model_path.empty()) throw config_error("--mode oracle needs --model");
    Pscm model = read_model_file(args.model_path);
    MixingMatrix mixing = oracle_mixing(model, args.seed);
    emit_matrix(args.out, mixing.W);
    return;
  }
  if (args.mode != "ica") throw config_error("unknown separation mode '" + args.mode + "'");
  if (args.data_path.empty()) throw config_error("--mode ica needs --data");
  Dataset data = read_dataset_file(args.data_path);
  IcaConfig ica_cfg;
  ica_cfg.m = args.m;
  ica_cfg.contrast = args.contrast;
  ica_cfg.max_iter = args.max_iter;
  ica_cfg.conv_tol = args.conv_tol;
  ica_cfg.seed = args.seed;

  if (args.method == "fastica") {
    IcaResult result = fastica(data, ica_cfg);
    for (const auto& w : result.warnings) log_note(w);
    emit_matrix(args.out, result.mixing.W);
    return;
  }
  if (args.method != "bootstrap")
    throw config_error("unknown separation method '" + args.method + "'");
  BootstrapConfig boot_cfg;
  boot_cfg.n_boot = args.n_boot;
  boot_cfg.confidence = args.confidence;
  BootstrapResult result = bootstrap_prune(data, ica_cfg, boot_cfg);
  for (const auto& w : result.warnings) log_note(w);
  emit_matrix(args.out, result.mixing.W);
  nlohmann::json sidecar{{"n_boot", boot_cfg.n_boot},
                         {"confidence", boot_cfg.confidence},
                         {"replicates_used", result.replicates_used},
                         {"kept_mask", mask_to_json(result.kept_mask)},
                         {"warnings", result.warnings}};
  std::string sidecar_path = args.sidecar;
  if (sidecar_path.empty() && args.out != "-") sidecar_path = args.out + ".json";
  if (!sidecar_path.empty()) emit(sidecar_path, sidecar.dump(2) + "\n");
}

struct CheckArgs {
  std::string model_path;
  std::string variant = "full";
  std::string marriage = "hall";
  double eps = 1e-9;
  std::string out = "-";
};

void cmd_check(const CheckArgs& args) {
  Pscm model = read_model_file(args.model_path);
  VerifyVariant variant;
  if (args.variant == "paper") variant = VerifyVariant::paper;
  else if (args.variant == "full") variant = VerifyVariant::full;
  else throw config_error("unknown variant '" + args.variant + "'");
  MarriageMethod method;
  if (args.marriage == "hall") method = MarriageMethod::hall;
  else if (args.marriage == "rank") method = MarriageMethod::rank;
  else if (args.marriage == "both") method = MarriageMethod::both;
  else throw config_error("unknown marriage method '" + args.marriage + "'");

  ConditionReport report = verify_model(model, variant, args.eps, method);
  nlohmann::json out = nlohmann::json::parse(condition_report_to_json_string(report));
  out["assumptions"] = assumptions_to_json(check_assumptions(model, args.eps));
  try {
    DistinctSourceVerdict verdict = check_distinct_source_condition(model, args.eps);
    nlohmann::json ds{{"ok", verdict.ok}, {"notes", verdict.notes}};
    if (verdict.witness.present) {
      ds["witness_source"] = verdict.witness.source;
      ds["witness_variable"] = verdict.witness.variable;
      ds["witness"] = verdict.witness.text;
    }
    out["distinct_source"] = std::move(ds);
  } catch (const Error&) {
    out["distinct_source"] = nullptr;  // screen needs private sources per variable
  }
  emit(args.out, out.dump(2) + "\n");
}

struct RecoverArgs {
  std::string mixing_path;
  std::string model_path;
  std::string mode = "mixing";
  double eps = 1e-9;
  double prune = 0.1;
  double ls_tol = std::numeric_limits<double>::infinity();
  bool best_effort = false;
  bool randomize_ties = false;
  std::uint64_t tie_seed = 0;
  std::uint64_t seed = 0;
  std::string out = "-";
  std::string dot_path;
  bool dot_sources = false;
  std::string names_csv;
};

void cmd_recover(const RecoverArgs& args) {
  MixingMatrix mixing;
  if (!args.mixing_path.empty()) {
    mixing.W = read_matrix_csv_file(args.mixing_path);
    mixing.eps = args.eps;
  } else if (args.mode == "oracle" && !args.model_path.empty()) {
    Pscm model = read_model_file(args.model_path);
    mixing = oracle_mixing(model, args.seed, args.eps);
  } else {
    throw config_error("pass --mixing, or --mode oracle with --model");
  }

  RecoveryConfig cfg;
  cfg.eps = args.eps;
  cfg.prune_threshold = args.prune;
  cfg.ls_residual_tol = args.ls_tol;
  cfg.best_effort = args.best_effort;
  cfg.randomize_ties = args.randomize_ties;
  cfg.tie_seed = args.tie_seed;
  RecoveryResult result = recover(mixing, cfg);
  for (const auto& w : result.warnings) log_note(w);
  emit(args.out, recovery_result_to_json_string(result, args.prune));
  if (!args.dot_path.empty())
    emit(args.dot_path, recovery_to_dot(result, args.prune, split_names(args.names_csv),
                                        args.dot_sources, args.eps));
}

struct EvaluateArgs {
  std::string model_path;
  std::string a_true_path;
  std::string b_true_path;
  std::string result_path;
  std::string a_hat_path;
  std::string b_hat_path;
  double threshold = 0.1;
  bool csv = false;
  std::string out = "-";
};

void cmd_evaluate(const EvaluateArgs& args) {
  Matrix A_true, B_true, A_hat, B_hat;
  bool have_b_true = false, have_b_hat = false;
  if (!args.model_path.empty()) {
    Pscm model = read_model_file(args.model_path);
    A_true = model.A;
    B_true = model.B;
    have_b_true = true;
  } else if (!args.a_true_path.empty()) {
    A_true = read_matrix_csv_file(args.a_true_path);
    if (!args.b_true_path.empty()) {
      B_true = read_matrix_csv_file(args.b_true_path);
      have_b_true = true;
    }
  } else {
    throw config_error("pass --model or --a-true");
  }

  if (!args.result_path.empty()) {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(read_text_file(args.result_path));
    } catch (const nlohmann::json::exception& e) {
      throw data_error(args.result_path + ": " + std::string(e.what()));
    }
    if (!j.contains("A_hat")) throw data_error(args.result_path + ": missing field A_hat");
    A_hat = matrix_from_json(j["A_hat"], "A_hat");
    if (j.contains("B_hat")) {
      B_hat = matrix_from_json(j["B_hat"], "B_hat");
      have_b_hat = true;
    }
  } else if (!args.a_hat_path.empty()) {
    A_hat = read_matrix_csv_file(args.a_hat_path);
    if (!args.b_hat_path.empty()) {
      B_hat = read_matrix_csv_file(args.b_hat_path);
      have_b_hat = true;
    }
  } else {
    throw config_error("pass --result or --a-hat");
  }

  MetricsReport metrics = compare_adjacency(A_true, A_hat, args.threshold);
  std::optional<BMatchReport> b_match;
  if (have_b_true && have_b_hat) b_match = match_B(B_true, B_hat);

  if (args.csv) {
    std::string line = metrics_to_csv_line(metrics);
    line += ",";
    line += b_match ? format_double(b_match->frobenius) : "nan";
    emit(args.out, line + "\n");
    return;
  }
  nlohmann::json out = nlohmann::json::parse(metrics_to_json_string(metrics));
  if (b_match) {
    out["b_match_frobenius"] = b_match->frobenius;
    out["b_match_permutation"] = b_match->permutation;
  }
  emit(args.out, out.dump(2) + "\n");
}

struct ExportDotArgs {
  std::string model_path;
  std::string result_path;
  double prune = 0.1;
  double eps = 1e-9;
  bool dot_sources = false;
  std::string names_csv;
  std::string out = "-";
};

void cmd_export_dot(const ExportDotArgs& args) {
  if (!args.model_path.empty()) {
    Pscm model = read_model_file(args.model_path);
    emit(args.out, model_to_dot(model, args.eps, split_names(args.names_csv)));
    return;
  }
  if (args.result_path.empty()) throw config_error("pass --model or --result");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_text_file(args.result_path));
  } catch (const nlohmann::json::exception& e) {
    throw data_error(args.result_path + ": " + std::string(e.what()));
  }
  RecoveryResult result;
  result.A_hat = matrix_from_json(j.at("A_hat"), "A_hat");
  result.B_hat = matrix_from_json(j.at("B_hat"), "B_hat");
  emit(args.out,
       recovery_to_dot(result, args.prune, split_names(args.names_csv), args.dot_sources, args.eps));
}

struct ExperimentArgs {
  std::string kind;
  std::string setting;
  std::string grid;
  std::string mode = "oracle";
  std::string variant = "full";
  int trials = 100;
  int n = 1000;
  int n_boot = 50;
  double confidence = 0.95;
  double prune = 0.1;
  double eps = 1e-9;
  long long attempt_cap = 1000000;
  std::uint64_t seed = 0;
  int jobs = 1;
  std::string out_prefix = "pscm_experiment";
};

void cmd_experiment(const ExperimentArgs& args) {
  Setting setting = setting_from_string(args.setting);
  auto grid = parse_grid(args.grid, setting);
  if (args.kind == "satisfiability") {
    SatisfiabilityExperiment spec;
    spec.setting = setting;
    spec.variant = args.variant == "paper" ? VerifyVariant::paper : VerifyVariant::full;
    if (args.variant != "paper" && args.variant != "full")
      throw config_error("unknown variant '" + args.variant + "'");
    spec.grid = grid;
    spec.trials = args.trials;
    spec.attempt_cap = args.attempt_cap;
    spec.seed = args.seed;
    spec.jobs = args.jobs;
    auto outcome = run_satisfiability_experiment(spec);
    write_text_file(args.out_prefix + "_trials.csv", satisfiability_trials_csv(outcome));
    write_text_file(args.out_prefix + "_aggregates.json", satisfiability_aggregates_json(outcome));
    log_note("wrote " + args.out_prefix + "_trials.csv and _aggregates.json");
    return;
  }
  if (args.kind != "recovery") throw config_error("unknown experiment kind '" + args.kind + "'");
  RecoveryExperiment spec;
  spec.setting = setting;
  spec.mode = args.mode == "ica" ? MixingMode::ica : MixingMode::oracle;
  if (args.mode != "ica" && args.mode != "oracle")
    throw config_error("unknown mode '" + args.mode + "'");
  spec.grid = grid;
  spec.trials = args.trials;
  spec.n_samples = args.n;
  spec.n_boot = args.n_boot;
  spec.confidence = args.confidence;
  spec.prune_threshold = args.prune;
  spec.eps = args.eps;
  spec.attempt_cap = args.attempt_cap;
  spec.seed = args.seed;
  spec.jobs = args.jobs;
  auto outcome = run_recovery_experiment(spec);
  write_text_file(args.out_prefix + "_trials.csv", recovery_trials_csv(outcome));
  write_text_file(args.out_prefix + "_aggregates.json", recovery_aggregates_json(outcome));
  log_note("wrote " + args.out_prefix + "_trials.csv and _aggregates.json");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Linear propagation structural causal models: generation, identifiability "
               "checks, separation and structure recovery"};
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* sc_gen = app.add_subcommand("generate", "Sample a random model");
  sc_gen->add_option("--p", gen.p, "Observed variables")->required();
  sc_gen->add_option("--m", gen.m, "Sources (default p)");
  sc_gen->add_option("--ratio", gen.ratio, "Sources as a ratio of p");
  sc_gen->add_option("--de", gen.d_e, "Expected causal degree");
  sc_gen->add_option("--do", gen.d_o, "Expected exogenous degree");
  sc_gen->add_option("--coeff-lo", gen.coeff_lo, "Coefficient magnitude lower bound");
  sc_gen->add_option("--coeff-hi", gen.coeff_hi, "Coefficient magnitude upper bound");
  sc_gen->add_flag("--distinct-source", gen.distinct, "Give each variable a private source");
  sc_gen->add_option("--seed", gen.seed, "Random seed");
  sc_gen->add_option("--out", gen.out, "Output path or - for stdout");

  SimulateArgs sim;
  auto* sc_sim = app.add_subcommand("simulate", "Draw samples from a model");
  sc_sim->add_option("--model", sim.model_path, "Model JSON")->required();
  sc_sim->add_option("--n", sim.n, "Sample count")->required();
  sc_sim->add_option("--dist", sim.dist, "Source distribution: uniform, gaussian, laplace");
  sc_sim->add_option("--seed", sim.seed, "Random seed");
  sc_sim->add_option("--out", sim.out, "Output CSV path or -");

  SeparateArgs sep;
  auto* sc_sep = app.add_subcommand("separate", "Estimate the mixing matrix");
  sc_sep->add_option("--mode", sep.mode, "oracle or ica");
  sc_sep->add_option("--model", sep.model_path, "Model JSON (oracle mode)");
  sc_sep->add_option("--data", sep.data_path, "Data CSV (ica mode)");
  sc_sep->add_option("--method", sep.method, "bootstrap or fastica");
  sc_sep->add_option("--m", sep.m, "Components to extract (default: all rows)");
  sc_sep->add_option("--contrast", sep.contrast, "logcosh or cube");
  sc_sep->add_option("--max-iter", sep.max_iter, "Iteration cap per component");
  sc_sep->add_option("--conv-tol", sep.conv_tol, "Convergence tolerance");
  sc_sep->add_option("--nboot", sep.n_boot, "Bootstrap replicates");
  sc_sep->add_option("--confidence", sep.confidence, "Pruning confidence level");
  sc_sep->add_option("--seed", sep.seed, "Random seed");
  sc_sep->add_option("--out", sep.out, "Mixing CSV path or -");
  sc_sep->add_option("--sidecar", sep.sidecar, "Bootstrap sidecar JSON path");

  CheckArgs chk;
  auto* sc_chk = app.add_subcommand("check", "Verify identifiability conditions");
  sc_chk->add_option("--model", chk.model_path, "Model JSON")->required();
  sc_chk->add_option("--variant", chk.variant, "paper or full");
  sc_chk->add_option("--marriage", chk.marriage, "hall, rank or both");
  sc_chk->add_option("--eps", chk.eps, "Support threshold");
  sc_chk->add_option("--out", chk.out, "Report JSON path or -");

  RecoverArgs rec;
  auto* sc_rec = app.add_subcommand("recover", "Recover structure from a mixing estimate");
  sc_rec->add_option("--mixing", rec.mixing_path, "Mixing CSV");
  sc_rec->add_option("--model", rec.model_path, "Model JSON (with --mode oracle)");
  sc_rec->add_option("--mode", rec.mode, "mixing (default) or oracle");
  sc_rec->add_option("--eps", rec.eps, "Support threshold");
  sc_rec->add_option("--prune", rec.prune, "Edge pruning threshold");
  sc_rec->add_option("--ls-tol", rec.ls_tol, "Joint-solve relative residual tolerance");
  sc_rec->add_flag("--best-effort", rec.best_effort, "Keep going on inconsistent inputs");
  sc_rec->add_flag("--randomize-ties", rec.randomize_ties, "Randomize equal-support ordering");
  sc_rec->add_option("--tie-seed", rec.tie_seed, "Seed for tie randomization");
  sc_rec->add_option("--seed", rec.seed, "Seed for oracle scrambling");
  sc_rec->add_option("--out", rec.out, "Result JSON path or -");
  sc_rec->add_option("--dot", rec.dot_path, "Also write the pruned graph as DOT");
  sc_rec->add_flag("--dot-sources", rec.dot_sources, "Include sources in the DOT output");
  sc_rec->add_option("--names", rec.names_csv, "Comma-separated variable names");

  EvaluateArgs eva;
  auto* sc_eva = app.add_subcommand("evaluate", "Compare a recovery against the truth");
  sc_eva->add_option("--model", eva.model_path, "True model JSON");
  sc_eva->add_option("--a-true", eva.a_true_path, "True adjacency CSV");
  sc_eva->add_option("--b-true", eva.b_true_path, "True exogenous mixture CSV");
  sc_eva->add_option("--result", eva.result_path, "Recovery result JSON");
  sc_eva->add_option("--a-hat", eva.a_hat_path, "Estimated adjacency CSV");
  sc_eva->add_option("--b-hat", eva.b_hat_path, "Estimated exogenous mixture CSV");
  sc_eva->add_option("--threshold", eva.threshold, "Edge threshold");
  sc_eva->add_flag("--csv", eva.csv, "One-line CSV instead of JSON");
  sc_eva->add_option("--out", eva.out, "Output path or -");

  ExportDotArgs dot;
  auto* sc_dot = app.add_subcommand("export-dot", "Render a model or recovery as DOT");
  sc_dot->add_option("--model", dot.model_path, "Model JSON");
  sc_dot->add_option("--result", dot.result_path, "Recovery result JSON");
  sc_dot->add_option("--prune", dot.prune, "Edge pruning threshold for results");
  sc_dot->add_option("--eps", dot.eps, "Support threshold");
  sc_dot->add_flag("--dot-sources", dot.dot_sources, "Include sources for results");
  sc_dot->add_option("--names", dot.names_csv, "Comma-separated variable names");
  sc_dot->add_option("--out", dot.out, "Output path or -");

  ExperimentArgs exp;
  auto* sc_exp = app.add_subcommand("experiment", "Run a Monte-Carlo experiment");
  sc_exp->add_option("--kind", exp.kind, "satisfiability or recovery")->required();
  sc_exp->add_option("--setting", exp.setting, "equal, fewer, distinct or non-unique")->required();
  sc_exp->add_option("--grid", exp.grid, "Grid, e.g. p=5..10;r=0.8..2.6:0.2")->required();
  sc_exp->add_option("--mode", exp.mode, "oracle or ica (recovery)");
  sc_exp->add_option("--variant", exp.variant, "paper or full (satisfiability)");
  sc_exp->add_option("--trials", exp.trials, "Trials per grid point");
  sc_exp->add_option("--n", exp.n, "Samples per trial (ica)");
  sc_exp->add_option("--nboot", exp.n_boot, "Bootstrap replicates (ica)");
  sc_exp->add_option("--confidence", exp.confidence, "Bootstrap pruning confidence");
  sc_exp->add_option("--prune", exp.prune, "Edge pruning threshold");
  sc_exp->add_option("--eps", exp.eps, "Support threshold");
  sc_exp->add_option("--attempt-cap", exp.attempt_cap, "Model draws allowed per trial");
  sc_exp->add_option("--seed", exp.seed, "Master seed");
  sc_exp->add_option("--jobs", exp.jobs, "Worker threads");
  sc_exp->add_option("--out-prefix", exp.out_prefix, "Output file prefix");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    nlohmann::json err{{"error", e.what()}, {"kind", "usage"}};
    std::cerr << err.dump() << "\n";
    return 1;
  }

  try {
    if (sc_gen->parsed()) cmd_generate(gen);
    else if (sc_sim->parsed()) cmd_simulate(sim);
    else if (sc_sep->parsed()) cmd_separate(sep);
    else if (sc_chk->parsed()) cmd_check(chk);
    else if (sc_rec->parsed()) cmd_recover(rec);
    else if (sc_eva->parsed()) cmd_evaluate(eva);
    else if (sc_dot->parsed()) cmd_export_dot(dot);
    else if (sc_exp->parsed()) cmd_experiment(exp);
  } catch (const EdgeSupportViolation& e) {
    nlohmann::json err{{"error", e.what()},
                       {"kind", "model"},
                       {"child", e.child()},
                       {"parent", e.parent()},
                       {"partial", nlohmann::json::parse(condition_report_to_json_string(e.partial()))}};
    std::cerr << err.dump() << "\n";
    return 2;
  } catch (const Error& e) {
    nlohmann::json err{{"error", e.what()}, {"kind", kind_name(e.kind())}};
    std::cerr << err.dump() << "\n";
    return 2;
  } catch (const std::exception& e) {
    nlohmann::json err{{"error", e.what()}, {"kind", "internal"}};
    std::cerr << err.dump() << "\n";
    return 2;
  }
  return 0;
}
