#define DOCTEST_CONFIG_IMPLEMENT
#include <doctest.h>
#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "helpers.hpp"
#include "pscm/io.hpp"
#include "pscm/recovery.hpp"
#include "pscm/separation.hpp"

using namespace pscm;
using namespace pscm::testing;

namespace {

std::string g_cli;
std::string g_tmp;

struct CliResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const std::string& path) {
  try {
    return read_text_file(path);
  } catch (const Error&) {
    return "";
  }
}

CliResult run_cli(const std::string& args) {
  static int counter = 0;
  std::string out_path = g_tmp + "/stdout." + std::to_string(counter);
  std::string err_path = g_tmp + "/stderr." + std::to_string(counter);
  ++counter;
  std::string cmd = "'" + g_cli + "' " + args + " >'" + out_path + "' 2>'" + err_path + "'";
  int status = std::system(cmd.c_str());
  CliResult result;
  if (status != -1 && WIFEXITED(status)) result.exit_code = WEXITSTATUS(status);
  result.out = slurp(out_path);
  result.err = slurp(err_path);
  return result;
}

std::string tmp_path(const std::string& name) { return g_tmp + "/" + name; }

}  // namespace

TEST_CASE("help exits cleanly and lists the subcommands") {
  CliResult r = run_cli("--help");
  CHECK(r.exit_code == 0);
  for (const char* sub : {"generate", "simulate", "separate", "check", "recover", "evaluate"})
    CHECK(r.out.find(sub) != std::string::npos);
}

TEST_CASE("generate, check, recover and evaluate compose into an exact pipeline") {
  std::string model_path = tmp_path("pipeline_model.json");
  bool found = false;
  for (int seed = 1; seed <= 200 && !found; ++seed) {
    CliResult gen = run_cli("generate --p 5 --seed " + std::to_string(seed) + " --out '" +
                            model_path + "'");
    REQUIRE(gen.exit_code == 0);
    CliResult chk = run_cli("check --model '" + model_path + "'");
    REQUIRE(chk.exit_code == 0);
    found = nlohmann::json::parse(chk.out)["overall"].get<bool>();
  }
  REQUIRE(found);

  std::string rec_path = tmp_path("pipeline_result.json");
  CliResult rec = run_cli("recover --mode oracle --model '" + model_path + "' --seed 7 --out '" +
                          rec_path + "'");
  REQUIRE(rec.exit_code == 0);

  CliResult eva = run_cli("evaluate --model '" + model_path + "' --result '" + rec_path + "'");
  REQUIRE(eva.exit_code == 0);
  nlohmann::json metrics = nlohmann::json::parse(eva.out);
  CHECK(metrics["shd"] == 0.0);
  CHECK(metrics["precision"] == 1.0);
  CHECK(metrics["recall"] == 1.0);
  CHECK(metrics["b_match_frobenius"].get<double>() < 1e-8);

  CliResult csv = run_cli("evaluate --model '" + model_path + "' --result '" + rec_path +
                          "' --csv");
  REQUIRE(csv.exit_code == 0);
  CHECK(csv.out.find("nan") == std::string::npos);
}

TEST_CASE("check reports failed conditions without failing the process") {
  std::string model_path = tmp_path("violating_model.json");
  write_text_file(model_path, model_to_json_string(unique_violation_model()));
  CliResult r = run_cli("check --model '" + model_path + "'");
  REQUIRE(r.exit_code == 0);
  nlohmann::json report = nlohmann::json::parse(r.out);
  CHECK(report["overall"] == false);
  bool saw = false;
  for (const auto& row : report["per_variable"])
    if (row["k"] == 2) {
      saw = true;
      CHECK(row["unique_ok"] == false);
      CHECK(row["witness_source"] == 1);
      CHECK(row["witness_variable"] == 0);
    }
  CHECK(saw);
  CHECK(report["assumptions"]["overall"] == true);
  CHECK(report["distinct_source"].is_null());  // x1 owns no private source
}

TEST_CASE("recover writes the frozen stock structure and a dot graph") {
  std::string mixing_path = tmp_path("stock.csv");
  write_matrix_csv_file(mixing_path, stock_index_mixing());
  std::string rec_path = tmp_path("stock_result.json");
  std::string dot_path = tmp_path("stock.dot");
  CliResult r = run_cli("recover --mixing '" + mixing_path + "' --out '" + rec_path +
                        "' --dot '" + dot_path + "' --names DJI,N225,N100,HSI,SSEC");
  REQUIRE(r.exit_code == 0);

  nlohmann::json result = nlohmann::json::parse(read_text_file(rec_path));
  int edges = 0;
  for (const auto& row : result["A_pruned"])
    for (const auto& v : row)
      if (v.get<double>() != 0.0) ++edges;
  CHECK(edges == 7);

  std::string dot = read_text_file(dot_path);
  int arrows = 0;
  for (std::size_t pos = dot.find(" -> "); pos != std::string::npos;
       pos = dot.find(" -> ", pos + 1))
    ++arrows;
  CHECK(arrows == 7);
  CHECK(dot.find("HSI") != std::string::npos);
  CHECK(dot.find("style=dashed") == std::string::npos);  // sources are off by default

  RecoveryResult direct = recover({stock_index_mixing(), 1e-9});
  Matrix cli_a = matrix_from_json(result["A_hat"], "A_hat");
  CHECK((cli_a - direct.A_hat).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("export-dot draws observed circles, source squares and dashed links") {
  std::string model_path = tmp_path("figure_model.json");
  write_text_file(model_path, model_to_json_string(deterministic_child_model()));
  CliResult r = run_cli("export-dot --model '" + model_path + "'");
  REQUIRE(r.exit_code == 0);
  auto count = [&](const std::string& needle) {
    int n = 0;
    for (std::size_t pos = r.out.find(needle); pos != std::string::npos;
         pos = r.out.find(needle, pos + 1))
      ++n;
    return n;
  };
  CHECK(count("shape=circle") == 3);
  CHECK(count("shape=square") == 3);
  CHECK(count("style=dashed") == 4);
  CHECK(count(" -> ") == 6);  // four dashed source links plus two solid causal edges
}

TEST_CASE("usage errors exit with code one and a machine-readable message") {
  CliResult r = run_cli("recover --bogus-flag");
  CHECK(r.exit_code == 1);
  nlohmann::json err = nlohmann::json::parse(r.err);
  CHECK(err["kind"] == "usage");
  CHECK(err.contains("error"));

  CliResult none = run_cli("");
  CHECK(none.exit_code == 1);
}

TEST_CASE("runtime failures exit with code two and name the error kind") {
  CliResult missing = run_cli("check --model '" + tmp_path("does_not_exist.json") + "'");
  CHECK(missing.exit_code == 2);
  nlohmann::json err = nlohmann::json::parse(missing.err);
  CHECK(err["kind"] == "data");

  Matrix A(2, 2);
  A.setZero();
  A(1, 0) = 0.5;
  Matrix B = make_matrix({{1.0, 1.0}, {1.0, 1.0}});
  std::string flat_path = tmp_path("flat_supports.json");
  write_text_file(flat_path, model_to_json_string(make_model(A, B)));
  CliResult violation = run_cli("check --model '" + flat_path + "'");
  CHECK(violation.exit_code == 2);
  nlohmann::json verr = nlohmann::json::parse(violation.err);
  CHECK(verr["kind"] == "model");
  CHECK(verr["child"] == 1);
  CHECK(verr["parent"] == 0);
  CHECK(verr["partial"]["per_variable"].size() == 1);
}

TEST_CASE("repeated runs are byte identical") {
  std::string args = "generate --p 6 --seed 9 --out -";
  CliResult first = run_cli(args);
  CliResult second = run_cli(args);
  REQUIRE(first.exit_code == 0);
  CHECK(first.out == second.out);

  std::string model_path = tmp_path("determinism_model.json");
  write_text_file(model_path, first.out);
  std::string rec_args = "recover --mode oracle --model '" + model_path + "' --seed 3 --out -";
  CliResult rec_first = run_cli(rec_args);
  CliResult rec_second = run_cli(rec_args);
  REQUIRE(rec_first.exit_code == 0);
  CHECK(rec_first.out == rec_second.out);

  std::string sim_args = "simulate --model '" + model_path + "' --n 5 --seed 2 --out -";
  CliResult sim_first = run_cli(sim_args);
  CliResult sim_second = run_cli(sim_args);
  REQUIRE(sim_first.exit_code == 0);
  CHECK(sim_first.out == sim_second.out);
  Matrix X = read_matrix_csv_file([&] {
    std::string path = tmp_path("simulated.csv");
    write_text_file(path, sim_first.out);
    return path;
  }());
  CHECK(X.rows() == 6);
  CHECK(X.cols() == 5);
}

TEST_CASE("oracle separation through the cli matches the library") {
  std::string model_path = tmp_path("oracle_model.json");
  CliResult gen = run_cli("generate --p 4 --seed 21 --out '" + model_path + "'");
  REQUIRE(gen.exit_code == 0);
  CliResult sep = run_cli("separate --mode oracle --model '" + model_path + "' --seed 5 --out -");
  REQUIRE(sep.exit_code == 0);

  std::string mixing_path = tmp_path("oracle_mixing.csv");
  write_text_file(mixing_path, sep.out);
  Matrix via_cli = read_matrix_csv_file(mixing_path);
  Pscm model = read_model_file(model_path);
  Matrix direct = oracle_mixing(model, 5).W;
  CHECK((via_cli - direct).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("bootstrap separation writes a sidecar describing the pruning") {
  std::string model_path = tmp_path("boot_model.json");
  REQUIRE(run_cli("generate --p 3 --seed 33 --out '" + model_path + "'").exit_code == 0);
  std::string data_path = tmp_path("boot_data.csv");
  REQUIRE(run_cli("simulate --model '" + model_path + "' --n 400 --seed 34 --out '" + data_path +
                  "'").exit_code == 0);

  std::string mixing_path = tmp_path("boot_mixing.csv");
  CliResult sep = run_cli("separate --mode ica --method bootstrap --data '" + data_path +
                          "' --nboot 6 --seed 35 --out '" + mixing_path + "'");
  REQUIRE(sep.exit_code == 0);
  nlohmann::json sidecar = nlohmann::json::parse(read_text_file(mixing_path + ".json"));
  CHECK(sidecar["n_boot"] == 6);
  CHECK(sidecar["replicates_used"].get<int>() >= 3);
  CHECK(sidecar["kept_mask"].size() == 3);

  std::string custom = tmp_path("custom_sidecar.json");
  CliResult sep2 = run_cli("separate --mode ica --method bootstrap --data '" + data_path +
                           "' --nboot 6 --seed 35 --out '" + mixing_path + "' --sidecar '" +
                           custom + "'");
  REQUIRE(sep2.exit_code == 0);
  CHECK(nlohmann::json::parse(read_text_file(custom))["n_boot"] == 6);
}

TEST_CASE("evaluate without any exogenous truth reports nan for the mixture score") {
  Matrix A_true(2, 2), A_hat(2, 2);
  A_true.setZero();
  A_hat.setZero();
  A_true(1, 0) = 0.8;
  std::string a_true = tmp_path("a_true.csv");
  std::string a_hat = tmp_path("a_hat.csv");
  write_matrix_csv_file(a_true, A_true);
  write_matrix_csv_file(a_hat, A_hat);
  CliResult r = run_cli("evaluate --a-true '" + a_true + "' --a-hat '" + a_hat + "' --csv");
  REQUIRE(r.exit_code == 0);
  CHECK(r.out.find("nan") != std::string::npos);
}

TEST_CASE("a small experiment writes trials and aggregates files") {
  std::string prefix = tmp_path("mini_exp");
  CliResult r = run_cli("experiment --kind satisfiability --setting distinct --grid 'p=5;r=1' "
                        "--trials 3 --seed 5 --out-prefix '" + prefix + "'");
  REQUIRE(r.exit_code == 0);

  std::string csv = read_text_file(prefix + "_trials.csv");
  REQUIRE(!csv.empty());
  REQUIRE(csv.back() == '\n');
  int lines = 0;
  for (char c : csv)
    if (c == '\n') ++lines;
  CHECK(lines == 4);  // header plus one line per trial

  nlohmann::json aggs = nlohmann::json::parse(read_text_file(prefix + "_aggregates.json"));
  REQUIRE(aggs.is_array());
  CHECK(aggs[0]["mean_attempts"] == 1.0);
  CHECK(aggs[0]["trials"] == 3);
}

int cli_test_main(int argc, char** argv) {
  doctest::Context ctx;
  std::vector<char*> forwarded;
  for (int i = 0; i < argc; ++i) {
    std::string arg = argv[i];
    if (arg.rfind("--cli=", 0) == 0)
      g_cli = arg.substr(6);
    else
      forwarded.push_back(argv[i]);
  }
  if (g_cli.empty()) {
    std::fprintf(stderr, "usage: pscm_cli_tests --cli=<path-to-pscm-binary> [doctest args]\n");
    return 64;
  }
  char tmpl[] = "/tmp/pscm_cli_XXXXXX";
  char* dir = mkdtemp(tmpl);
  if (!dir) {
    std::perror("mkdtemp");
    return 65;
  }
  g_tmp = dir;
  ctx.applyCommandLine(static_cast<int>(forwarded.size()), forwarded.data());
  int rc = ctx.run();
  if (std::system(("rm -rf '" + g_tmp + "'").c_str()) != 0)
    std::fprintf(stderr, "warning: could not remove %s\n", g_tmp.c_str());
  return rc;
}

int main(int argc, char** argv) { return cli_test_main(argc, argv); }
