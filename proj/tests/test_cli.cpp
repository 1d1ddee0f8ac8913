#include <doctest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <string>

#include <json.hpp>

#include "mixl/design.hpp"
#include "mixl/errors.hpp"
#include "mixl/esbda.hpp"
#include "mixl/io.hpp"

using namespace mixl;
using nlohmann::json;

namespace {

std::string test_path(const std::string& name) {
  return std::string(MIXL_TEST_DIR) + "/" + name;
}

struct CliResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

CliResult run_cli(const std::string& args, const std::string& tag) {
  const std::string out = test_path("cli_" + tag + ".out");
  const std::string err = test_path("cli_" + tag + ".err");
  const std::string cmd =
      std::string("\"") + MIXL_CLI_PATH + "\" " + args + " >\"" + out + "\" 2>\"" + err + "\"";
  const int status = std::system(cmd.c_str());
  CliResult r;
  if (status != -1 && WIFEXITED(status)) r.exit_code = WEXITSTATUS(status);
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

// cel/gmpca lines printed by the evaluate subcommand
double stdout_metric(const std::string& out, const std::string& key) {
  const auto pos = out.find(key + " ");
  REQUIRE(pos != std::string::npos);
  return std::strtod(out.c_str() + pos + key.size() + 1, nullptr);
}

struct Fixtures {
  std::string spec;          // three modes, two attributes, two random + two fixed
  std::string truth;         // artifact with real signal, doubles as a prior
  std::string data;          // panel drawn from truth
  std::string uniform_spec;  // one normal coefficient only
  std::string zero_model;    // all-zero parameters under uniform_spec
  std::string uniform_data;  // panel drawn from the zero model
  UtilitySpec spec_obj;
  UtilitySpec uniform_obj;
};

const Fixtures& fixtures() {
  static const Fixtures f = [] {
    Fixtures out;
    UtilitySpec spec;
    spec.alternatives = {"car", "bus", "walk"};
    spec.attributes = {"cost", "time"};
    spec.coefficients = {
        {"b_cost", CoefficientKind::RandomLognormalNegative, "cost", {}},
        {"b_time", CoefficientKind::RandomNormal, "time", {}},
        {"c_bus", CoefficientKind::Fixed, kConstAttribute, {"bus"}},
        {"c_walk", CoefficientKind::Fixed, kConstAttribute, {"walk"}}};
    spec.validate();
    out.spec_obj = spec;
    out.spec = test_path("cli_spec.json");
    save_spec(spec, out.spec);

    PriorModel truth;
    truth.params.fixed_coefs = Eigen::VectorXd(2);
    truth.params.fixed_coefs << 0.3, -0.4;
    truth.params.latent_mean = Eigen::VectorXd(2);
    truth.params.latent_mean << -0.5, -0.4;
    truth.params.latent_cov = Eigen::MatrixXd(2, 2);
    truth.params.latent_cov << 0.2, 0.02, 0.02, 0.1;
    truth.spec_hash = spec_hash(spec);
    truth.provenance = "fixture";
    out.truth = test_path("cli_truth.json");
    save_model(truth, out.truth);

    RngStream rng(31, 0);
    const Dataset d = generate_synthetic(spec, truth.params, 15, 5, rng);
    out.data = test_path("cli_data.csv");
    save_dataset(d, out.data);

    UtilitySpec uniform;
    uniform.alternatives = {"a", "b", "c"};
    uniform.attributes = {"x"};
    uniform.coefficients = {{"b_x", CoefficientKind::RandomNormal, "x", {}}};
    uniform.validate();
    out.uniform_obj = uniform;
    out.uniform_spec = test_path("cli_uniform_spec.json");
    save_spec(uniform, out.uniform_spec);

    PriorModel zero;
    zero.params.fixed_coefs = Eigen::VectorXd(0);
    zero.params.latent_mean = Eigen::VectorXd::Zero(1);
    zero.params.latent_cov = Eigen::MatrixXd::Zero(1, 1);
    zero.spec_hash = spec_hash(uniform);
    out.zero_model = test_path("cli_zero_model.json");
    save_model(zero, out.zero_model);

    RngStream urng(32, 0);
    const Dataset ud = generate_synthetic(uniform, zero.params, 10, 3, urng);
    out.uniform_data = test_path("cli_uniform_data.csv");
    save_dataset(ud, out.uniform_data);
    return out;
  }();
  return f;
}

}  // namespace

TEST_CASE("argument errors exit with code 2") {
  CHECK(run_cli("", "noargs").exit_code == 2);
  CHECK(run_cli("estimate --spec nope.json", "misses").exit_code == 2);
  const CliResult help = run_cli("--help", "help");
  CHECK(help.exit_code == 0);
  CHECK(help.out.find("mixlogit") != std::string::npos);
}

TEST_CASE("a missing data file exits 2 and names the path") {
  const Fixtures& f = fixtures();
  const CliResult r = run_cli("estimate --spec " + f.spec +
                                  " --data /nonexistent/panel.csv --out " +
                                  test_path("cli_missing_out"),
                              "missing_data");
  CHECK(r.exit_code == 2);
  CHECK(r.err.find("/nonexistent/panel.csv") != std::string::npos);
}

TEST_CASE("estimate writes its artifacts and reruns byte-identically") {
  const Fixtures& f = fixtures();
  const std::string out1 = test_path("cli_est1");
  const std::string out2 = test_path("cli_est2");
  const std::string opts =
      " --epochs 60 --thin 10 --window 3 --seed 5 --workers 2 --draws 30";
  const CliResult r1 =
      run_cli("estimate --spec " + f.spec + " --data " + f.data + " --out " + out1 + opts,
              "est1");
  REQUIRE_MESSAGE(r1.exit_code == 0, r1.err);
  const CliResult r2 =
      run_cli("estimate --spec " + f.spec + " --data " + f.data + " --out " + out2 + opts,
              "est2");
  REQUIRE(r2.exit_code == 0);
  for (const char* name : {"model.json", "summary.txt", "trace.csv"}) {
    const std::string a = slurp(out1 + "/" + name);
    CHECK_FALSE(a.empty());
    CHECK(a == slurp(out2 + "/" + std::string(name)));
  }
  // the artifact loads back under the spec it was fit to
  CHECK_NOTHROW(load_model(out1 + "/model.json", f.spec_obj));
}

TEST_CASE("transfer without early stopping matches an in-process run byte for byte") {
  const Fixtures& f = fixtures();
  const std::string out_dir = test_path("cli_transfer");
  const CliResult r = run_cli(
      "transfer --spec " + f.spec + " --train " + f.data + " --prior " + f.truth +
          " --out " + out_dir + " --no-early-stop --epochs 50 --thin 10 --window 3" +
          " --seed 9 --workers 1 --test " + f.data,
      "transfer");
  REQUIRE_MESSAGE(r.exit_code == 0, r.err);

  GibbsConfig config;
  config.max_epochs = 50;
  config.thin_interval = 10;
  config.summary_window = 3;
  config.seed = 9;
  config.workers = 1;
  EarlyStopConfig off;
  off.enabled = false;
  const PriorModel prior = load_model(f.truth, f.spec_obj);
  const DesignMatrix train = DesignMatrix::compile(load_dataset(f.data, f.spec_obj));
  const EsbdaResult ref = run_esbda(train, nullptr, prior, config, off);
  const PriorModel ref_model = extract_prior(ref.summary, f.spec_obj, "transfer", 9);
  const std::string ref_path = test_path("cli_transfer_ref.json");
  save_model(ref_model, ref_path);

  CHECK(slurp(out_dir + "/model.json") == slurp(ref_path));
  CHECK(slurp(out_dir + "/summary.txt") == format_summary(ref.summary));
  CHECK(slurp(out_dir + "/trace.csv") == trace_csv(ref.trace));

  const json stop_report = json::parse(slurp(out_dir + "/stop.json"));
  CHECK(stop_report.at("stopped_early").get<bool>() == false);
  CHECK(stop_report.at("stop_epoch").get<int>() == 50);
  CHECK(stop_report.at("output_epoch").get<int>() == 50);
  CHECK(stop_report.at("best_epoch").get<int>() == -1);
  CHECK(stop_report.at("best_validation_cel").is_null());
  CHECK(stop_report.at("test").at("cel").get<double>() > 0.0);

  SUBCASE("early stopping demands a validation set") {
    const CliResult bad = run_cli("transfer --spec " + f.spec + " --train " + f.data +
                                      " --prior " + f.truth + " --out " +
                                      test_path("cli_transfer_bad"),
                                  "transfer_noval");
    CHECK(bad.exit_code == 2);
    CHECK(bad.err.find("--validation") != std::string::npos);
  }
}

TEST_CASE("evaluate scores a zero model at the uniform-choice entropy") {
  const Fixtures& f = fixtures();
  const std::string metrics_path = test_path("cli_eval_metrics.json");
  const CliResult r = run_cli("evaluate --spec " + f.uniform_spec + " --data " +
                                  f.uniform_data + " --prior " + f.zero_model +
                                  " --out " + metrics_path,
                              "eval_zero");
  REQUIRE_MESSAGE(r.exit_code == 0, r.err);
  const double cel_out = stdout_metric(r.out, "cel");
  const double gmpca_out = stdout_metric(r.out, "gmpca");
  CHECK(cel_out == doctest::Approx(std::log(3.0)).epsilon(1e-12));
  CHECK(gmpca_out == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  const json m = json::parse(slurp(metrics_path));
  CHECK(m.at("cel").get<double>() == doctest::Approx(cel_out).epsilon(1e-15));

  SUBCASE("a prior from another spec is refused") {
    const CliResult bad = run_cli("evaluate --spec " + f.uniform_spec + " --data " +
                                      f.uniform_data + " --prior " + f.truth,
                                  "eval_wrongspec");
    CHECK(bad.exit_code == 2);
    CHECK(bad.err.find("does not match") != std::string::npos);
  }
}

TEST_CASE("synth is deterministic in the seed") {
  const Fixtures& f = fixtures();
  const std::string s1 = test_path("cli_synth1");
  const std::string s2 = test_path("cli_synth2");
  const std::string s3 = test_path("cli_synth3");
  const std::string base = "synth --spec " + f.spec + " --truth " + f.truth +
                           " --individuals 7 --situations 3";
  REQUIRE(run_cli(base + " --seed 4 --out " + s1, "synth1").exit_code == 0);
  REQUIRE(run_cli(base + " --seed 4 --out " + s2, "synth2").exit_code == 0);
  REQUIRE(run_cli(base + " --seed 5 --out " + s3, "synth3").exit_code == 0);
  const std::string d1 = slurp(s1 + "/data.csv");
  CHECK_FALSE(d1.empty());
  CHECK(d1 == slurp(s2 + "/data.csv"));
  CHECK(d1 != slurp(s3 + "/data.csv"));
  CHECK(slurp(s1 + "/truth.json") == slurp(f.truth));

  SUBCASE("the generating model scores its own panel") {
    const CliResult r = run_cli(
        "evaluate --spec " + f.spec + " --data " + s1 + "/data.csv --prior " + f.truth,
        "eval_truth");
    REQUIRE_MESSAGE(r.exit_code == 0, r.err);
    const double cel_out = stdout_metric(r.out, "cel");
    const double gmpca_out = stdout_metric(r.out, "gmpca");
    CHECK(std::isfinite(cel_out));
    CHECK(cel_out > 0.0);
    CHECK(cel_out < std::log(3.0));  // better than uniform guessing
    CHECK(gmpca_out > 1.0 / 3.0);
    CHECK(gmpca_out < 1.0);
  }
}

TEST_CASE("benchmark runs a two-level plan end to end") {
  const Fixtures& f = fixtures();
  // second level: a smaller panel from a shifted truth
  const PriorModel truth = load_model(f.truth, f.spec_obj);
  PriorModel shifted = truth;
  shifted.params.latent_mean[1] += 0.4;
  RngStream rng(33, 0);
  const Dataset small = generate_synthetic(f.spec_obj, shifted.params, 12, 4, rng);
  const std::string small_path = test_path("cli_bench_small.csv");
  save_dataset(small, small_path);

  json plan;
  plan["spec"] = f.spec;
  plan["seed"] = 21;
  plan["cost_coefficient"] = "b_cost";
  plan["levels"] = json::array();
  plan["levels"].push_back({{"name", "base"},
                            {"data", f.data},
                            {"validation_groups", 3},
                            {"test_groups", 3}});
  plan["levels"].push_back({{"name", "target"},
                            {"data", small_path},
                            {"train_groups", 5},
                            {"validation_groups", 3},
                            {"test_groups", 4}});
  const std::string plan_path = test_path("cli_bench_plan.json");
  write_text_file(plan_path, plan.dump(2) + "\n");

  const std::string out_dir = test_path("cli_bench_out");
  const CliResult r = run_cli("benchmark --plan " + plan_path + " --out " + out_dir +
                                  " --epochs 80 --thin 10 --window 3 --patience 30" +
                                  " --draws 30 --workers 1",
                              "bench");
  REQUIRE_MESSAGE(r.exit_code == 0, r.err);

  const json report = json::parse(slurp(out_dir + "/report.json"));
  REQUIRE(report.at("levels").size() == 2);
  CHECK(report.at("levels").at(0).at("approaches").size() == 1);
  CHECK(report.at("levels").at(1).at("approaches").size() == 4);
  CHECK_FALSE(slurp(out_dir + "/tables.txt").empty());
  CHECK_FALSE(slurp(out_dir + "/traces/target_esbda.csv").empty());
  CHECK_FALSE(slurp(out_dir + "/models/target_esbda.json").empty());
  CHECK_FALSE(slurp(out_dir + "/models/target_direct_application.json").empty());

  SUBCASE("a malformed plan exits 2") {
    const std::string bad_plan = test_path("cli_bench_bad_plan.json");
    write_text_file(bad_plan, "{\"seed\": 1}\n");
    const CliResult bad =
        run_cli("benchmark --plan " + bad_plan + " --out " + test_path("cli_bench_bad"),
                "bench_bad");
    CHECK(bad.exit_code == 2);
  }
}
