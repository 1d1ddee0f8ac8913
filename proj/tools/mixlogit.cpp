// mixlogit: mixed logit estimation, transfer with early stopping, and the
// four-way transfer benchmark. See README.md for file formats.

#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "mixl/bench.hpp"
#include "mixl/design.hpp"
#include "mixl/errors.hpp"
#include "mixl/log.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void add_chain_options(CLI::App* cmd, mixl::GibbsConfig& config) {
  cmd->add_option("--seed", config.seed, "master seed");
  cmd->add_option("--epochs", config.max_epochs, "maximum Gibbs epochs");
  cmd->add_option("--thin", config.thin_interval, "epochs between retained draws");
  cmd->add_option("--draws", config.eval_draws, "simulation draws per CEL evaluation");
  cmd->add_option("--window", config.summary_window, "draws pooled into the summary");
  cmd->add_option("--prior-dof", config.prior_dof,
                  "covariance prior strength (0 = latent dimension)");
  cmd->add_option("--workers", config.workers, "worker threads (0 = all cores)");
}

json metrics_to_json(const mixl::MetricsPair& m) {
  json j;
  j["cel"] = m.cel;
  j["gmpca"] = m.gmpca;
  return j;
}

std::optional<mixl::DesignMatrix> load_design_opt(const std::string& path,
                                                  const mixl::UtilitySpec& spec) {
  if (path.empty()) return std::nullopt;
  return mixl::DesignMatrix::compile(mixl::load_dataset(path, spec));
}

void write_run_outputs(const std::string& out_dir, const mixl::PriorModel& model,
                       const mixl::PosteriorSummary& summary,
                       const mixl::ValidationTrace& trace) {
  fs::create_directories(out_dir);
  mixl::save_model(model, (fs::path(out_dir) / "model.json").string());
  mixl::write_text_file((fs::path(out_dir) / "summary.txt").string(),
                        mixl::format_summary(summary));
  mixl::write_text_file((fs::path(out_dir) / "trace.csv").string(),
                        mixl::trace_csv(trace));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mixlogit: hierarchical mixed logit estimation and model transfer"};
  app.require_subcommand(1);

  std::string spec_path, data_path, train_path, validation_path, test_path;
  std::string prior_path, out_path, plan_path, truth_path;
  mixl::GibbsConfig config;
  config.seed = 1;
  config.workers = 0;
  mixl::EarlyStopConfig stop;
  bool no_early_stop = false;
  int synth_individuals = 100;
  int synth_situations = 8;

  CLI::App* est = app.add_subcommand("estimate", "fit a model without a prior");
  est->add_option("--spec", spec_path, "utility spec json")->required();
  est->add_option("--data", data_path, "training data csv")->required();
  est->add_option("--validation", validation_path, "validation csv, tracked in the trace");
  est->add_option("--out", out_path, "output directory")->required();
  add_chain_options(est, config);

  CLI::App* tra = app.add_subcommand("transfer", "assimilate a prior model into new data");
  tra->add_option("--spec", spec_path, "utility spec json")->required();
  tra->add_option("--train", train_path, "training data csv")->required();
  tra->add_option("--validation", validation_path, "validation csv for early stopping");
  tra->add_option("--test", test_path, "optional held-out csv scored in stop.json");
  tra->add_option("--prior", prior_path, "prior model artifact")->required();
  tra->add_option("--out", out_path, "output directory")->required();
  tra->add_option("--patience", stop.patience, "epochs without improvement before stop");
  tra->add_option("--min-epochs", stop.min_epochs, "epochs before stopping may trigger");
  tra->add_flag("--no-early-stop", no_early_stop, "run to --epochs, plain assimilation");
  add_chain_options(tra, config);

  CLI::App* eva = app.add_subcommand("evaluate", "score a model on a dataset as-is");
  eva->add_option("--spec", spec_path, "utility spec json")->required();
  eva->add_option("--data", data_path, "data csv")->required();
  eva->add_option("--prior", prior_path, "model artifact to score")->required();
  eva->add_option("--out", out_path, "optional metrics json path");
  eva->add_option("--draws", config.eval_draws, "simulation draws");
  eva->add_option("--seed", config.seed, "evaluation seed");

  CLI::App* ben = app.add_subcommand("benchmark", "four-way transfer comparison");
  ben->add_option("--plan", plan_path, "benchmark plan json")->required();
  ben->add_option("--out", out_path, "report directory")->required();
  CLI::Option* ben_seed = ben->add_option("--seed", config.seed, "override the plan seed");
  ben->add_option("--epochs", config.max_epochs, "maximum Gibbs epochs");
  ben->add_option("--thin", config.thin_interval, "epochs between retained draws");
  ben->add_option("--draws", config.eval_draws, "simulation draws per CEL evaluation");
  ben->add_option("--window", config.summary_window, "draws pooled into the summary");
  ben->add_option("--prior-dof", config.prior_dof,
                  "covariance prior strength (0 = latent dimension)");
  ben->add_option("--workers", config.workers, "worker threads (0 = all cores)");
  ben->add_option("--patience", stop.patience, "early-stop patience for the ESBDA leg");
  ben->add_option("--min-epochs", stop.min_epochs, "epochs before stopping may trigger");

  CLI::App* syn = app.add_subcommand("synth", "draw a synthetic panel from a model");
  syn->add_option("--spec", spec_path, "utility spec json")->required();
  syn->add_option("--truth", truth_path, "model artifact to simulate from")->required();
  syn->add_option("--out", out_path, "output directory")->required();
  syn->add_option("--individuals", synth_individuals, "panel size");
  syn->add_option("--situations", synth_situations, "choice situations per individual");
  syn->add_option("--seed", config.seed, "generation seed");

  try {
    app.parse(argc, argv);

    if (*est) {
      const mixl::UtilitySpec spec = mixl::load_spec(spec_path);
      const mixl::DesignMatrix train =
          mixl::DesignMatrix::compile(mixl::load_dataset(data_path, spec));
      const auto validation = load_design_opt(validation_path, spec);
      mixl::EarlyStopConfig off;
      off.enabled = false;
      mixl::EsbdaResult r = mixl::run_esbda(train, validation ? &*validation : nullptr,
                                            std::nullopt, config, off);
      const mixl::PriorModel model =
          mixl::extract_prior(r.summary, spec, "estimate", config.seed);
      write_run_outputs(out_path, model, r.summary, r.trace);
    } else if (*tra) {
      const mixl::UtilitySpec spec = mixl::load_spec(spec_path);
      const mixl::PriorModel prior = mixl::load_model(prior_path, spec);
      const mixl::DesignMatrix train =
          mixl::DesignMatrix::compile(mixl::load_dataset(train_path, spec));
      const auto validation = load_design_opt(validation_path, spec);
      stop.enabled = !no_early_stop;
      if (stop.enabled && !validation) {
        throw mixl::SpecError("transfer needs --validation unless --no-early-stop");
      }
      mixl::EsbdaResult r = mixl::run_esbda(train, validation ? &*validation : nullptr,
                                            prior, config, stop);
      const mixl::PriorModel model =
          mixl::extract_prior(r.summary, spec, "transfer", config.seed);
      write_run_outputs(out_path, model, r.summary, r.trace);
      json stop_report;
      stop_report["stopped_early"] = r.stopped_early;
      stop_report["stop_epoch"] = r.stop_epoch;
      stop_report["output_epoch"] = r.output_epoch;
      stop_report["best_epoch"] = r.trace.best_epoch;
      stop_report["best_validation_cel"] =
          r.trace.best_epoch >= 0 ? json(r.trace.best_validation_cel) : json();
      if (!test_path.empty()) {
        const mixl::DesignMatrix test =
            mixl::DesignMatrix::compile(mixl::load_dataset(test_path, spec));
        stop_report["test"] = metrics_to_json(
            mixl::direct_application(model, test, config.eval_draws, config.seed));
      }
      mixl::write_text_file((fs::path(out_path) / "stop.json").string(),
                            stop_report.dump(2) + "\n");
    } else if (*eva) {
      const mixl::UtilitySpec spec = mixl::load_spec(spec_path);
      const mixl::PriorModel model = mixl::load_model(prior_path, spec);
      const mixl::DesignMatrix data =
          mixl::DesignMatrix::compile(mixl::load_dataset(data_path, spec));
      const mixl::MetricsPair m =
          mixl::direct_application(model, data, config.eval_draws, config.seed);
      std::printf("cel %s\ngmpca %s\n", mixl::format_double(m.cel).c_str(),
                  mixl::format_double(m.gmpca).c_str());
      if (!out_path.empty()) {
        mixl::write_text_file(out_path, metrics_to_json(m).dump(2) + "\n");
      }
    } else if (*ben) {
      mixl::BenchmarkPlan plan = mixl::load_plan(plan_path);
      if (ben_seed->count() > 0) plan.seed = config.seed;
      const mixl::BenchmarkReport report = mixl::run_benchmark(plan, config, stop);
      mixl::write_report(report, out_path);
    } else if (*syn) {
      const mixl::UtilitySpec spec = mixl::load_spec(spec_path);
      const mixl::PriorModel truth = mixl::load_model(truth_path, spec);
      mixl::RngStream rng(config.seed, 0);
      const mixl::Dataset dataset = mixl::generate_synthetic(
          spec, truth.params, synth_individuals, synth_situations, rng);
      fs::create_directories(out_path);
      mixl::save_dataset(dataset, (fs::path(out_path) / "data.csv").string());
      mixl::save_model(truth, (fs::path(out_path) / "truth.json").string());
    }
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  } catch (const mixl::SpecError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const mixl::DataError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const mixl::NumericalError& e) {
    std::fprintf(stderr, "numerical error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
