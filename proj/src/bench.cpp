#include "mixl/bench.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>

#include <json.hpp>

#include "mixl/errors.hpp"
#include "mixl/log.hpp"

namespace mixl {

using nlohmann::json;

namespace {

// Seed roles mixed into the master seed. The two assimilation runs share a
// chain seed so the early-stopped chain is a prefix of the full one.
constexpr std::uint64_t kSeedSplit = 200;
constexpr std::uint64_t kSeedEval = 100;
constexpr std::uint64_t kSeedNonconjugate = 1;
constexpr std::uint64_t kSeedAssimilation = 2;

std::string fmt4(double v) {
  if (std::isnan(v)) return "-";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

}  // namespace

const char* approach_name(Approach a) {
  switch (a) {
    case Approach::DirectApplication: return "direct_application";
    case Approach::Nonconjugate: return "nonconjugate";
    case Approach::Bda: return "bda";
    case Approach::Esbda: return "esbda";
  }
  return "unknown";
}

BenchmarkPlan load_plan(const std::string& path) {
  json j;
  try {
    j = json::parse(read_text_file(path));
  } catch (const json::exception& e) {
    throw DataError(std::string("benchmark plan is not valid json: ") + e.what());
  }
  BenchmarkPlan plan;
  try {
    plan.spec_path = j.at("spec").get<std::string>();
    plan.seed = j.value("seed", std::uint64_t{0});
    plan.cost_coefficient = j.value("cost_coefficient", std::string());
    for (const auto& jl : j.at("levels")) {
      BenchmarkLevel level;
      level.name = jl.at("name").get<std::string>();
      level.data_path = jl.at("data").get<std::string>();
      level.train_groups = jl.value("train_groups", -1);
      level.validation_groups = jl.value("validation_groups", 0);
      level.test_groups = jl.value("test_groups", 0);
      plan.levels.push_back(std::move(level));
    }
  } catch (const json::exception& e) {
    throw DataError(std::string("benchmark plan is missing fields: ") + e.what());
  }
  if (plan.levels.empty()) throw SpecError("benchmark plan has no levels");

  // Paths are relative to the plan file.
  const std::filesystem::path base = std::filesystem::path(path).parent_path();
  auto rebase = [&](std::string& p) {
    if (!p.empty() && !std::filesystem::path(p).is_absolute()) {
      p = (base / p).string();
    }
  };
  rebase(plan.spec_path);
  for (auto& level : plan.levels) rebase(level.data_path);
  return plan;
}

BenchmarkReport run_benchmark(const BenchmarkPlan& plan, const GibbsConfig& base_config,
                              const EarlyStopConfig& stop) {
  BenchmarkReport report;
  report.spec = load_spec(plan.spec_path);
  report.seed = plan.seed;

  PriorModel prior;            // chosen model from the level above
  PosteriorSummary prior_summary;  // its summary, for consistency checks
  bool have_prior = false;

  for (std::size_t li = 0; li < plan.levels.size(); ++li) {
    const BenchmarkLevel& level = plan.levels[li];
    log_info("benchmark level " + level.name);
    const Dataset full = load_dataset(level.data_path, report.spec);
    const auto folds = grouped_split(full, level.train_groups, level.validation_groups,
                                     level.test_groups, derive_seed(plan.seed, li, kSeedSplit));
    if (folds[0].individuals.empty()) {
      throw SpecError("level " + level.name + " has an empty training fold");
    }
    const DesignMatrix train = DesignMatrix::compile(folds[0]);
    std::optional<DesignMatrix> validation;
    if (!folds[1].individuals.empty()) validation = DesignMatrix::compile(folds[1]);
    std::optional<DesignMatrix> test;
    if (!folds[2].individuals.empty()) test = DesignMatrix::compile(folds[2]);

    LevelResult lr;
    lr.name = level.name;
    lr.train_individuals = train.num_individuals();
    lr.validation_individuals = validation ? validation->num_individuals() : 0;
    lr.test_individuals = test ? test->num_individuals() : 0;

    const std::uint64_t eval_seed = derive_seed(plan.seed, li, kSeedEval);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    auto evaluate_model = [&](const PriorModel& model, ApproachResult& out) {
      out.validation = validation
                           ? direct_application(model, *validation, base_config.eval_draws,
                                                eval_seed)
                           : MetricsPair{nan, nan};
      out.test = test ? direct_application(model, *test, base_config.eval_draws, eval_seed)
                      : MetricsPair{nan, nan};
    };
    auto run_approach = [&](Approach a) {
      ApproachResult out;
      out.approach = a;
      GibbsConfig config = base_config;
      EarlyStopConfig stop_config = stop;
      const char* tag = approach_name(a);
      std::optional<PriorModel> chain_prior;
      if (a == Approach::Nonconjugate) {
        config.seed = derive_seed(plan.seed, li, kSeedNonconjugate);
        stop_config.enabled = false;
      } else {
        config.seed = derive_seed(plan.seed, li, kSeedAssimilation);
        stop_config.enabled = a == Approach::Esbda;
        chain_prior = prior;
      }
      const DesignMatrix* vptr = validation ? &*validation : nullptr;
      EsbdaResult r = run_esbda(train, vptr, chain_prior, config, stop_config);
      out.summary = std::move(r.summary);
      out.trace = std::move(r.trace);
      out.stopped_early = r.stopped_early;
      out.stop_epoch = r.stop_epoch;
      out.output_epoch = r.output_epoch;
      out.model = extract_prior(*out.summary, report.spec,
                                level.name + " " + tag, config.seed);
      evaluate_model(out.model, out);
      if (have_prior && !plan.cost_coefficient.empty()) {
        out.consistency =
            behavioral_consistency(*out.summary, prior_summary, plan.cost_coefficient);
      }
      return out;
    };

    if (li == 0) {
      ApproachResult base = run_approach(Approach::Nonconjugate);
      prior = base.model;
      prior_summary = *base.summary;
      have_prior = true;
      lr.chosen_prior = prior;
      lr.approaches.push_back(std::move(base));
    } else {
      ApproachResult direct;
      direct.approach = Approach::DirectApplication;
      direct.model = prior;
      direct.model.provenance = level.name + " direct_application";
      evaluate_model(direct.model, direct);
      lr.approaches.push_back(std::move(direct));

      lr.approaches.push_back(run_approach(Approach::Nonconjugate));
      lr.approaches.push_back(run_approach(Approach::Bda));
      ApproachResult esbda = run_approach(Approach::Esbda);
      prior = esbda.model;
      prior_summary = *esbda.summary;
      lr.chosen_prior = prior;
      lr.approaches.push_back(std::move(esbda));
    }
    report.levels.push_back(std::move(lr));
  }
  return report;
}

namespace {

json metrics_json(const MetricsPair& m) {
  if (std::isnan(m.cel)) return nullptr;
  json j;
  j["cel"] = m.cel;
  j["gmpca"] = m.gmpca;
  return j;
}

json stats_json(const std::vector<CoefStat>& stats) {
  json arr = json::array();
  for (const auto& st : stats) {
    json j;
    j["name"] = st.name;
    j["mean"] = st.mean;
    j["sd"] = st.sd;
    j["stars"] = stars_text(significance_stars(st.mean, st.sd));
    arr.push_back(j);
  }
  return arr;
}

json model_json(const PriorModel& model) {
  json j;
  j["alpha"] = std::vector<double>(
      model.params.fixed_coefs.data(),
      model.params.fixed_coefs.data() + model.params.fixed_coefs.size());
  j["zeta"] = std::vector<double>(
      model.params.latent_mean.data(),
      model.params.latent_mean.data() + model.params.latent_mean.size());
  json omega = json::array();
  for (Eigen::Index i = 0; i < model.params.latent_cov.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index k = 0; k < model.params.latent_cov.cols(); ++k) {
      row.push_back(model.params.latent_cov(i, k));
    }
    omega.push_back(row);
  }
  j["omega"] = omega;
  j["provenance"] = model.provenance;
  return j;
}

void append_estimates_table(std::string& out, const PosteriorSummary& summary,
                            const std::optional<ConsistencyReport>& consistency) {
  auto flags_for = [&](const std::string& name, bool simulated_or_fixed) -> std::string {
    if (!consistency || !simulated_or_fixed) return "";
    for (const auto& row : consistency->rows) {
      if (row.name != name) continue;
      std::string f = consistency_text(row.flag);
      if (row.sign_error) f += f.empty() ? "sign" : " sign";
      return f;
    }
    return "";
  };
  char line[160];
  auto emit = [&](const char* prefix, const CoefStat& st, bool flagged) {
    const Stars stars = significance_stars(st.mean, st.sd);
    std::snprintf(line, sizeof(line), "  %-28s %12s %12s  %-3s %s\n",
                  (std::string(prefix) + st.name).c_str(), fmt4(st.mean).c_str(),
                  fmt4(st.sd).c_str(), stars_text(stars),
                  flags_for(st.name, flagged).c_str());
    out += line;
  };
  std::snprintf(line, sizeof(line), "  %-28s %12s %12s  %-3s %s\n", "coefficient", "mean",
                "sd", "sig", "flags");
  out += line;
  for (const auto& st : summary.latent_mean_stats) emit("mean:", st, false);
  for (const auto& st : summary.latent_sd_stats) emit("spread:", st, false);
  for (const auto& st : summary.simulated_stats) emit("sim:", st, true);
  for (const auto& st : summary.fixed_stats) emit("fixed:", st, true);
}

}  // namespace

void write_report(const BenchmarkReport& report, const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(fs::path(out_dir) / "traces");
  fs::create_directories(fs::path(out_dir) / "models");

  json j;
  j["seed"] = report.seed;
  j["spec_hash"] = spec_hash_hex(report.spec);
  json levels = json::array();

  std::string tables;
  for (const auto& lr : report.levels) {
    json jl;
    jl["name"] = lr.name;
    jl["train_individuals"] = lr.train_individuals;
    jl["validation_individuals"] = lr.validation_individuals;
    jl["test_individuals"] = lr.test_individuals;
    json approaches = json::array();

    tables += "=== " + lr.name + " (train " + std::to_string(lr.train_individuals) +
              ", validation " + std::to_string(lr.validation_individuals) + ", test " +
              std::to_string(lr.test_individuals) + " individuals) ===\n\n";
    char line[160];
    std::snprintf(line, sizeof(line), "%-22s %14s %8s %14s %8s %7s %7s\n", "approach",
                  "validation CEL", "GMPCA", "test CEL", "GMPCA", "stop", "output");
    tables += line;

    for (const auto& ar : lr.approaches) {
      json ja;
      ja["approach"] = approach_name(ar.approach);
      ja["validation"] = metrics_json(ar.validation);
      ja["test"] = metrics_json(ar.test);
      ja["stopped_early"] = ar.stopped_early;
      ja["stop_epoch"] = ar.stop_epoch;
      ja["output_epoch"] = ar.output_epoch;
      ja["model"] = model_json(ar.model);
      if (ar.summary) {
        json js;
        js["draw_count"] = ar.summary->draw_count;
        js["epoch"] = ar.summary->epoch;
        js["latent_mean"] = stats_json(ar.summary->latent_mean_stats);
        js["latent_sd"] = stats_json(ar.summary->latent_sd_stats);
        js["simulated"] = stats_json(ar.summary->simulated_stats);
        js["fixed"] = stats_json(ar.summary->fixed_stats);
        ja["estimates"] = js;
      } else {
        ja["estimates"] = nullptr;
      }
      if (ar.consistency) {
        json jc;
        jc["degenerate"] = ar.consistency->degenerate;
        json rows = json::array();
        for (const auto& row : ar.consistency->rows) {
          json jr;
          jr["name"] = row.name;
          jr["value"] = row.value;
          jr["ratio"] = row.ratio;
          jr["reference_ratio"] = row.reference_ratio;
          jr["deviation"] = std::isfinite(row.deviation) ? json(row.deviation) : json("inf");
          jr["sign_error"] = row.sign_error;
          jr["flag"] = consistency_text(row.flag);
          rows.push_back(jr);
        }
        jc["rows"] = rows;
        ja["consistency"] = jc;
      } else {
        ja["consistency"] = nullptr;
      }
      approaches.push_back(ja);

      const bool is_chain = ar.approach != Approach::DirectApplication;
      std::string stop_text = is_chain ? std::to_string(ar.stop_epoch) : "-";
      if (ar.stopped_early) stop_text += "*";
      std::snprintf(line, sizeof(line), "%-22s %14s %8s %14s %8s %7s %7s\n",
                    approach_name(ar.approach), fmt4(ar.validation.cel).c_str(),
                    fmt4(ar.validation.gmpca).c_str(), fmt4(ar.test.cel).c_str(),
                    fmt4(ar.test.gmpca).c_str(), stop_text.c_str(),
                    is_chain ? std::to_string(ar.output_epoch).c_str() : "-");
      tables += line;
    }
    tables += "\n";
    for (const auto& ar : lr.approaches) {
      if (!ar.summary) continue;
      tables += "--- " + lr.name + " " + approach_name(ar.approach) + " estimates (" +
                std::to_string(ar.summary->draw_count) + " draws, epoch " +
                std::to_string(ar.summary->epoch) + ") ---\n";
      append_estimates_table(tables, *ar.summary, ar.consistency);
      tables += "\n";
    }

    jl["approaches"] = approaches;
    levels.push_back(jl);

    for (const auto& ar : lr.approaches) {
      const std::string base = lr.name + "_" + approach_name(ar.approach);
      if (ar.approach != Approach::DirectApplication) {
        write_text_file((fs::path(out_dir) / "traces" / (base + ".csv")).string(),
                        trace_csv(ar.trace));
      }
      save_model(ar.model, (fs::path(out_dir) / "models" / (base + ".json")).string());
    }
  }
  j["levels"] = levels;
  write_text_file((fs::path(out_dir) / "report.json").string(), j.dump(2) + "\n");
  write_text_file((fs::path(out_dir) / "tables.txt").string(), tables);
}

}  // namespace mixl
