#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mixl/esbda.hpp"
#include "mixl/gibbs.hpp"
#include "mixl/io.hpp"
#include "mixl/metrics.hpp"

namespace mixl {

// One benchmark level: a dataset and how to split it. Level 0 is the source
// context (train only); later levels transfer the level above.
struct BenchmarkLevel {
  std::string name;
  std::string data_path;
  int train_groups = -1;  // -1 = all remaining groups
  int validation_groups = 0;
  int test_groups = 0;
};

struct BenchmarkPlan {
  std::string spec_path;
  std::uint64_t seed = 0;
  std::string cost_coefficient;  // optional, enables consistency checks
  std::vector<BenchmarkLevel> levels;
};

BenchmarkPlan load_plan(const std::string& path);

enum class Approach { DirectApplication = 0, Nonconjugate = 1, Bda = 2, Esbda = 3 };
const char* approach_name(Approach a);

struct ApproachResult {
  Approach approach = Approach::Nonconjugate;
  std::optional<PosteriorSummary> summary;  // absent for direct application
  PriorModel model;                          // evaluated parameters
  MetricsPair validation;
  MetricsPair test;
  bool stopped_early = false;
  int stop_epoch = 0;
  int output_epoch = 0;
  ValidationTrace trace;
  std::optional<ConsistencyReport> consistency;
};

struct LevelResult {
  std::string name;
  int train_individuals = 0;
  int validation_individuals = 0;
  int test_individuals = 0;
  std::vector<ApproachResult> approaches;
  PriorModel chosen_prior;  // fed to the level below
};

struct BenchmarkReport {
  UtilitySpec spec;
  std::uint64_t seed = 0;
  std::vector<LevelResult> levels;
};

// Level 0: estimate without prior, keep the summary as the first prior.
// Levels 1..L: run direct application, estimation without prior, assimilation
// without early stopping, and assimilation with early stopping, against the
// prior chosen one level up (the early-stopped result). Chain seeds derive
// from the master seed per (level, approach family), with the two
// assimilation variants sharing a seed so their chains pair.
BenchmarkReport run_benchmark(const BenchmarkPlan& plan, const GibbsConfig& base_config,
                              const EarlyStopConfig& stop);

// Serialize the report: report.json, tables.txt, per-run traces and model
// artifacts under out_dir. Content is a pure function of the report (no
// timestamps), so reruns are byte-identical.
void write_report(const BenchmarkReport& report, const std::string& out_dir);

}  // namespace mixl
