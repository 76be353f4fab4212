#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sagat/affordance.hpp"
#include "sagat/scenario.hpp"

namespace sagat {

struct ExperimentConfig {
  std::vector<std::string> objects;
  std::vector<Task> tasks;
  std::vector<std::uint64_t> seeds;
  PerceptionConfig perception;
  SimConfig sim;
  std::string output_dir = "out";

  void validate() const;  // throws ValidationError
  static ExperimentConfig defaults();
};

std::string config_to_json(const ExperimentConfig& config);
ExperimentConfig config_from_json(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);

// FNV-1a over the canonical JSON form; stamped into artifact headers.
std::uint64_t config_hash(const ExperimentConfig& config);

inline const std::string kTrialSchemaVersion = "sagat.trials/1";

struct TrialRecord {
  std::string object_id;
  Task task = Task::kPour;
  std::string strategy;  // "standalone" | "sagat"
  std::optional<int> selected_index;
  std::optional<double> confidence;
  bool success = false;
  int simulations = 0;  // forward simulations before selection
  std::optional<double> dh;
};

void write_trials_csv(const std::string& path, const std::vector<TrialRecord>& trials,
                      std::uint64_t hash);

// Demonstrations per task for the configured demo protocol (9 repetitions,
// 6 successful / 3 undesired), seeded from the first configured seed.
std::map<Task, std::vector<DemoBundle>> demo_suite(const ExperimentConfig& config);

// Fit policies, fill outcomes and ranked transforms, calibrate the per-task
// threshold. Logs one summary line per task.
Library build_library(const ExperimentConfig& config, std::ostream& log);

// Calibration support pairs for the threshold: the learnt policy is
// replicated from each demonstrated grasp candidate, scored against the
// stored outcomes and labeled by the physics oracle — the same channel the
// deployment loop thresholds.
std::vector<std::pair<double, DemoLabel>> calibration_pairs(
    const TaskRecord& record, const std::vector<DemoBundle>& bundles, const SimConfig& cfg);

struct SimilarityRow {
  std::string object_id;
  Task task = Task::kPour;
  std::optional<double> dh;
  double demo_mean = 0.0;
  double reference_mean = 0.0;
};

struct RejectionRow {
  std::string object_id;
  Task task = Task::kPour;
  int proposed = 0;
  int rejected = 0;
  int accepted = 0;
};

struct CompareCell {
  Task task = Task::kPour;
  std::string strategy;
  int trials = 0;
  int successes = 0;
  double rate() const { return trials == 0 ? 0.0 : static_cast<double>(successes) / trials; }
};

struct ExperimentArtifacts {
  std::vector<TrialRecord> trials;
  std::vector<SimilarityRow> similarity;
  std::vector<RejectionRow> rejection;
  std::map<Task, double> rejection_rate;  // per-task aggregate
  std::vector<CompareCell> compare;
};

ExperimentArtifacts run_similarity(const ExperimentConfig& config, const Library& library,
                                   std::ostream& log);
ExperimentArtifacts run_rejection(const ExperimentConfig& config, const Library& library,
                                  std::ostream& log);
ExperimentArtifacts run_compare(const ExperimentConfig& config, const Library& library,
                                std::ostream& log);

// Run one deployment trial pair on a scene (used by the compare experiment).
TrialRecord standalone_trial(const Scene& scene, Task task, const Library& library,
                             const PerceptionConfig& pcfg, const SimConfig& scfg);
TrialRecord sagat_trial(const Scene& scene, Task task, const Library& library,
                        const PerceptionConfig& pcfg, const SimConfig& scfg, bool exhaustive);

// CLI entry points; write artifacts under config.output_dir.
void cmd_gen_demos(const ExperimentConfig& config, Task task, int count, DemoMix mix,
                   std::ostream& log);
void cmd_build_library(const ExperimentConfig& config, const std::string& library_path,
                       std::ostream& log);
void cmd_deploy(const ExperimentConfig& config, const std::string& object_id, Task task,
                const Library& library, bool exhaustive, std::ostream& log);
void cmd_experiment(const ExperimentConfig& config, const std::string& which,
                    const Library& library, std::ostream& log);

}  // namespace sagat
