#include "sagat/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "sagat/errors.hpp"
#include "sagat/random.hpp"

namespace sagat {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

void ExperimentConfig::validate() const {
  if (objects.empty()) throw ValidationError("config needs at least one object");
  if (tasks.empty()) throw ValidationError("config needs at least one task");
  if (seeds.empty()) throw ValidationError("config needs at least one seed");
  for (const std::string& id : objects) builtin_object(id);
  perception.validate();
  sim.validate();
  if (output_dir.empty()) throw ValidationError("config output_dir must be non-empty");
}

ExperimentConfig ExperimentConfig::defaults() {
  ExperimentConfig config;
  for (const ObjectModel& o : builtin_objects()) config.objects.push_back(o.id);
  config.tasks = all_tasks();
  for (std::uint64_t s = 1; s <= 10; ++s) config.seeds.push_back(s);
  config.perception.noise_sigma_pos = 0.004;
  config.perception.noise_sigma_theta = 0.02;
  config.perception.proposals_per_object = 8;
  config.perception.rng_seed = 7;
  config.output_dir = "out";
  return config;
}

std::string config_to_json(const ExperimentConfig& config) {
  json tasks = json::array();
  for (Task t : config.tasks) tasks.push_back(to_string(t));
  json j{{"objects", config.objects},
         {"tasks", tasks},
         {"seeds", config.seeds},
         {"perception",
          json{{"noise_sigma_pos", config.perception.noise_sigma_pos},
               {"noise_sigma_theta", config.perception.noise_sigma_theta},
               {"proposals_per_object", config.perception.proposals_per_object},
               {"rng_seed", config.perception.rng_seed}}},
         {"sim",
          json{{"dt", config.sim.dt},
               {"spill_tilt_threshold", config.sim.spill_tilt_threshold},
               {"pour_fraction_required", config.sim.pour_fraction_required},
               {"shake_min_amplitude", config.sim.shake_min_amplitude},
               {"handover_zone_tolerance", config.sim.handover_zone_tolerance},
               {"bins_x", config.sim.bins_x},
               {"bins_z", config.sim.bins_z},
               {"bins_theta", config.sim.bins_theta}}},
         {"output_dir", config.output_dir}};
  return j.dump(2);
}

ExperimentConfig config_from_json(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("invalid config JSON: ") + e.what());
  }
  ExperimentConfig config = ExperimentConfig::defaults();
  try {
    if (j.contains("objects")) config.objects = j.at("objects").get<std::vector<std::string>>();
    if (j.contains("tasks")) {
      config.tasks.clear();
      for (const json& t : j.at("tasks")) config.tasks.push_back(task_from_string(t));
    }
    if (j.contains("seeds")) config.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    if (j.contains("perception")) {
      const json& p = j.at("perception");
      if (p.contains("noise_sigma_pos")) config.perception.noise_sigma_pos = p.at("noise_sigma_pos");
      if (p.contains("noise_sigma_theta"))
        config.perception.noise_sigma_theta = p.at("noise_sigma_theta");
      if (p.contains("proposals_per_object"))
        config.perception.proposals_per_object = p.at("proposals_per_object");
      if (p.contains("rng_seed")) config.perception.rng_seed = p.at("rng_seed");
    }
    if (j.contains("sim")) {
      const json& s = j.at("sim");
      if (s.contains("dt")) config.sim.dt = s.at("dt");
      if (s.contains("spill_tilt_threshold"))
        config.sim.spill_tilt_threshold = s.at("spill_tilt_threshold");
      if (s.contains("pour_fraction_required"))
        config.sim.pour_fraction_required = s.at("pour_fraction_required");
      if (s.contains("shake_min_amplitude"))
        config.sim.shake_min_amplitude = s.at("shake_min_amplitude");
      if (s.contains("handover_zone_tolerance"))
        config.sim.handover_zone_tolerance = s.at("handover_zone_tolerance");
      if (s.contains("bins_x")) config.sim.bins_x = s.at("bins_x");
      if (s.contains("bins_z")) config.sim.bins_z = s.at("bins_z");
      if (s.contains("bins_theta")) config.sim.bins_theta = s.at("bins_theta");
    }
    if (j.contains("output_dir")) config.output_dir = j.at("output_dir").get<std::string>();
  } catch (const json::exception& e) {
    throw ValidationError(std::string("invalid config JSON: ") + e.what());
  }
  config.validate();
  return config;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return config_from_json(buffer.str());
}

std::uint64_t config_hash(const ExperimentConfig& config) {
  const std::string text = config_to_json(config);
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

namespace {

std::string hash_header(std::uint64_t hash) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "# config_hash=%016llx\n",
                static_cast<unsigned long long>(hash));
  return std::string("# schema=") + kTrialSchemaVersion + "\n" + buf;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ValidationError("cannot create output directory: " + dir);
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot open for writing: " + path);
  return out;
}

// Minimal static SVG bar chart; one group of bars per label, one bar per
// series entry, with an optional horizontal reference line.
void write_bar_svg(const std::string& path, const std::string& title,
                   const std::vector<std::string>& labels,
                   const std::vector<std::pair<std::string, std::vector<double>>>& series,
                   std::optional<double> reference = std::nullopt) {
  double max_v = reference.value_or(0.0);
  for (const auto& [name, values] : series) {
    for (double v : values) max_v = std::max(max_v, v);
  }
  if (max_v <= 0.0) max_v = 1.0;
  max_v *= 1.15;

  const double width = 640.0, height = 360.0;
  const double left = 60.0, bottom = 300.0, top = 40.0;
  const double plot_w = width - left - 20.0;
  const double plot_h = bottom - top;
  const double group_w = plot_w / std::max<std::size_t>(1, labels.size());
  const double bar_w = group_w / (series.size() + 1);
  static const char* colors[] = {"#4878a8", "#d1605e", "#6aa56a"};

  std::ofstream out = open_out(path);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
      << height << "\">\n";
  out << "<text x=\"" << left << "\" y=\"24\" font-family=\"sans-serif\" font-size=\"16\">"
      << title << "</text>\n";
  out << "<line x1=\"" << left << "\" y1=\"" << bottom << "\" x2=\"" << left + plot_w
      << "\" y2=\"" << bottom << "\" stroke=\"#333\"/>\n";
  out << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << bottom
      << "\" stroke=\"#333\"/>\n";

  for (std::size_t gi = 0; gi < labels.size(); ++gi) {
    for (std::size_t si = 0; si < series.size(); ++si) {
      const auto& values = series[si].second;
      if (gi >= values.size()) continue;
      const double v = values[gi];
      const double h = plot_h * v / max_v;
      const double x = left + gi * group_w + (si + 0.5) * bar_w;
      out << "<rect x=\"" << x << "\" y=\"" << bottom - h << "\" width=\"" << bar_w * 0.9
          << "\" height=\"" << h << "\" fill=\"" << colors[si % 3] << "\"/>\n";
    }
    out << "<text x=\"" << left + gi * group_w + group_w / 2 << "\" y=\"" << bottom + 18
        << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">" << labels[gi]
        << "</text>\n";
  }
  if (reference) {
    const double y = bottom - plot_h * (*reference) / max_v;
    out << "<line x1=\"" << left << "\" y1=\"" << y << "\" x2=\"" << left + plot_w << "\" y2=\""
        << y << "\" stroke=\"#2255cc\" stroke-dasharray=\"6,4\"/>\n";
  }
  double legend_x = left + 10.0;
  for (std::size_t si = 0; si < series.size(); ++si) {
    out << "<rect x=\"" << legend_x << "\" y=\"" << top - 10 << "\" width=\"10\" height=\"10\" fill=\""
        << colors[si % 3] << "\"/>\n";
    out << "<text x=\"" << legend_x + 14 << "\" y=\"" << top << "\" font-family=\"sans-serif\" "
        << "font-size=\"11\">" << series[si].first << "</text>\n";
    legend_x += 120.0;
  }
  out << "</svg>\n";
}

}  // namespace

void write_trials_csv(const std::string& path, const std::vector<TrialRecord>& trials,
                      std::uint64_t hash) {
  std::ofstream out = open_out(path);
  out << hash_header(hash);
  out << "object,task,strategy,selected_index,confidence,success,simulations,d_h\n";
  for (const TrialRecord& t : trials) {
    out << t.object_id << ',' << to_string(t.task) << ',' << t.strategy << ','
        << (t.selected_index ? std::to_string(*t.selected_index) : std::string("-1")) << ','
        << (t.confidence ? fmt(*t.confidence) : std::string()) << ','
        << (t.success ? 1 : 0) << ',' << t.simulations << ','
        << (t.dh ? fmt(*t.dh) : std::string()) << "\n";
  }
}

std::map<Task, std::vector<DemoBundle>> demo_suite(const ExperimentConfig& config) {
  std::map<Task, std::vector<DemoBundle>> suite;
  for (Task task : config.tasks) {
    suite[task] = gen_demos(task, 9, DemoMix{6, 3}, config.seeds.front(), config.sim);
  }
  return suite;
}

namespace {

Region demo_window(const std::vector<DemoBundle>& bundles, Task task, const SimConfig& cfg) {
  // Window over the successful demonstrations only: divergent rollouts clamp
  // to edge bins and stay heavily penalized rather than widening the bins.
  double min_x = 1e300, max_x = -1e300, min_z = 1e300, max_z = -1e300;
  for (const DemoBundle& b : bundles) {
    if (b.label != DemoLabel::kSuccessful) continue;
    const RolloutResult r = simulate_along(b.ee_traj, b.grasp, b.scene, task, cfg);
    for (const TimedPose& s : r.action_region_traj.samples) {
      min_x = std::min(min_x, s.pose.x);
      max_x = std::max(max_x, s.pose.x);
      min_z = std::min(min_z, s.pose.z);
      max_z = std::max(max_z, s.pose.z);
    }
  }
  Region window;
  const double pad_x = 0.1 * std::max(max_x - min_x, 1e-3);
  const double pad_z = 0.1 * std::max(max_z - min_z, 1e-3);
  window.center = Pose2(0.5 * (min_x + max_x), 0.5 * (min_z + max_z), 0.0);
  window.half_extents = {0.5 * (max_x - min_x) + pad_x, 0.5 * (max_z - min_z) + pad_z};
  // Equal extents on both axes so the divergence weighs x and z offsets at
  // the same spatial resolution.
  const double half = std::max(window.half_extents[0], window.half_extents[1]);
  window.half_extents = {half, half};
  window.label = RegionKind::kAction;
  return window;
}

}  // namespace

std::vector<std::pair<double, DemoLabel>> calibration_pairs(
    const TaskRecord& record, const std::vector<DemoBundle>& bundles, const SimConfig& cfg) {
  // Replicate the policy once more from every demonstrated grasp, with a
  // fresh mild goal/duration perturbation so stored outcomes do not simply
  // match themselves at the divergence cap.
  std::vector<std::pair<double, DemoLabel>> pairs;
  const Pose2 goal_ref(record.policy.dims[0].goal_ref, record.policy.dims[1].goal_ref,
                       record.policy.dims[2].goal_ref);
  const double tau = record.policy.tau_ref();
  for (std::size_t i = 0; i < bundles.size(); ++i) {
    const DemoBundle& b = bundles[i];
    Rng rng(mix_seed(b.scene.rng_seed, 5000 + i));
    const Pose2 goal(goal_ref.x + 0.02 * (rng.uniform() - 0.5),
                     goal_ref.z + 0.02 * (rng.uniform() - 0.5), goal_ref.theta);
    const double duration = tau * (1.0 + 0.12 * (rng.uniform() - 0.5));
    const Pose2 start = compose(b.scene.object_pose, b.grasp.pose_on_object);
    const Trajectory ee = rollout(record.policy, start, goal, duration, cfg.dt);
    const RolloutResult r = simulate_along(ee, b.grasp, b.scene, record.task, cfg);
    const OutcomeSignature sig = signature(r.action_region_traj, record.histogram_window, cfg);
    const double c = confidence(sig, record);
    const bool success = ground_truth_success(r, record.task, b.scene, cfg);
    pairs.emplace_back(c, success ? DemoLabel::kSuccessful : DemoLabel::kUndesired);
  }
  return pairs;
}

Library build_library(const ExperimentConfig& config, std::ostream& log) {
  config.validate();
  const auto suite = demo_suite(config);

  Library library;
  for (const auto& [task, bundles] : suite) {
    TaskRecord& record = library.records[task];
    record.task = task;
    record.histogram_window = demo_window(bundles, task, config.sim);
    record.has_window = true;
    for (const DemoBundle& b : bundles) {
      record_demonstration(library, task, b.ee_traj, b.scene, b.grasp, b.label, config.sim);
    }
    const auto pairs = calibration_pairs(record, bundles, config.sim);
    library.delta[task] = calibrate_delta(pairs);
    log << "task " << to_string(task) << ": |A_tau|=" << record.outcomes.size()
        << " |R_tau|=" << record.ranked_transforms.size() << " delta=" << fmt(library.delta[task])
        << "\n";
  }
  return library;
}

namespace {

std::optional<double> trial_dh(const Scene& scene, Task task, const GraspCandidate& grasp) {
  const Pose2 region = compose(scene.object_pose, segment_action_region(scene.object, task).center);
  const Pose2 grasp_world = compose(scene.object_pose, grasp.pose_on_object);
  return d_h(region, grasp_world);
}

}  // namespace

TrialRecord standalone_trial(const Scene& scene, Task task, const Library& library,
                             const PerceptionConfig& pcfg, const SimConfig& scfg) {
  TrialRecord trial;
  trial.object_id = scene.object.id;
  trial.task = task;
  trial.strategy = "standalone";

  PerceptionConfig cfg = pcfg;
  cfg.rng_seed = mix_seed(pcfg.rng_seed, scene.rng_seed);
  const Region g_star = detect_grasp_affordance_region(scene.object, task, cfg);
  const auto candidates = propose_grasp_candidates(scene.object, g_star, cfg);
  if (candidates.empty()) return trial;

  // Highest detector score, no simulation before selection.
  const std::uint64_t sims_before = simulation_count();
  const GraspCandidate& selected = candidates.front();
  if (simulation_count() != sims_before) {
    throw ValidationError("standalone selection must not forward-simulate");
  }
  trial.selected_index = selected.index;
  trial.simulations = 0;

  const auto record_it = library.records.find(task);
  if (record_it == library.records.end()) {
    throw ValidationError("library has no record for task '" + to_string(task) + "'");
  }
  const RolloutResult result =
      forward_simulate(record_it->second.policy, selected, scene, task, scfg);
  trial.success = ground_truth_success(result, task, scene, scfg);
  trial.dh = trial_dh(scene, task, selected);
  return trial;
}

TrialRecord sagat_trial(const Scene& scene, Task task, const Library& library,
                        const PerceptionConfig& pcfg, const SimConfig& scfg, bool exhaustive) {
  TrialRecord trial;
  trial.object_id = scene.object.id;
  trial.task = task;
  trial.strategy = "sagat";

  const DeployDecision decision = deploy(scene, task, library, pcfg, scfg, exhaustive);
  trial.simulations = decision.simulations;
  if (!decision.grasp) return trial;

  trial.selected_index = decision.grasp->index;
  trial.confidence = decision.report->confidence;
  const RolloutResult result =
      forward_simulate(library.records.at(task).policy, *decision.grasp, scene, task, scfg);
  trial.success = ground_truth_success(result, task, scene, scfg);
  trial.dh = trial_dh(scene, task, *decision.grasp);
  return trial;
}

ExperimentArtifacts run_similarity(const ExperimentConfig& config, const Library& library,
                                   std::ostream& log) {
  config.validate();
  const auto suite = demo_suite(config);
  ExperimentArtifacts artifacts;

  for (const std::string& object_id : config.objects) {
    const ObjectModel object = builtin_object(object_id);
    for (Task task : config.tasks) {
      SimilarityRow row;
      row.object_id = object_id;
      row.task = task;
      row.demo_mean = demo_mean_d_h(suite.at(task), task);
      row.reference_mean = reference_demo_mean_d_h(task);
      const Scene scene = default_scene(object, config.seeds.front());
      const TrialRecord trial =
          sagat_trial(scene, task, library, config.perception, config.sim, false);
      artifacts.trials.push_back(trial);
      row.dh = trial.dh;
      artifacts.similarity.push_back(row);
    }
  }

  for (Task task : config.tasks) {
    log << "task " << to_string(task)
        << ": demo mean d_hd=" << fmt(demo_mean_d_h(suite.at(task), task))
        << " (reference d_hd=" << fmt(reference_demo_mean_d_h(task)) << ")\n";
  }
  return artifacts;
}

ExperimentArtifacts run_rejection(const ExperimentConfig& config, const Library& library,
                                  std::ostream& log) {
  config.validate();
  ExperimentArtifacts artifacts;
  std::map<Task, std::pair<int, int>> totals;  // rejected, proposed

  for (const std::string& object_id : config.objects) {
    const ObjectModel object = builtin_object(object_id);
    for (Task task : config.tasks) {
      const Scene scene = default_scene(object, config.seeds.front());
      const DeployDecision decision =
          deploy(scene, task, library, config.perception, config.sim, true);
      RejectionRow row;
      row.object_id = object_id;
      row.task = task;
      row.proposed = static_cast<int>(decision.evaluated.size());
      for (const ConfidenceReport& r : decision.evaluated) {
        if (!r.passed) row.rejected += 1;
      }
      row.accepted = row.proposed - row.rejected;
      totals[task].first += row.rejected;
      totals[task].second += row.proposed;
      artifacts.rejection.push_back(row);
    }
  }

  for (const auto& [task, counts] : totals) {
    const double rate =
        counts.second == 0 ? 0.0 : static_cast<double>(counts.first) / counts.second;
    artifacts.rejection_rate[task] = rate;
    log << "task " << to_string(task) << ": rejection rate " << fmt(rate) << " (" << counts.first
        << "/" << counts.second << ")\n";
  }
  return artifacts;
}

ExperimentArtifacts run_compare(const ExperimentConfig& config, const Library& library,
                                std::ostream& log) {
  config.validate();
  ExperimentArtifacts artifacts;
  std::map<Task, std::map<std::string, CompareCell>> cells;

  for (Task task : config.tasks) {
    for (const std::string& strategy : {"standalone", "sagat"}) {
      CompareCell cell;
      cell.task = task;
      cell.strategy = strategy;
      cells[task][strategy] = cell;
    }
  }

  for (const std::string& object_id : config.objects) {
    const ObjectModel object = builtin_object(object_id);
    for (Task task : config.tasks) {
      for (std::uint64_t seed : config.seeds) {
        const Scene scene = default_scene(object, seed);
        const TrialRecord standalone =
            standalone_trial(scene, task, library, config.perception, config.sim);
        const TrialRecord sagat =
            sagat_trial(scene, task, library, config.perception, config.sim, false);
        artifacts.trials.push_back(standalone);
        artifacts.trials.push_back(sagat);
        cells[task]["standalone"].trials += 1;
        cells[task]["standalone"].successes += standalone.success ? 1 : 0;
        cells[task]["sagat"].trials += 1;
        cells[task]["sagat"].successes += sagat.success ? 1 : 0;
      }
    }
  }

  for (const auto& [task, by_strategy] : cells) {
    for (const std::string& strategy : {"standalone", "sagat"}) {
      const CompareCell& cell = by_strategy.at(strategy);
      artifacts.compare.push_back(cell);
      log << "task " << to_string(task) << " " << strategy << ": " << cell.successes << "/"
          << cell.trials << " = " << fmt(cell.rate()) << "\n";
    }
  }
  return artifacts;
}

void cmd_gen_demos(const ExperimentConfig& config, Task task, int count, DemoMix mix,
                   std::ostream& log) {
  config.validate();
  ensure_dir(config.output_dir);
  const auto bundles = gen_demos(task, count, mix, config.seeds.front(), config.sim);

  json manifest;
  manifest["task"] = to_string(task);
  manifest["seed"] = config.seeds.front();
  manifest["config_hash"] = config_hash(config);
  json entries = json::array();
  for (std::size_t i = 0; i < bundles.size(); ++i) {
    const DemoBundle& b = bundles[i];
    char name[64];
    std::snprintf(name, sizeof(name), "demo_%s_%02zu.csv", to_string(task).c_str(), i);
    b.ee_traj.save_csv((fs::path(config.output_dir) / name).string());
    entries.push_back(json{{"trajectory_file", name},
                           {"label", to_string(b.label)},
                           {"grasp",
                            json{{"x", b.grasp.pose_on_object.x},
                                 {"z", b.grasp.pose_on_object.z},
                                 {"theta", b.grasp.pose_on_object.theta},
                                 {"score", b.grasp.score},
                                 {"index", b.grasp.index}}}});
  }
  manifest["demos"] = entries;
  std::ofstream out = open_out((fs::path(config.output_dir) / "demos.json").string());
  out << manifest.dump(2) << "\n";
  log << "wrote " << bundles.size() << " demo bundles to " << config.output_dir << "\n";
}

void cmd_build_library(const ExperimentConfig& config, const std::string& library_path,
                       std::ostream& log) {
  ensure_dir(config.output_dir);
  const Library library = build_library(config, log);
  save_library(library, library_path);
  log << "library written to " << library_path << "\n";
}

void cmd_deploy(const ExperimentConfig& config, const std::string& object_id, Task task,
                const Library& library, bool exhaustive, std::ostream& log) {
  config.validate();
  ensure_dir(config.output_dir);
  const ObjectModel object = builtin_object(object_id);

  std::vector<TrialRecord> trials;
  for (std::uint64_t seed : config.seeds) {
    const Scene scene = default_scene(object, seed);
    const TrialRecord trial =
        sagat_trial(scene, task, library, config.perception, config.sim, exhaustive);
    if (trial.selected_index) {
      log << "seed " << seed << ": candidate " << *trial.selected_index << " confidence "
          << fmt(*trial.confidence) << " after " << trial.simulations << " simulation(s), "
          << (trial.success ? "success" : "failure") << "\n";
    } else {
      log << "seed " << seed << ": no candidate cleared the threshold after "
          << trial.simulations << " simulation(s)\n";
    }
    trials.push_back(trial);
  }
  write_trials_csv((fs::path(config.output_dir) / "trials.csv").string(), trials,
                   config_hash(config));
}

void cmd_experiment(const ExperimentConfig& config, const std::string& which,
                    const Library& library, std::ostream& log) {
  config.validate();
  ensure_dir(config.output_dir);
  const std::uint64_t hash = config_hash(config);
  const fs::path dir(config.output_dir);

  if (which == "similarity") {
    const ExperimentArtifacts artifacts = run_similarity(config, library, log);
    std::ofstream out = open_out((dir / "summary.csv").string());
    out << hash_header(hash);
    out << "object,task,d_h,demo_mean_d_h,reference_d_hd\n";
    std::vector<std::string> labels;
    std::vector<double> values;
    double demo_mean = 0.0;
    for (const SimilarityRow& row : artifacts.similarity) {
      out << row.object_id << ',' << to_string(row.task) << ','
          << (row.dh ? fmt(*row.dh) : std::string()) << ',' << fmt(row.demo_mean) << ','
          << fmt(row.reference_mean) << "\n";
      labels.push_back(row.object_id + ":" + to_string(row.task));
      values.push_back(row.dh.value_or(0.0));
      demo_mean = row.demo_mean;
    }
    write_trials_csv((dir / "trials.csv").string(), artifacts.trials, hash);
    write_bar_svg((dir / "similarity.svg").string(), "d_h(S_O, g*_p) vs demo mean", labels,
                  {{"d_h", values}}, demo_mean);
  } else if (which == "rejection") {
    const ExperimentArtifacts artifacts = run_rejection(config, library, log);
    std::ofstream out = open_out((dir / "summary.csv").string());
    out << hash_header(hash);
    out << "object,task,proposed,rejected,accepted,rate\n";
    for (const RejectionRow& row : artifacts.rejection) {
      const double rate = row.proposed == 0 ? 0.0 : static_cast<double>(row.rejected) / row.proposed;
      out << row.object_id << ',' << to_string(row.task) << ',' << row.proposed << ','
          << row.rejected << ',' << row.accepted << ',' << fmt(rate) << "\n";
    }
    std::vector<std::string> labels;
    std::vector<double> rates;
    for (const auto& [task, rate] : artifacts.rejection_rate) {
      labels.push_back(to_string(task));
      rates.push_back(rate);
    }
    write_bar_svg((dir / "rejection.svg").string(), "Rejection rate per task", labels,
                  {{"rejection", rates}});
  } else if (which == "compare") {
    const ExperimentArtifacts artifacts = run_compare(config, library, log);
    std::ofstream out = open_out((dir / "summary.csv").string());
    out << hash_header(hash);
    out << "task,strategy,trials,successes,rate\n";
    std::vector<std::string> labels;
    std::vector<double> standalone_rates, sagat_rates;
    for (const CompareCell& cell : artifacts.compare) {
      out << to_string(cell.task) << ',' << cell.strategy << ',' << cell.trials << ','
          << cell.successes << ',' << fmt(cell.rate()) << "\n";
      if (cell.strategy == "standalone") {
        labels.push_back(to_string(cell.task));
        standalone_rates.push_back(cell.rate());
      } else {
        sagat_rates.push_back(cell.rate());
      }
    }
    write_trials_csv((dir / "trials.csv").string(), artifacts.trials, hash);
    write_bar_svg((dir / "compare.svg").string(), "Task success rate by strategy", labels,
                  {{"standalone", standalone_rates}, {"sagat", sagat_rates}});
  } else {
    throw ValidationError("unknown experiment: " + which +
                          " (expected similarity|rejection|compare)");
  }
}

}  // namespace sagat
