#include "sagat/affordance.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "sagat/errors.hpp"
#include "sagat/random.hpp"

namespace sagat {

std::string to_string(DemoLabel label) {
  return label == DemoLabel::kSuccessful ? "successful" : "undesired";
}

DemoLabel demo_label_from_string(const std::string& text) {
  if (text == "successful") return DemoLabel::kSuccessful;
  if (text == "undesired") return DemoLabel::kUndesired;
  throw ValidationError("unknown demo label: " + text);
}

double kl_divergence(const OutcomeSignature& alpha, const OutcomeSignature& alpha_bar) {
  if (alpha.bins.size() != alpha_bar.bins.size()) {
    throw ValidationError("KL divergence requires equal bin counts");
  }
  double d = 0.0;
  for (std::size_t i = 0; i < alpha.bins.size(); ++i) {
    const double p = alpha.bins[i];
    if (p > 0.0) d += p * std::log(p / alpha_bar.bins[i]);
  }
  return d;
}

namespace {

std::string outcome_id(Task task, std::size_t index) {
  return to_string(task) + ":" + std::to_string(index);
}

double best_confidence(const OutcomeSignature& sig, const TaskRecord& record,
                       std::vector<double>* divergences) {
  if (record.outcomes.empty()) {
    throw ValidationError("task record has no stored outcomes");
  }
  double best = 0.0;
  bool any = false;
  for (std::size_t i = 0; i < record.outcomes.size(); ++i) {
    const double d = kl_divergence(record.outcomes[i], sig);
    if (divergences) divergences->push_back(d);
    const double c = 1.0 / std::max(d, kDivergenceCap);
    if (!any || c > best) {
      best = c;
      any = true;
    }
  }
  return best;
}

}  // namespace

double confidence(const OutcomeSignature& candidate_signature, const TaskRecord& record) {
  return best_confidence(candidate_signature, record, nullptr);
}

ConfidenceReport make_report(int candidate_index, const OutcomeSignature& candidate_signature,
                             const TaskRecord& record, double delta) {
  ConfidenceReport report;
  report.candidate_index = candidate_index;
  report.confidence =
      best_confidence(candidate_signature, record, &report.divergences);
  report.passed = report.confidence > delta;
  return report;
}

std::optional<int> select_grasp(const std::vector<ConfidenceReport>& reports, double delta) {
  std::optional<int> best_index;
  double best_confidence = 0.0;
  for (const ConfidenceReport& r : reports) {
    if (r.confidence <= delta) continue;
    if (!best_index || r.confidence > best_confidence ||
        (r.confidence == best_confidence && r.candidate_index < *best_index)) {
      best_index = r.candidate_index;
      best_confidence = r.confidence;
    }
  }
  return best_index;
}

double calibrate_delta(const std::vector<std::pair<double, DemoLabel>>& labeled) {
  std::size_t n_success = 0;
  std::size_t n_undesired = 0;
  for (const auto& [c, label] : labeled) {
    (label == DemoLabel::kSuccessful ? n_success : n_undesired) += 1;
  }
  if (n_success == 0 || n_undesired == 0) {
    throw ValidationError("calibration needs at least one sample of each label");
  }

  std::vector<double> values;
  values.reserve(labeled.size());
  for (const auto& [c, label] : labeled) values.push_back(c);
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());

  auto balanced_accuracy = [&](double threshold) {
    std::size_t tp = 0, tn = 0;
    for (const auto& [c, label] : labeled) {
      if (label == DemoLabel::kSuccessful && c > threshold) ++tp;
      if (label == DemoLabel::kUndesired && c <= threshold) ++tn;
    }
    return 0.5 * (static_cast<double>(tp) / n_success + static_cast<double>(tn) / n_undesired);
  };

  double best_delta = 0.0;
  double best_score = -1.0;
  for (std::size_t i = 0; i + 1 < values.size(); ++i) {
    const double mid = 0.5 * (values[i] + values[i + 1]);
    const double score = balanced_accuracy(mid);
    if (score > best_score || (score == best_score && mid > best_delta)) {
      best_score = score;
      best_delta = mid;
    }
  }
  if (values.size() == 1) {
    // All confidences identical: no separating boundary exists; fall back to
    // the common value itself (rejecting everything at or below it).
    best_delta = values.front();
  }
  return best_delta;
}

Pose2 relative_grasp_transform(const GraspCandidate& grasp, const Region& g_star) {
  const Pose2 rel = compose(invert(g_star.center), grasp.pose_on_object);
  const double diag = g_star.diagonal();
  if (diag <= 0.0) throw ValidationError("grasp region has zero diagonal");
  return Pose2(rel.x / diag, rel.z / diag, rel.theta);
}

void record_demonstration(Library& library, Task task, const Trajectory& demo,
                          const Scene& scene, const GraspCandidate& grasp_used,
                          DemoLabel label, const SimConfig& cfg) {
  demo.validate();
  TaskRecord& record = library.records[task];
  record.task = task;

  if (label == DemoLabel::kUndesired) {
    // Undesired demonstrations only feed threshold calibration.
    return;
  }

  if (!record.policy_fitted) {
    record.policy = fit_dmp(demo);
    record.policy_fitted = true;
  }

  const RolloutResult rollout = simulate_along(demo, grasp_used, scene, task, cfg);

  if (!record.has_window) {
    // Fallback for incremental use; the library builder presets a window
    // spanning every demonstration before recording.
    Region window;
    double min_x = 1e300, max_x = -1e300, min_z = 1e300, max_z = -1e300;
    for (const TimedPose& s : rollout.action_region_traj.samples) {
      min_x = std::min(min_x, s.pose.x);
      max_x = std::max(max_x, s.pose.x);
      min_z = std::min(min_z, s.pose.z);
      max_z = std::max(max_z, s.pose.z);
    }
    const double pad_x = 0.1 * std::max(max_x - min_x, 1e-3);
    const double pad_z = 0.1 * std::max(max_z - min_z, 1e-3);
    window.center = Pose2(0.5 * (min_x + max_x), 0.5 * (min_z + max_z), 0.0);
    window.half_extents = {0.5 * (max_x - min_x) + pad_x, 0.5 * (max_z - min_z) + pad_z};
    window.label = RegionKind::kAction;
    record.histogram_window = window;
    record.has_window = true;
  }

  const OutcomeSignature sig = signature(rollout.action_region_traj, record.histogram_window, cfg);

  // Rank the grasp transform against the outcomes experienced so far; the
  // very first demonstration is the reference and gets the capped score.
  double transform_confidence = 1.0 / kDivergenceCap;
  if (!record.outcomes.empty()) {
    transform_confidence = confidence(sig, record);
  }

  RankedTransform rt;
  rt.relative_pose = relative_grasp_transform(grasp_used, scene.object.grasp_region);
  rt.confidence = transform_confidence;
  rt.source_outcome_id = outcome_id(task, record.outcomes.size());
  record.outcomes.push_back(sig);
  record.ranked_transforms.push_back(rt);
  std::stable_sort(record.ranked_transforms.begin(), record.ranked_transforms.end(),
                   [](const RankedTransform& a, const RankedTransform& b) {
                     return a.confidence > b.confidence;
                   });
}

std::vector<int> one_shot_rank(const std::vector<GraspCandidate>& candidates,
                               const Region& g_star, const TaskRecord& record) {
  if (record.ranked_transforms.empty()) {
    throw ValidationError("one-shot ranking requires stored grasp transforms");
  }
  struct Key {
    double distance;
    double neg_confidence;
    int index;
  };
  std::vector<Key> keys;
  keys.reserve(candidates.size());
  for (const GraspCandidate& cand : candidates) {
    const Pose2 rel = relative_grasp_transform(cand, g_star);
    Key best{1e300, 1e300, cand.index};
    for (const RankedTransform& rt : record.ranked_transforms) {
      const double dx = rel.x - rt.relative_pose.x;
      const double dz = rel.z - rt.relative_pose.z;
      const double dtheta = wrap_angle(rel.theta - rt.relative_pose.theta);
      const double dist =
          std::sqrt(dx * dx + dz * dz + kTransformAngleWeight * dtheta * dtheta);
      if (dist < best.distance ||
          (dist == best.distance && -rt.confidence < best.neg_confidence)) {
        best.distance = dist;
        best.neg_confidence = -rt.confidence;
      }
    }
    keys.push_back(best);
  }
  std::sort(keys.begin(), keys.end(), [](const Key& a, const Key& b) {
    if (a.distance != b.distance) return a.distance < b.distance;
    if (a.neg_confidence != b.neg_confidence) return a.neg_confidence < b.neg_confidence;
    return a.index < b.index;
  });
  std::vector<int> order;
  order.reserve(keys.size());
  for (const Key& k : keys) order.push_back(k.index);
  return order;
}

DeployDecision deploy(const Scene& scene, Task task, const Library& library,
                      const PerceptionConfig& perception_cfg, const SimConfig& sim_cfg,
                      bool exhaustive) {
  const auto record_it = library.records.find(task);
  if (record_it == library.records.end()) {
    throw ValidationError("library has no record for task '" + to_string(task) + "'");
  }
  const auto delta_it = library.delta.find(task);
  if (delta_it == library.delta.end()) {
    throw ValidationError("library has no threshold for task '" + to_string(task) + "'");
  }
  const TaskRecord& record = record_it->second;
  const double delta = delta_it->second;
  if (!record.outcomes.empty() &&
      static_cast<int>(record.outcomes.front().bins.size()) != sim_cfg.total_bins()) {
    throw ValidationError("sim config bin counts do not match the stored outcomes");
  }

  // Perception is seeded per scene so repeated deployments are reproducible.
  PerceptionConfig cfg = perception_cfg;
  cfg.rng_seed = mix_seed(perception_cfg.rng_seed, scene.rng_seed);

  DeployDecision decision;
  const Region g_star = detect_grasp_affordance_region(scene.object, task, cfg);
  (void)segment_action_region(scene.object, task);
  decision.candidates = propose_grasp_candidates(scene.object, g_star, cfg);
  if (decision.candidates.empty()) return decision;

  const std::vector<int> order = one_shot_rank(decision.candidates, g_star, record);

  for (int index : order) {
    const GraspCandidate& cand = decision.candidates[index];
    const RolloutResult result = forward_simulate(record.policy, cand, scene, task, sim_cfg);
    decision.simulations += 1;
    const OutcomeSignature sig =
        signature(result.action_region_traj, record.histogram_window, sim_cfg);
    const ConfidenceReport report = make_report(cand.index, sig, record, delta);
    decision.evaluated.push_back(report);
    if (!exhaustive && report.passed) {
      decision.grasp = cand;
      decision.report = report;
      return decision;
    }
  }

  if (exhaustive) {
    const std::optional<int> chosen = select_grasp(decision.evaluated, delta);
    if (chosen) {
      for (const ConfidenceReport& r : decision.evaluated) {
        if (r.candidate_index == *chosen) {
          decision.report = r;
          break;
        }
      }
      for (const GraspCandidate& c : decision.candidates) {
        if (c.index == *chosen) {
          decision.grasp = c;
          break;
        }
      }
    }
  }
  return decision;
}

namespace {

using json = nlohmann::ordered_json;

json pose_to_json(const Pose2& p) {
  return json{{"x", p.x}, {"z", p.z}, {"theta", p.theta}};
}

Pose2 pose_from_json(const json& j) {
  return Pose2(j.at("x").get<double>(), j.at("z").get<double>(), j.at("theta").get<double>());
}

json region_to_json(const Region& r) {
  return json{{"center", pose_to_json(r.center)},
              {"half_extents", r.half_extents},
              {"label", to_string(r.label)}};
}

Region region_from_json(const json& j) {
  Region r;
  r.center = pose_from_json(j.at("center"));
  r.half_extents = j.at("half_extents").get<std::array<double, 2>>();
  r.label = region_kind_from_string(j.at("label").get<std::string>());
  return r;
}

json policy_to_json(const DmpPolicy& policy) {
  json dims = json::array();
  for (const DmpDimension& d : policy.dims) {
    dims.push_back(json{{"basis_count", d.basis_count},
                        {"weights", d.weights},
                        {"start_ref", d.start_ref},
                        {"goal_ref", d.goal_ref},
                        {"gains",
                         json{{"alpha_y", d.gains.alpha_y},
                              {"beta_y", d.gains.beta_y},
                              {"alpha_s", d.gains.alpha_s}}},
                        {"tau_ref", d.tau_ref},
                        {"degenerate", d.degenerate}});
  }
  return json{{"dims", dims}};
}

DmpPolicy policy_from_json(const json& j) {
  DmpPolicy policy;
  const json& dims = j.at("dims");
  if (dims.size() != 3) throw ValidationError("policy must have exactly 3 dimensions");
  for (std::size_t i = 0; i < 3; ++i) {
    DmpDimension& d = policy.dims[i];
    const json& jd = dims[i];
    d.basis_count = jd.at("basis_count").get<int>();
    d.weights = jd.at("weights").get<std::vector<double>>();
    d.start_ref = jd.at("start_ref").get<double>();
    d.goal_ref = jd.at("goal_ref").get<double>();
    d.gains.alpha_y = jd.at("gains").at("alpha_y").get<double>();
    d.gains.beta_y = jd.at("gains").at("beta_y").get<double>();
    d.gains.alpha_s = jd.at("gains").at("alpha_s").get<double>();
    d.tau_ref = jd.at("tau_ref").get<double>();
    d.degenerate = jd.at("degenerate").get<bool>();
  }
  policy.validate();
  return policy;
}

}  // namespace

std::string library_to_json(const Library& library) {
  json tasks = json::object();
  for (const auto& [task, record] : library.records) {
    json outcomes = json::array();
    for (const OutcomeSignature& sig : record.outcomes) {
      outcomes.push_back(json{{"bins", sig.bins}});
    }
    json transforms = json::array();
    for (const RankedTransform& rt : record.ranked_transforms) {
      transforms.push_back(json{{"relative_pose", pose_to_json(rt.relative_pose)},
                                {"confidence", rt.confidence},
                                {"source_outcome_id", rt.source_outcome_id}});
    }
    const auto delta_it = library.delta.find(task);
    if (delta_it == library.delta.end() || delta_it->second <= 0.0) {
      throw ValidationError("library is missing a positive threshold for task '" +
                            to_string(task) + "'");
    }
    tasks[to_string(task)] = json{{"policy", policy_to_json(record.policy)},
                                  {"outcomes", outcomes},
                                  {"ranked_transforms", transforms},
                                  {"histogram_window", region_to_json(record.histogram_window)},
                                  {"delta", delta_it->second}};
  }
  return json{{"version", library.version}, {"tasks", tasks}}.dump(2);
}

Library library_from_json(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("invalid library JSON: ") + e.what());
  }
  Library library;
  try {
    library.version = j.at("version").get<std::string>();
    if (library.version != kLibraryFormatVersion) {
      throw ValidationError("unsupported library format version: " + library.version);
    }
    for (const auto& [label, entry] : j.at("tasks").items()) {
      const Task task = task_from_string(label);
      TaskRecord record;
      record.task = task;
      record.policy = policy_from_json(entry.at("policy"));
      record.policy_fitted = true;
      for (const json& o : entry.at("outcomes")) {
        OutcomeSignature sig;
        sig.bins = o.at("bins").get<std::vector<double>>();
        record.outcomes.push_back(std::move(sig));
      }
      for (const json& t : entry.at("ranked_transforms")) {
        RankedTransform rt;
        rt.relative_pose = pose_from_json(t.at("relative_pose"));
        rt.confidence = t.at("confidence").get<double>();
        rt.source_outcome_id = t.at("source_outcome_id").get<std::string>();
        record.ranked_transforms.push_back(std::move(rt));
      }
      record.histogram_window = region_from_json(entry.at("histogram_window"));
      record.has_window = true;
      const double delta = entry.at("delta").get<double>();
      if (delta <= 0.0) throw ValidationError("library delta must be positive");
      library.records[task] = std::move(record);
      library.delta[task] = delta;
    }
  } catch (const json::exception& e) {
    throw ValidationError(std::string("invalid library JSON: ") + e.what());
  }
  return library;
}

void save_library(const Library& library, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot open for writing: " + path);
  out << library_to_json(library) << "\n";
}

Library load_library(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open for reading: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return library_from_json(buffer.str());
}

}  // namespace sagat
