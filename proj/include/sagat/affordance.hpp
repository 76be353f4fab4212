#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sagat/dmp.hpp"
#include "sagat/perception.hpp"
#include "sagat/simulate.hpp"
#include "sagat/world.hpp"

namespace sagat {

// Confidence is the inverse divergence, capped so an exact outcome match
// stays finite.
inline constexpr double kDivergenceCap = 1e-9;
inline const std::string kLibraryFormatVersion = "1";

// Spatial transform of an experienced grasp w.r.t. the grasp affordance
// region center, translation normalized by the region diagonal.
struct RankedTransform {
  Pose2 relative_pose;
  double confidence = 0.0;
  std::string source_outcome_id;
};

// One library entry: policy, successful outcomes, ranked grasp transforms.
struct TaskRecord {
  Task task = Task::kPour;
  DmpPolicy policy;
  bool policy_fitted = false;
  std::vector<OutcomeSignature> outcomes;
  std::vector<RankedTransform> ranked_transforms;  // sorted by confidence desc
  Region histogram_window;
  bool has_window = false;
};

struct Library {
  std::map<Task, TaskRecord> records;
  std::map<Task, double> delta;  // per-task confidence threshold, > 0
  std::string version = kLibraryFormatVersion;
};

struct ConfidenceReport {
  int candidate_index = 0;
  std::vector<double> divergences;  // one per stored outcome
  double confidence = 0.0;          // 1 / max(min divergence, cap)
  bool passed = false;              // confidence > delta
};

enum class DemoLabel { kSuccessful, kUndesired };

std::string to_string(DemoLabel label);
DemoLabel demo_label_from_string(const std::string& text);

// D(alpha || alpha_bar) = sum_i alpha(i) ln(alpha(i)/alpha_bar(i)).
// Both signatures must be smoothed (strictly positive) and of equal size.
double kl_divergence(const OutcomeSignature& alpha, const OutcomeSignature& alpha_bar);

// C(g_p) = max over stored outcomes of the capped inverse divergence.
double confidence(const OutcomeSignature& candidate_signature, const TaskRecord& record);

ConfidenceReport make_report(int candidate_index, const OutcomeSignature& candidate_signature,
                             const TaskRecord& record, double delta);

// Highest-confidence report with confidence strictly above delta; ties break
// toward the lowest candidate index. nullopt when nothing passes.
std::optional<int> select_grasp(const std::vector<ConfidenceReport>& reports, double delta);

// Threshold from labeled (confidence, label) pairs: the boundary midpoint
// maximizing balanced accuracy of `successful iff confidence > delta`; among
// equally accurate thresholds the largest wins.
double calibrate_delta(const std::vector<std::pair<double, DemoLabel>>& labeled);

// Normalized grasp transform relative to the grasp affordance region.
Pose2 relative_grasp_transform(const GraspCandidate& grasp, const Region& g_star);

// Fold one demonstration into the library: fits the policy from the first
// successful demo, appends outcome and ranked transform for successful
// labels, leaves the record untouched for undesired ones.
void record_demonstration(Library& library, Task task, const Trajectory& demo,
                          const Scene& scene, const GraspCandidate& grasp_used,
                          DemoLabel label, const SimConfig& cfg);

// Candidate indices ordered by prospective success: lexicographic
// (transform distance, -stored confidence), then candidate index.
std::vector<int> one_shot_rank(const std::vector<GraspCandidate>& candidates,
                               const Region& g_star, const TaskRecord& record);

inline constexpr double kTransformAngleWeight = 0.1;

struct DeployDecision {
  std::optional<GraspCandidate> grasp;
  std::optional<ConfidenceReport> report;
  std::vector<ConfidenceReport> evaluated;  // in evaluation order
  std::vector<GraspCandidate> candidates;   // proposal order (by index)
  int simulations = 0;
};

// End-to-end deployment loop: detect the grasp affordance region, segment
// the action region, rank candidates by transform similarity, then simulate
// in rank order until one clears the threshold. With `exhaustive` set, every
// candidate is simulated and the best passing one is returned.
DeployDecision deploy(const Scene& scene, Task task, const Library& library,
                      const PerceptionConfig& perception_cfg, const SimConfig& sim_cfg,
                      bool exhaustive = false);

// Library persistence: single JSON document, versioned; unknown versions are
// rejected.
std::string library_to_json(const Library& library);
Library library_from_json(const std::string& json_text);
void save_library(const Library& library, const std::string& path);
Library load_library(const std::string& path);

}  // namespace sagat
