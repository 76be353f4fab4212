#pragma once

#include <cstdint>
#include <vector>

#include "sagat/dmp.hpp"
#include "sagat/world.hpp"

namespace sagat {

struct SimConfig {
  double dt = 0.01;                     // seconds
  double spill_tilt_threshold = 0.35;   // radians; content drains past this
  double pour_fraction_required = 0.5;  // in (0, 1]
  double shake_min_amplitude = 0.4;     // radians, peak-to-peak
  double handover_zone_tolerance = 0.06;  // meters
  int bins_x = 8;
  int bins_z = 8;
  int bins_theta = 8;

  int total_bins() const { return bins_x * bins_z * bins_theta; }
  void validate() const;  // throws ValidationError
};

// Content drain rate past the tilt threshold, capacity fraction per second.
inline constexpr double kDrainRate = 1.0;

struct RolloutResult {
  Trajectory ee_traj;
  Trajectory action_region_traj;
  std::vector<double> content_remaining;  // one entry per sample, non-increasing
  double delivered_fraction = 0.0;
  double spilled_fraction = 0.0;
};

// Discrete outcome distribution over binned action-region states: the
// normalized (x, z, theta) occupancy histogram of a trajectory.
struct OutcomeSignature {
  std::vector<double> bins;  // probabilities, sum to 1, all > 0 after smoothing
};

inline constexpr double kSignatureSmoothing = 1e-6;

// Run the task policy from the grasp: the object is rigidly attached to the
// end effector at the grasp transform, and content drains while the opening
// tilts past the threshold (counted as delivered when the opening sits inside
// the scene target region, spilled otherwise).
RolloutResult forward_simulate(const DmpPolicy& policy, const GraspCandidate& grasp,
                               const Scene& scene, Task task, const SimConfig& cfg);

// Same attachment and content model, but along a given end-effector
// trajectory (used to evaluate recorded demonstrations).
RolloutResult simulate_along(const Trajectory& ee_traj, const GraspCandidate& grasp,
                             const Scene& scene, Task task, const SimConfig& cfg);

// Occupancy histogram of the trajectory over the window: x/z over the
// region box, theta over the full (-pi, pi] range; out-of-window samples
// clamp to edge bins; additive smoothing then renormalization.
OutcomeSignature signature(const Trajectory& traj, const Region& window,
                           const SimConfig& cfg);

// Independent physics oracle for evaluation experiments.
bool ground_truth_success(const RolloutResult& result, Task task, const Scene& scene,
                          const SimConfig& cfg);

// Monotonic count of forward simulations performed in this process. The
// comparison experiment uses it to show the standalone baseline selects
// before any simulation happens.
std::uint64_t simulation_count();

}  // namespace sagat
