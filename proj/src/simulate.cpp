#include "sagat/simulate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>

#include "sagat/errors.hpp"

namespace sagat {

namespace {
std::atomic<std::uint64_t> g_simulation_count{0};
}

std::uint64_t simulation_count() { return g_simulation_count.load(std::memory_order_relaxed); }

void SimConfig::validate() const {
  if (dt <= 0.0) throw ValidationError("sim dt must be positive");
  if (spill_tilt_threshold <= 0.0) throw ValidationError("spill_tilt_threshold must be positive");
  if (pour_fraction_required <= 0.0 || pour_fraction_required > 1.0) {
    throw ValidationError("pour_fraction_required must lie in (0, 1]");
  }
  if (shake_min_amplitude <= 0.0) throw ValidationError("shake_min_amplitude must be positive");
  if (handover_zone_tolerance <= 0.0) {
    throw ValidationError("handover_zone_tolerance must be positive");
  }
  if (bins_x < 4 || bins_z < 4 || bins_theta < 4) {
    throw ValidationError("histogram bin counts must be >= 4");
  }
}

namespace {

// Absolute angle between the opening direction (rotated into the world) and
// vertical, in [0, pi].
double opening_tilt(const ObjectModel& object, const Pose2& object_pose) {
  const auto dir = rotate_vec(object.opening_direction, object_pose.theta);
  const double dot = std::clamp(dir[1], -1.0, 1.0);
  return std::acos(dot);
}

}  // namespace

RolloutResult simulate_along(const Trajectory& ee_traj, const GraspCandidate& grasp,
                             const Scene& scene, Task task, const SimConfig& cfg) {
  cfg.validate();
  ee_traj.validate();
  const ObjectModel& object = scene.object;
  const Region& region = object.action_region(task);

  const Pose2 attach = invert(grasp.pose_on_object);
  const bool has_opening = object.affords(Task::kPour);
  const Pose2 opening_offset = has_opening ? object.action_region(Task::kPour).center : Pose2();

  RolloutResult result;
  result.ee_traj = ee_traj;
  result.action_region_traj.dt = ee_traj.dt;
  result.action_region_traj.samples.reserve(ee_traj.samples.size());
  result.content_remaining.reserve(ee_traj.samples.size());

  double remaining = object.content_capacity;
  double delivered = 0.0;
  double spilled = 0.0;

  for (std::size_t i = 0; i < ee_traj.samples.size(); ++i) {
    const TimedPose& s = ee_traj.samples[i];
    const Pose2 object_pose = compose(s.pose, attach);
    const Pose2 region_pose = compose(object_pose, region.center);
    result.action_region_traj.samples.push_back({s.t, region_pose});

    if (i > 0 && has_opening && remaining > 0.0) {
      const double tilt = opening_tilt(object, object_pose);
      if (tilt > cfg.spill_tilt_threshold) {
        const double drained = std::min(remaining, kDrainRate * ee_traj.dt);
        const Pose2 opening_pose = compose(object_pose, opening_offset);
        if (scene.target_region.contains(opening_pose.x, opening_pose.z)) {
          delivered += drained;
        } else {
          spilled += drained;
        }
        remaining -= drained;
      }
    }
    result.content_remaining.push_back(remaining);
  }

  result.delivered_fraction = delivered;
  result.spilled_fraction = spilled;
  return result;
}

RolloutResult forward_simulate(const DmpPolicy& policy, const GraspCandidate& grasp,
                               const Scene& scene, Task task, const SimConfig& cfg) {
  g_simulation_count.fetch_add(1, std::memory_order_relaxed);
  cfg.validate();
  policy.validate();

  const Pose2 ee_start = compose(scene.object_pose, grasp.pose_on_object);
  const Pose2 ee_goal(policy.dims[0].goal_ref, policy.dims[1].goal_ref,
                      policy.dims[2].goal_ref);
  const Trajectory ee_traj = rollout(policy, ee_start, ee_goal, policy.tau_ref(), cfg.dt);
  return simulate_along(ee_traj, grasp, scene, task, cfg);
}

OutcomeSignature signature(const Trajectory& traj, const Region& window,
                           const SimConfig& cfg) {
  cfg.validate();
  if (traj.samples.empty()) throw ValidationError("signature needs a non-empty trajectory");
  if (window.half_extents[0] <= 0.0 || window.half_extents[1] <= 0.0) {
    throw ValidationError("signature window must have positive extents");
  }

  const double x0 = window.center.x - window.half_extents[0];
  const double z0 = window.center.z - window.half_extents[1];
  const double wx = 2.0 * window.half_extents[0];
  const double wz = 2.0 * window.half_extents[1];

  auto bin_index = [](double value, double lo, double width, int count) {
    const int raw = static_cast<int>(std::floor((value - lo) / width * count));
    return std::clamp(raw, 0, count - 1);
  };
  // Circular theta binning with one bin centered on zero tilt, so upright
  // poses and spilling tilts never share a bin.
  auto theta_bin = [&](double theta) {
    const double width = 2.0 * kPi / cfg.bins_theta;
    double shifted = std::fmod(theta + kPi + 0.5 * width, 2.0 * kPi);
    if (shifted < 0.0) shifted += 2.0 * kPi;
    return std::min(static_cast<int>(shifted / width), cfg.bins_theta - 1);
  };

  std::vector<double> hist(cfg.total_bins(), 0.0);
  for (const TimedPose& s : traj.samples) {
    const int ix = bin_index(s.pose.x, x0, wx, cfg.bins_x);
    const int iz = bin_index(s.pose.z, z0, wz, cfg.bins_z);
    const int it = theta_bin(s.pose.theta);
    hist[(static_cast<std::size_t>(ix) * cfg.bins_z + iz) * cfg.bins_theta + it] += 1.0;
  }

  const double n = static_cast<double>(traj.samples.size());
  double total = 0.0;
  for (double& h : hist) {
    h = h / n + kSignatureSmoothing;
    total += h;
  }
  for (double& h : hist) h /= total;

  OutcomeSignature sig;
  sig.bins = std::move(hist);
  return sig;
}

bool ground_truth_success(const RolloutResult& result, Task task, const Scene& scene,
                          const SimConfig& cfg) {
  cfg.validate();
  const Trajectory& region_traj = result.action_region_traj;
  if (region_traj.samples.empty()) throw ValidationError("empty rollout result");

  switch (task) {
    case Task::kPour:
      return result.delivered_fraction >= cfg.pour_fraction_required &&
             result.spilled_fraction <= 1.0 - cfg.pour_fraction_required;
    case Task::kShake: {
      std::vector<double> theta;
      theta.reserve(region_traj.samples.size());
      for (const TimedPose& s : region_traj.samples) theta.push_back(s.pose.theta);
      theta = unwrap_angles(theta);
      const auto [mn, mx] = std::minmax_element(theta.begin(), theta.end());
      return (*mx - *mn) >= cfg.shake_min_amplitude && result.spilled_fraction <= 1e-9;
    }
    case Task::kHandover: {
      const Pose2& final_pose = region_traj.samples.back().pose;
      if (d_h(final_pose, scene.target_region.center) > cfg.handover_zone_tolerance) {
        return false;
      }
      // Tilt must stay below the spill threshold throughout. The object tilt
      // equals the action-region tilt up to the fixed region offset angle.
      const Pose2 attach_theta_offset = scene.object.action_region(task).center;
      for (std::size_t i = 0; i < region_traj.samples.size(); ++i) {
        const double object_theta =
            region_traj.samples[i].pose.theta - attach_theta_offset.theta;
        Pose2 object_pose(0.0, 0.0, object_theta);
        if (opening_tilt(scene.object, object_pose) >= cfg.spill_tilt_threshold) return false;
      }
      return true;
    }
  }
  throw ValidationError("unknown task label");
}

}  // namespace sagat
