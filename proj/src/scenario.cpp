#include "sagat/scenario.hpp"

#include <cmath>
#include <functional>

#include "sagat/errors.hpp"
#include "sagat/random.hpp"

namespace sagat {

Scene default_scene(const ObjectModel& object, std::uint64_t rng_seed) {
  Scene scene;
  scene.object = object;
  scene.object_pose = Pose2::identity();
  scene.target_region.center = Pose2(0.28, 0.13, 0.0);
  scene.target_region.half_extents = {0.06, 0.08};
  scene.target_region.label = RegionKind::kAction;
  scene.rng_seed = rng_seed;
  return scene;
}

GraspCandidate mug_handle_grasp() {
  GraspCandidate g;
  g.pose_on_object = Pose2(0.075, 0.05, 0.0);
  g.score = 0.5;
  g.index = 0;
  return g;
}

GraspCandidate mug_rim_grasp() {
  GraspCandidate g;
  g.pose_on_object = Pose2(0.0, 0.10, kPi / 2.0);
  g.score = 0.5;
  g.index = 1;
  return g;
}

namespace {

constexpr double kDemoDt = 0.01;
constexpr double kPourTilt = -1.9;

double min_jerk(double u) {
  u = std::clamp(u, 0.0, 1.0);
  return u * u * u * (10.0 + u * (-15.0 + 6.0 * u));
}

struct Triple {
  double x = 0.0, z = 0.0, theta = 0.0;
};

// Sample a scripted pose path at uniform dt, landing exactly on `duration`.
Trajectory sample_script(double duration, const std::function<Triple(double)>& at) {
  const long steps = std::max<long>(10, std::lround(duration / kDemoDt));
  const double dt = duration / static_cast<double>(steps);
  Trajectory traj;
  traj.dt = dt;
  traj.samples.reserve(steps + 1);
  for (long k = 0; k <= steps; ++k) {
    const double t = static_cast<double>(k) * dt;
    const Triple p = at(t);
    traj.samples.push_back({t, Pose2(p.x, p.z, p.theta)});
  }
  return traj;
}

// Offset of a frame rigidly carried by the end effector.
Pose2 carried_offset(const GraspCandidate& grasp, const Pose2& frame_on_object) {
  return compose(invert(grasp.pose_on_object), frame_on_object);
}

Trajectory ee_from_frame_script(const Trajectory& frame_traj, const Pose2& offset) {
  const Pose2 inv_offset = invert(offset);
  Trajectory ee;
  ee.dt = frame_traj.dt;
  ee.samples.reserve(frame_traj.samples.size());
  for (const TimedPose& s : frame_traj.samples) {
    ee.samples.push_back({s.t, compose(s.pose, inv_offset)});
  }
  return ee;
}

struct DemoShape {
  double time_scale = 1.0;
  double dx = 0.0;  // endpoint offset
  double dz = 0.0;
  double amp = 0.0;  // shake amplitude tweak
};

Trajectory scripted_pour(const Scene& scene, const GraspCandidate& grasp,
                         const DemoShape& shape) {
  const Region& rim = scene.object.action_region(Task::kPour);
  const Pose2 rim0 = compose(scene.object_pose, rim.center);
  const double hx = scene.target_region.center.x + shape.dx;
  const double hz = scene.target_region.center.z + 0.04 + shape.dz;
  const double t1 = 1.2 * shape.time_scale;  // reach the hover point
  const double t2 = 1.2 * shape.time_scale;  // tilt about the rim
  const double t3 = 0.6 * shape.time_scale;  // hold

  auto rim_at = [&](double t) {
    Triple p{rim0.x, rim0.z, rim0.theta};
    if (t <= t1) {
      const double u = min_jerk(t / t1);
      p.x += u * (hx - rim0.x);
      p.z += u * (hz - rim0.z);
    } else {
      p.x = hx;
      p.z = hz;
      if (t <= t1 + t2) {
        p.theta += min_jerk((t - t1) / t2) * kPourTilt;
      } else {
        p.theta += kPourTilt;
      }
    }
    return p;
  };
  const Trajectory rim_traj = sample_script(t1 + t2 + t3, rim_at);
  return ee_from_frame_script(rim_traj, carried_offset(grasp, rim.center));
}

Trajectory scripted_shake(const Scene& scene, const GraspCandidate& grasp,
                          const DemoShape& shape) {
  const Pose2 ee0 = compose(scene.object_pose, grasp.pose_on_object);
  const double lift = 0.06 + shape.dz;
  const double amplitude = 0.30 + shape.amp;
  const double cycles = 2.0;
  // Settling at a small tilt keeps the theta span non-degenerate, so the
  // oscillation survives the imitation fit.
  const double settle_theta = 0.30;
  const double t1 = 0.8 * shape.time_scale;
  const double t2 = 1.6 * shape.time_scale;
  const double t3 = 0.6 * shape.time_scale;

  auto ee_at = [&](double t) {
    Triple p{ee0.x, ee0.z, ee0.theta};
    if (t <= t1) {
      p.z += min_jerk(t / t1) * lift;
    } else {
      p.z += lift;
      if (t <= t1 + t2) {
        const double u = (t - t1) / t2;
        const double envelope = std::sin(kPi * u);
        p.theta += amplitude * std::sin(2.0 * kPi * cycles * u) * envelope * envelope;
      } else {
        p.theta += min_jerk((t - t1 - t2) / t3) * settle_theta;
      }
    }
    return p;
  };
  return sample_script(t1 + t2 + t3, ee_at);
}

Trajectory scripted_handover(const Scene& scene, const GraspCandidate& grasp,
                             const DemoShape& shape) {
  const Region& zone = scene.object.action_region(Task::kHandover);
  const Pose2 region0 = compose(scene.object_pose, zone.center);
  const double gx = scene.target_region.center.x + shape.dx;
  const double gz = scene.target_region.center.z + shape.dz;
  const double t1 = 0.7 * shape.time_scale;
  const double t2 = 1.3 * shape.time_scale;
  const double t3 = 0.5 * shape.time_scale;

  auto region_at = [&](double t) {
    Triple p{region0.x, region0.z, region0.theta};
    if (t <= t1) {
      p.z += min_jerk(t / t1) * 0.05;
    } else if (t <= t1 + t2) {
      const double u = min_jerk((t - t1) / t2);
      p.x = region0.x + u * (gx - region0.x);
      p.z = region0.z + 0.05 + u * (gz - region0.z - 0.05);
    } else {
      p.x = gx;
      p.z = gz;
    }
    return p;
  };
  const Trajectory region_traj = sample_script(t1 + t2 + t3, region_at);
  return ee_from_frame_script(region_traj, carried_offset(grasp, zone.center));
}

GraspCandidate handle_grasp_variant(double z, int index) {
  GraspCandidate g;
  g.pose_on_object = Pose2(0.075, z, 0.0);
  g.score = 0.5;
  g.index = index;
  return g;
}

// Right body wall, below or above the handle span.
GraspCandidate body_grasp_variant(double z, int index) {
  GraspCandidate g;
  g.pose_on_object = Pose2(0.045, z, 0.0);
  g.score = 0.5;
  g.index = index;
  return g;
}

// Grasps whose policy replications provoke spills or wrong placement.
GraspCandidate adverse_grasp(int which, int index) {
  GraspCandidate g;
  switch (which % 3) {
    case 0: g.pose_on_object = Pose2(0.0, 0.0, -kPi / 2.0); break;       // base
    case 1: g.pose_on_object = Pose2(-0.045, 0.05, kPi); break;          // far wall
    default: g.pose_on_object = Pose2(0.06, 0.03, -kPi / 2.0); break;    // handle underside
  }
  g.score = 0.4;
  g.index = index;
  return g;
}

}  // namespace

std::vector<DemoBundle> gen_demos(Task task, int count, DemoMix mix, std::uint64_t seed,
                                  const SimConfig& cfg) {
  if (count < 2) throw ValidationError("demo count must be >= 2");
  if (mix.successful < 1 || mix.undesired < 1 || mix.successful + mix.undesired != count) {
    throw ValidationError("demo mix needs >= 1 of each label and must sum to count");
  }

  const ObjectModel mug = builtin_object(kTrainingObjectId);
  const Scene scene = default_scene(mug, seed);

  // The first bundle is the kinaesthetic reference motion; the remaining
  // ones replicate the policy learnt from it across grasp candidates, with
  // mildly perturbed goals and durations for the successful variants.
  std::vector<DemoBundle> bundles;
  bundles.reserve(count);

  DemoBundle reference;
  reference.task = task;
  reference.scene = scene;
  reference.grasp = handle_grasp_variant(0.05, 0);
  switch (task) {
    case Task::kPour:
      reference.ee_traj = scripted_pour(scene, reference.grasp, DemoShape{});
      break;
    case Task::kShake:
      reference.ee_traj = scripted_shake(scene, reference.grasp, DemoShape{});
      break;
    case Task::kHandover:
      reference.ee_traj = scripted_handover(scene, reference.grasp, DemoShape{});
      break;
  }
  reference.label = DemoLabel::kSuccessful;
  bundles.push_back(reference);

  const DmpPolicy policy = fit_dmp(reference.ee_traj);
  const Pose2 goal_ref(policy.dims[0].goal_ref, policy.dims[1].goal_ref,
                       policy.dims[2].goal_ref);
  const double tau = policy.tau_ref();

  for (int i = 1; i < count; ++i) {
    DemoBundle bundle;
    bundle.task = task;
    bundle.scene = scene;

    Pose2 goal = goal_ref;
    double duration = tau;
    if (i < mix.successful) {
      Rng rng(mix_seed(seed, 1000 + static_cast<std::uint64_t>(i)));
      // Candidates spread across the grasp affordance region: handle and
      // body-wall grasps both afford the tasks.
      const double jitter = 0.03 * (rng.uniform() - 0.5);
      bundle.grasp = (i % 2 == 1) ? handle_grasp_variant(0.05 + jitter, i)
                                  : body_grasp_variant(0.05 + jitter, i);
      // Pour targets vary more between repetitions than in-place tasks do.
      const double spread = (task == Task::kPour) ? 0.08 : 0.03;
      goal = Pose2(goal_ref.x + spread * (rng.uniform() - 0.5),
                   goal_ref.z + 0.03 * (rng.uniform() - 0.5), goal_ref.theta);
      duration = tau * (1.0 + 0.2 * (rng.uniform() - 0.5));
      bundle.label = DemoLabel::kSuccessful;
    } else {
      bundle.grasp = adverse_grasp(i - mix.successful, i);
      bundle.label = DemoLabel::kUndesired;
    }

    const Pose2 start = compose(scene.object_pose, bundle.grasp.pose_on_object);
    bundle.ee_traj = rollout(policy, start, goal, duration, cfg.dt);
    bundles.push_back(std::move(bundle));
  }

  for (std::size_t i = 0; i < bundles.size(); ++i) {
    const DemoBundle& b = bundles[i];
    const RolloutResult result = simulate_along(b.ee_traj, b.grasp, scene, task, cfg);
    const bool success = ground_truth_success(result, task, scene, cfg);
    if (success != (b.label == DemoLabel::kSuccessful)) {
      throw ValidationError("scripted demo " + std::to_string(i) + " for task '" +
                            to_string(task) + "' does not match its intended label");
    }
  }
  return bundles;
}

double demo_mean_d_h(const std::vector<DemoBundle>& bundles, Task task) {
  double sum = 0.0;
  int n = 0;
  for (const DemoBundle& b : bundles) {
    if (b.task != task || b.label != DemoLabel::kSuccessful) continue;
    const Pose2 region = compose(b.scene.object_pose, b.scene.object.action_region(task).center);
    const Pose2 grasp = compose(b.scene.object_pose, b.grasp.pose_on_object);
    sum += d_h(region, grasp);
    n += 1;
  }
  if (n == 0) throw ValidationError("no successful demos to average");
  return sum / n;
}

double reference_demo_mean_d_h(Task task) {
  switch (task) {
    case Task::kPour: return 0.21;
    case Task::kShake: return 0.23;
    case Task::kHandover: return 0.20;
  }
  throw ValidationError("unknown task label");
}

}  // namespace sagat
