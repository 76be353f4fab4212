#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "sagat/affordance.hpp"
#include "sagat/simulate.hpp"
#include "sagat/world.hpp"

namespace sagat {

// Desk-scale scene shared by demonstrations and experiments: the object sits
// at the origin and a generous catch/handover zone sits to its right.
Scene default_scene(const ObjectModel& object, std::uint64_t rng_seed = 0);

// Canonical grasps on the training mug used by demonstrations and the
// pour-contrast scenario: one on the handle, one occluding the rim.
GraspCandidate mug_handle_grasp();
GraspCandidate mug_rim_grasp();

// One scripted kinaesthetic demonstration.
struct DemoBundle {
  Task task = Task::kPour;
  GraspCandidate grasp;
  Trajectory ee_traj;
  Scene scene;
  DemoLabel label = DemoLabel::kSuccessful;
};

struct DemoMix {
  int successful = 6;
  int undesired = 3;
};

// Deterministic scripted demonstrations on the training mug. Successful
// variants mildly perturb timing, grasp placement and endpoints; undesired
// variants replay the canonical motion from grasps that provoke spills or
// wrong placement. Labels are cross-checked against the physics oracle.
std::vector<DemoBundle> gen_demos(Task task, int count, DemoMix mix,
                                  std::uint64_t seed = 0,
                                  const SimConfig& cfg = SimConfig{});

// Mean positional distance between the action region and the grasp over the
// successful demonstrations (the d_hd reference line).
double demo_mean_d_h(const std::vector<DemoBundle>& bundles, Task task);

// Demonstration means reported in the reference experiments, printed by the
// harness next to the locally computed values.
double reference_demo_mean_d_h(Task task);

}  // namespace sagat
