#pragma once

#include <cstdint>
#include <vector>

#include "sagat/world.hpp"

namespace sagat {

// Knobs for the oracle detectors standing in for the pretrained CNNs.
struct PerceptionConfig {
  double noise_sigma_pos = 0.0;    // meters, detection noise on region centers
  double noise_sigma_theta = 0.0;  // radians
  int proposals_per_object = 8;    // >= 3
  std::uint64_t rng_seed = 0;

  void validate() const;  // throws ValidationError
};

// Maximum gripper aperture; wider grasps are never proposed.
inline constexpr double kMaxAperture = 0.08;

// Annotated grasp affordance region with zero-mean Gaussian perturbation on
// its center. Deterministic given cfg.rng_seed.
Region detect_grasp_affordance_region(const ObjectModel& object, Task task,
                                      const PerceptionConfig& cfg);

// Grasp candidates sampled on part boundaries inside the region, scored by
// normalized boundary-support width under the aperture limit, sorted by
// score descending (seeded shuffle breaks exact ties), indices assigned in
// that order. Returns an empty list when no boundary intersects the region.
std::vector<GraspCandidate> propose_grasp_candidates(const ObjectModel& object,
                                                     const Region& region,
                                                     const PerceptionConfig& cfg);

// Exact annotated action region for the task; throws NotAffordedError.
Region segment_action_region(const ObjectModel& object, Task task);

}  // namespace sagat
