#pragma once

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

#include "sagat/world.hpp"

namespace sagat {

struct TimedPose {
  double t = 0.0;  // seconds, >= 0
  Pose2 pose;
};

// Uniformly sampled end-effector path.
struct Trajectory {
  std::vector<TimedPose> samples;
  double dt = 0.0;

  void validate() const;  // throws ValidationError
  double duration() const { return samples.empty() ? 0.0 : samples.back().t; }

  void to_csv(std::ostream& out) const;  // header `t,x,z,theta`
  static Trajectory from_csv(std::istream& in);
  void save_csv(const std::string& path) const;
  static Trajectory load_csv(const std::string& path);
};

struct DmpGains {
  double alpha_y = 25.0;
  double beta_y = 6.25;  // alpha_y / 4, critical damping
  double alpha_s = 8.0;
};

// One transformation system. Degenerate dimensions (no net displacement in
// the demo) keep zero weights and run as a pure goal attractor.
struct DmpDimension {
  int basis_count = 25;
  std::vector<double> weights;
  double start_ref = 0.0;
  double goal_ref = 0.0;
  DmpGains gains;
  double tau_ref = 1.0;
  bool degenerate = false;
};

// Task policy: one DMP per dimension (x, z, theta) sharing a canonical phase.
struct DmpPolicy {
  std::array<DmpDimension, 3> dims;

  double tau_ref() const { return dims[0].tau_ref; }
  void validate() const;  // throws ValidationError
};

inline constexpr int kDefaultBasisCount = 25;

// Imitation fit: locally weighted regression of the forcing term against
// Gaussian basis activations of the canonical phase. The theta dimension is
// unwrapped before fitting so demos crossing +-pi fit cleanly.
DmpPolicy fit_dmp(const Trajectory& demo, int basis_count = kDefaultBasisCount);

// Integrate the policy with generalized start, goal and duration (fixed-step
// RK4). dt must lie in (0, duration/10] and is rounded so an integer number
// of steps lands exactly on `duration`. The goal theta is taken on the
// shorter arc from the start; integration runs in unwrapped angle space and
// the output poses re-wrap.
Trajectory rollout(const DmpPolicy& policy, const Pose2& start, const Pose2& goal,
                   double duration, double dt);

// Unwrap a wrapped angle series into a continuous one.
std::vector<double> unwrap_angles(const std::vector<double>& wrapped);

}  // namespace sagat
