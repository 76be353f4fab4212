#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace sagat {

inline constexpr double kPi = 3.14159265358979323846;

// Normalize an angle into (-pi, pi].
double wrap_angle(double theta);

// Planar rigid pose in the vertical x-z plane. x is horizontal, z is up,
// theta is the rotation about the out-of-plane axis, always kept in (-pi, pi].
struct Pose2 {
  double x = 0.0;
  double z = 0.0;
  double theta = 0.0;

  Pose2() = default;
  Pose2(double x_, double z_, double theta_) : x(x_), z(z_), theta(wrap_angle(theta_)) {}

  static Pose2 identity() { return {}; }
};

// Rigid composition a*b (b expressed in a's frame).
Pose2 compose(const Pose2& a, const Pose2& b);
Pose2 invert(const Pose2& p);

// Rotate a free vector by angle theta.
std::array<double, 2> rotate_vec(const std::array<double, 2>& v, double theta);

// Positional Euclidean distance over (x, z); orientation is ignored.
double d_h(const Pose2& a, const Pose2& b);

enum class Task { kPour, kShake, kHandover };

const std::vector<Task>& all_tasks();
std::string to_string(Task task);
Task task_from_string(const std::string& label);  // throws ValidationError

enum class RegionKind { kGraspAffordance, kAction };

std::string to_string(RegionKind kind);
RegionKind region_kind_from_string(const std::string& label);

// Oriented rectangular region: center pose plus half extents along the
// region's own axes.
struct Region {
  Pose2 center;
  std::array<double, 2> half_extents{0.0, 0.0};
  RegionKind label = RegionKind::kAction;

  bool contains(double x, double z) const;
  double diagonal() const;  // full diagonal length
};

// Convex polygon, CCW vertex order, coordinates in the owning object's frame.
using Polygon = std::vector<std::array<double, 2>>;

struct ObjectModel {
  std::string id;
  std::vector<Polygon> parts;
  Region grasp_region;
  std::map<Task, Region> action_regions;
  double content_capacity = 1.0;          // initial fill level in [0, 1]
  std::array<double, 2> opening_direction{0.0, 1.0};  // unit, object frame

  bool affords(Task task) const { return action_regions.count(task) > 0; }
  const Region& action_region(Task task) const;  // throws NotAffordedError
  void validate() const;                         // throws ValidationError
};

struct Scene {
  ObjectModel object;
  Pose2 object_pose;
  Region target_region;  // world frame; pour target / handover zone
  std::uint64_t rng_seed = 0;
};

struct GraspCandidate {
  Pose2 pose_on_object;  // g_p, object frame
  double score = 0.0;    // proposal quality in [0, 1]
  int index = 0;         // ordinal within a proposal batch
};

// Deterministic parametric object set used by demos and experiments.
std::vector<ObjectModel> builtin_objects();
ObjectModel builtin_object(const std::string& id);  // throws ValidationError

inline const std::string kTrainingObjectId = "training_mug";

// JSON round-trip for object models. Field names follow the type definitions;
// lengths in meters, angles in radians.
std::string object_to_json(const ObjectModel& object);
ObjectModel object_from_json(const std::string& json_text);

}  // namespace sagat
