#include "sagat/world.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <nlohmann/json.hpp>

#include "sagat/errors.hpp"

namespace sagat {

double wrap_angle(double theta) {
  double w = std::fmod(theta + kPi, 2.0 * kPi);
  if (w <= 0.0) w += 2.0 * kPi;
  return w - kPi;
}

Pose2 compose(const Pose2& a, const Pose2& b) {
  const double c = std::cos(a.theta);
  const double s = std::sin(a.theta);
  return Pose2(a.x + c * b.x - s * b.z, a.z + s * b.x + c * b.z, a.theta + b.theta);
}

Pose2 invert(const Pose2& p) {
  const double c = std::cos(p.theta);
  const double s = std::sin(p.theta);
  return Pose2(-(c * p.x + s * p.z), -(-s * p.x + c * p.z), -p.theta);
}

std::array<double, 2> rotate_vec(const std::array<double, 2>& v, double theta) {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  return {c * v[0] - s * v[1], s * v[0] + c * v[1]};
}

double d_h(const Pose2& a, const Pose2& b) {
  return std::hypot(a.x - b.x, a.z - b.z);
}

const std::vector<Task>& all_tasks() {
  static const std::vector<Task> tasks{Task::kPour, Task::kShake, Task::kHandover};
  return tasks;
}

std::string to_string(Task task) {
  switch (task) {
    case Task::kPour: return "pour";
    case Task::kShake: return "shake";
    case Task::kHandover: return "handover";
  }
  throw ValidationError("unknown task label");
}

Task task_from_string(const std::string& label) {
  if (label == "pour") return Task::kPour;
  if (label == "shake") return Task::kShake;
  if (label == "handover") return Task::kHandover;
  throw ValidationError("unknown task label: " + label);
}

std::string to_string(RegionKind kind) {
  return kind == RegionKind::kGraspAffordance ? "grasp-affordance" : "action";
}

RegionKind region_kind_from_string(const std::string& label) {
  if (label == "grasp-affordance") return RegionKind::kGraspAffordance;
  if (label == "action") return RegionKind::kAction;
  throw ValidationError("unknown region kind: " + label);
}

bool Region::contains(double x, double z) const {
  const Pose2 local = compose(invert(center), Pose2(x, z, 0.0));
  const double eps = 1e-12;
  return std::abs(local.x) <= half_extents[0] + eps && std::abs(local.z) <= half_extents[1] + eps;
}

double Region::diagonal() const {
  return std::hypot(2.0 * half_extents[0], 2.0 * half_extents[1]);
}

const Region& ObjectModel::action_region(Task task) const {
  auto it = action_regions.find(task);
  if (it == action_regions.end()) {
    throw NotAffordedError("object '" + id + "' does not afford task '" + to_string(task) + "'");
  }
  return it->second;
}

namespace {

struct Bbox {
  double min_x = std::numeric_limits<double>::max();
  double min_z = std::numeric_limits<double>::max();
  double max_x = std::numeric_limits<double>::lowest();
  double max_z = std::numeric_limits<double>::lowest();

  void extend(double x, double z) {
    min_x = std::min(min_x, x);
    min_z = std::min(min_z, z);
    max_x = std::max(max_x, x);
    max_z = std::max(max_z, z);
  }
  bool contains(double x, double z, double eps) const {
    return x >= min_x - eps && x <= max_x + eps && z >= min_z - eps && z <= max_z + eps;
  }
};

std::vector<std::array<double, 2>> region_probe_points(const Region& r) {
  // Corners, edge midpoints and center of the oriented box.
  std::vector<std::array<double, 2>> pts;
  const double hx = r.half_extents[0];
  const double hz = r.half_extents[1];
  for (double u : {-1.0, 0.0, 1.0}) {
    for (double v : {-1.0, 0.0, 1.0}) {
      Pose2 p = compose(r.center, Pose2(u * hx, v * hz, 0.0));
      pts.push_back({p.x, p.z});
    }
  }
  return pts;
}

bool polygon_convex_ccw(const Polygon& poly) {
  const std::size_t n = poly.size();
  if (n < 3) return false;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& a = poly[i];
    const auto& b = poly[(i + 1) % n];
    const auto& c = poly[(i + 2) % n];
    const double cross = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]);
    if (cross < -1e-12) return false;
  }
  return true;
}

}  // namespace

void ObjectModel::validate() const {
  if (id.empty()) throw ValidationError("object id must be non-empty");
  if (parts.empty()) throw ValidationError("object '" + id + "' has no parts");
  for (const Polygon& part : parts) {
    if (!polygon_convex_ccw(part)) {
      throw ValidationError("object '" + id + "' has a non-convex or misordered part");
    }
  }
  if (content_capacity < 0.0 || content_capacity > 1.0) {
    throw ValidationError("object '" + id + "' content_capacity outside [0, 1]");
  }
  const double norm = std::hypot(opening_direction[0], opening_direction[1]);
  if (std::abs(norm - 1.0) > 1e-9) {
    throw ValidationError("object '" + id + "' opening_direction is not unit length");
  }

  std::vector<Bbox> boxes;
  for (const Polygon& part : parts) {
    Bbox b;
    for (const auto& v : part) b.extend(v[0], v[1]);
    boxes.push_back(b);
  }
  auto check_region = [&](const Region& r, const std::string& name) {
    if (r.half_extents[0] <= 0.0 || r.half_extents[1] <= 0.0) {
      throw ValidationError("object '" + id + "' region '" + name + "' has non-positive extents");
    }
    for (const auto& p : region_probe_points(r)) {
      bool inside = false;
      for (const Bbox& b : boxes) {
        if (b.contains(p[0], p[1], 1e-9)) {
          inside = true;
          break;
        }
      }
      if (!inside) {
        throw ValidationError("object '" + id + "' region '" + name +
                              "' extends outside the part bounding boxes");
      }
    }
  };
  check_region(grasp_region, "grasp");
  for (const auto& [task, region] : action_regions) check_region(region, to_string(task));
}

namespace {

Polygon rect(double x0, double z0, double x1, double z1) {
  return {{x0, z0}, {x1, z0}, {x1, z1}, {x0, z1}};
}

Region make_region(double cx, double cz, double hx, double hz, RegionKind kind) {
  Region r;
  r.center = Pose2(cx, cz, 0.0);
  r.half_extents = {hx, hz};
  r.label = kind;
  return r;
}

ObjectModel make_training_mug() {
  ObjectModel o;
  o.id = kTrainingObjectId;
  o.parts.push_back(rect(-0.045, 0.0, 0.045, 0.10));   // body
  o.parts.push_back(rect(0.045, 0.03, 0.075, 0.07));   // handle slab
  o.grasp_region = make_region(0.015, 0.05, 0.06, 0.02, RegionKind::kGraspAffordance);
  o.action_regions[Task::kPour] = make_region(0.0, 0.095, 0.035, 0.005, RegionKind::kAction);
  o.action_regions[Task::kShake] = make_region(0.0, 0.05, 0.035, 0.03, RegionKind::kAction);
  o.action_regions[Task::kHandover] = make_region(0.0, 0.02, 0.035, 0.02, RegionKind::kAction);
  o.content_capacity = 1.0;
  return o;
}

ObjectModel make_travel_mug() {
  ObjectModel o;
  o.id = "travel_mug";
  o.parts.push_back(rect(-0.035, 0.0, 0.035, 0.16));
  o.grasp_region = make_region(0.0, 0.08, 0.035, 0.05, RegionKind::kGraspAffordance);
  o.action_regions[Task::kPour] = make_region(0.0, 0.155, 0.025, 0.005, RegionKind::kAction);
  o.action_regions[Task::kShake] = make_region(0.0, 0.08, 0.025, 0.04, RegionKind::kAction);
  o.action_regions[Task::kHandover] = make_region(0.0, 0.03, 0.025, 0.03, RegionKind::kAction);
  o.content_capacity = 1.0;
  return o;
}

ObjectModel make_measuring_spoon() {
  ObjectModel o;
  o.id = "measuring_spoon";
  // Bowl cup at the left end, handle bar to the right.
  o.parts.push_back(Polygon{{-0.05, 0.0},
                            {-0.01, 0.0},
                            {-0.01, 0.04},
                            {-0.05, 0.04}});
  o.parts.push_back(rect(-0.01, 0.015, 0.08, 0.03));
  o.grasp_region = make_region(0.035, 0.0225, 0.045, 0.0075, RegionKind::kGraspAffordance);
  o.action_regions[Task::kPour] = make_region(-0.03, 0.0375, 0.015, 0.0025, RegionKind::kAction);
  o.action_regions[Task::kShake] = make_region(-0.03, 0.02, 0.015, 0.015, RegionKind::kAction);
  o.action_regions[Task::kHandover] = make_region(0.035, 0.0225, 0.025, 0.0075, RegionKind::kAction);
  o.content_capacity = 0.8;
  return o;
}

ObjectModel make_glass() {
  ObjectModel o;
  o.id = "glass";
  // Slightly tapered tumbler silhouette.
  o.parts.push_back(Polygon{{-0.025, 0.0},
                            {0.025, 0.0},
                            {0.028, 0.04},
                            {0.03, 0.08},
                            {0.03, 0.12},
                            {-0.03, 0.12},
                            {-0.03, 0.08},
                            {-0.028, 0.04}});
  o.grasp_region = make_region(0.0, 0.06, 0.03, 0.045, RegionKind::kGraspAffordance);
  o.action_regions[Task::kPour] = make_region(0.0, 0.115, 0.02, 0.005, RegionKind::kAction);
  o.action_regions[Task::kShake] = make_region(0.0, 0.06, 0.02, 0.04, RegionKind::kAction);
  o.action_regions[Task::kHandover] = make_region(0.0, 0.025, 0.02, 0.025, RegionKind::kAction);
  o.content_capacity = 1.0;
  return o;
}

ObjectModel make_bowl() {
  ObjectModel o;
  o.id = "bowl";
  o.parts.push_back(Polygon{{-0.02, 0.0},
                            {0.02, 0.0},
                            {0.05, 0.005},
                            {0.07, 0.02},
                            {0.08, 0.05},
                            {-0.08, 0.05},
                            {-0.07, 0.02},
                            {-0.05, 0.005}});
  o.grasp_region = make_region(0.0, 0.035, 0.08, 0.015, RegionKind::kGraspAffordance);
  o.action_regions[Task::kPour] = make_region(0.0, 0.0475, 0.06, 0.0025, RegionKind::kAction);
  o.action_regions[Task::kShake] = make_region(0.0, 0.03, 0.06, 0.015, RegionKind::kAction);
  o.action_regions[Task::kHandover] = make_region(0.0, 0.025, 0.06, 0.01, RegionKind::kAction);
  o.content_capacity = 1.0;
  return o;
}

ObjectModel make_dish() {
  ObjectModel o;
  o.id = "dish";
  // Ashtray-like shallow dish.
  o.parts.push_back(Polygon{{-0.03, 0.0},
                            {0.03, 0.0},
                            {0.045, 0.005},
                            {0.055, 0.012},
                            {0.06, 0.025},
                            {-0.06, 0.025},
                            {-0.055, 0.012},
                            {-0.045, 0.005}});
  o.grasp_region = make_region(0.0, 0.015, 0.06, 0.01, RegionKind::kGraspAffordance);
  o.action_regions[Task::kPour] = make_region(0.0, 0.0225, 0.045, 0.0025, RegionKind::kAction);
  o.action_regions[Task::kShake] = make_region(0.0, 0.0125, 0.045, 0.01, RegionKind::kAction);
  o.action_regions[Task::kHandover] = make_region(0.0, 0.0125, 0.045, 0.0075, RegionKind::kAction);
  o.content_capacity = 0.7;
  return o;
}

}  // namespace

std::vector<ObjectModel> builtin_objects() {
  std::vector<ObjectModel> objects{make_training_mug(), make_travel_mug(),
                                   make_measuring_spoon(), make_glass(),
                                   make_bowl(), make_dish()};
  for (const ObjectModel& o : objects) o.validate();
  return objects;
}

ObjectModel builtin_object(const std::string& id) {
  for (ObjectModel& o : builtin_objects()) {
    if (o.id == id) return o;
  }
  throw ValidationError("unknown builtin object: " + id);
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

}  // namespace

std::string object_to_json(const ObjectModel& object) {
  json j;
  j["id"] = object.id;
  j["parts"] = object.parts;
  j["grasp_region"] = region_to_json(object.grasp_region);
  json regions = json::object();
  for (const auto& [task, region] : object.action_regions) {
    regions[to_string(task)] = region_to_json(region);
  }
  j["action_regions"] = regions;
  j["content_capacity"] = object.content_capacity;
  j["opening_direction"] = object.opening_direction;
  return j.dump(2);
}

ObjectModel object_from_json(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("invalid object JSON: ") + e.what());
  }
  ObjectModel o;
  try {
    o.id = j.at("id").get<std::string>();
    o.parts = j.at("parts").get<std::vector<Polygon>>();
    o.grasp_region = region_from_json(j.at("grasp_region"));
    for (const auto& [label, region] : j.at("action_regions").items()) {
      o.action_regions[task_from_string(label)] = region_from_json(region);
    }
    o.content_capacity = j.at("content_capacity").get<double>();
    o.opening_direction = j.at("opening_direction").get<std::array<double, 2>>();
  } catch (const json::exception& e) {
    throw ValidationError(std::string("invalid object JSON: ") + e.what());
  }
  o.validate();
  return o;
}

}  // namespace sagat
