#include "sagat/perception.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sagat/errors.hpp"
#include "sagat/random.hpp"

namespace sagat {

void PerceptionConfig::validate() const {
  if (noise_sigma_pos < 0.0 || noise_sigma_theta < 0.0) {
    throw ValidationError("perception noise sigmas must be >= 0");
  }
  if (proposals_per_object < 3) {
    throw ValidationError("proposals_per_object must be >= 3");
  }
}

Region detect_grasp_affordance_region(const ObjectModel& object, Task task,
                                      const PerceptionConfig& cfg) {
  cfg.validate();
  if (!object.affords(task)) {
    throw NotAffordedError("object '" + object.id + "' does not afford task '" +
                           to_string(task) + "'");
  }
  Rng rng(mix_seed(cfg.rng_seed, 0x6772617370ULL));
  Region r = object.grasp_region;
  r.center = Pose2(r.center.x + rng.gaussian(0.0, cfg.noise_sigma_pos),
                   r.center.z + rng.gaussian(0.0, cfg.noise_sigma_pos),
                   r.center.theta + rng.gaussian(0.0, cfg.noise_sigma_theta));
  return r;
}

namespace {

struct BoundaryPiece {
  double x, z;      // midpoint, object frame
  double theta;     // outward normal angle
  double support;   // piece length, meters
};

// Clip segment a-b against the oriented region box; returns parameter range
// [t0, t1] of the retained portion, or false when disjoint.
bool clip_to_region(const Region& region, const std::array<double, 2>& a,
                    const std::array<double, 2>& b, double& t0, double& t1) {
  const Pose2 inv = invert(region.center);
  const Pose2 pa = compose(inv, Pose2(a[0], a[1], 0.0));
  const Pose2 pb = compose(inv, Pose2(b[0], b[1], 0.0));
  t0 = 0.0;
  t1 = 1.0;
  const double p[4] = {-(pb.x - pa.x), pb.x - pa.x, -(pb.z - pa.z), pb.z - pa.z};
  const double q[4] = {pa.x + region.half_extents[0], region.half_extents[0] - pa.x,
                       pa.z + region.half_extents[1], region.half_extents[1] - pa.z};
  for (int i = 0; i < 4; ++i) {
    if (std::abs(p[i]) < 1e-15) {
      if (q[i] < 0.0) return false;
      continue;
    }
    const double r = q[i] / p[i];
    if (p[i] < 0.0) {
      t0 = std::max(t0, r);
    } else {
      t1 = std::min(t1, r);
    }
  }
  return t0 <= t1;
}

bool point_in_polygon(const Polygon& poly, double x, double z) {
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const auto& a = poly[i];
    const auto& b = poly[(i + 1) % n];
    const double cross = (b[0] - a[0]) * (z - a[1]) - (b[1] - a[1]) * (x - a[0]);
    if (cross < 0.0) return false;
  }
  return true;
}

}  // namespace

std::vector<GraspCandidate> propose_grasp_candidates(const ObjectModel& object,
                                                     const Region& region,
                                                     const PerceptionConfig& cfg) {
  cfg.validate();
  Rng rng(mix_seed(cfg.rng_seed, 0x70726f70ULL));

  // Detection noise can push the region edge just inside a flush object
  // wall; clip with a matching capture margin and project the resulting
  // candidates back into the region.
  Region capture = region;
  const double margin = 3.0 * cfg.noise_sigma_pos;
  capture.half_extents = {region.half_extents[0] + margin, region.half_extents[1] + margin};

  std::vector<BoundaryPiece> pieces;
  for (std::size_t part_index = 0; part_index < object.parts.size(); ++part_index) {
    const Polygon& part = object.parts[part_index];
    const std::size_t n = part.size();
    for (std::size_t i = 0; i < n; ++i) {
      const auto& a = part[i];
      const auto& b = part[(i + 1) % n];
      double t0, t1;
      if (!clip_to_region(capture, a, b, t0, t1)) continue;
      const double ex = b[0] - a[0];
      const double ez = b[1] - a[1];
      const double edge_len = std::hypot(ex, ez);
      const double seg_len = (t1 - t0) * edge_len;
      if (seg_len < 1e-6) continue;
      // CCW polygon: outward normal of edge (ex, ez) is (ez, -ex).
      const double nx = ez / edge_len;
      const double nz = -ex / edge_len;
      const double theta = std::atan2(nz, nx);

      // Edges buried inside another part (e.g. the wall a handle attaches
      // to) offer no free boundary to grasp.
      {
        const double mx = a[0] + 0.5 * (t0 + t1) * ex + 1e-5 * nx;
        const double mz = a[1] + 0.5 * (t0 + t1) * ez + 1e-5 * nz;
        bool interior = false;
        for (std::size_t j = 0; j < object.parts.size(); ++j) {
          if (j == part_index) continue;
          if (point_in_polygon(object.parts[j], mx, mz)) {
            interior = true;
            break;
          }
        }
        if (interior) continue;
      }

      auto emit = [&](double u0, double u1) {
        const double um = 0.5 * (u0 + u1);
        BoundaryPiece piece;
        piece.x = a[0] + um * ex;
        piece.z = a[1] + um * ez;
        piece.theta = theta;
        piece.support = (u1 - u0) * edge_len;
        pieces.push_back(piece);
      };

      if (seg_len <= kMaxAperture) {
        emit(t0, t1);
      } else {
        // Random phase so the cut points (and thus support widths) vary
        // with the seed, like a sampling-based proposal stage would.
        const double phase = 1e-3 + rng.uniform() * (kMaxAperture - 1e-3);
        double offset = 0.0;
        while (offset < seg_len - 1e-12) {
          const double next = std::min(seg_len, offset + (offset == 0.0 ? phase : kMaxAperture));
          if (next - offset > 1e-4) {
            emit(t0 + (offset / seg_len) * (t1 - t0), t0 + (next / seg_len) * (t1 - t0));
          }
          offset = next;
        }
      }
    }
  }

  // Score by support width; ties ordered by a seeded shuffle so that equally
  // supported grasps do not always win by construction order.
  std::vector<std::size_t> perm(pieces.size());
  std::iota(perm.begin(), perm.end(), 0);
  for (std::size_t i = perm.size(); i > 1; --i) {
    std::swap(perm[i - 1], perm[rng.next_u64() % i]);
  }
  std::vector<std::size_t> tie_rank(pieces.size());
  for (std::size_t i = 0; i < perm.size(); ++i) tie_rank[perm[i]] = i;

  std::vector<std::size_t> order(pieces.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t lhs, std::size_t rhs) {
    const double sl = std::min(pieces[lhs].support, kMaxAperture);
    const double sr = std::min(pieces[rhs].support, kMaxAperture);
    if (sl != sr) return sl > sr;
    return tie_rank[lhs] < tie_rank[rhs];
  });

  std::vector<GraspCandidate> out;
  const std::size_t count = std::min<std::size_t>(order.size(), cfg.proposals_per_object);
  for (std::size_t i = 0; i < count; ++i) {
    const BoundaryPiece& p = pieces[order[i]];
    Pose2 local = compose(invert(region.center), Pose2(p.x, p.z, 0.0));
    local.x = std::clamp(local.x, -region.half_extents[0], region.half_extents[0]);
    local.z = std::clamp(local.z, -region.half_extents[1], region.half_extents[1]);
    const Pose2 projected = compose(region.center, local);
    GraspCandidate cand;
    cand.pose_on_object = Pose2(projected.x, projected.z, p.theta);
    cand.score = std::min(p.support, kMaxAperture) / kMaxAperture;
    cand.index = static_cast<int>(i);
    out.push_back(cand);
  }
  return out;
}

Region segment_action_region(const ObjectModel& object, Task task) {
  return object.action_region(task);
}

}  // namespace sagat
