#include "swarmlink/formation.hpp"

#include "swarmlink/format.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace swarmlink {

std::string_view priority_name(Priority p) { return p == Priority::Major ? "major" : "minor"; }

std::vector<AreaAssignment> assign_areas(std::span<const ObservationArea> areas, std::span<const UavState> uavs) {
  if (uavs.empty()) throw std::invalid_argument("area assignment needs at least one uav");

  std::vector<const UavState*> fleet;
  for (const auto& u : uavs) fleet.push_back(&u);
  std::sort(fleet.begin(), fleet.end(), [](const UavState* a, const UavState* b) { return a->id < b->id; });

  std::vector<const ObservationArea*> order;
  for (const auto& a : areas) order.push_back(&a);
  std::sort(order.begin(), order.end(), [](const ObservationArea* a, const ObservationArea* b) {
    if (a->priority != b->priority) return a->priority == Priority::Major;
    return a->id < b->id;
  });

  std::map<int, bool> busy;
  std::map<int, std::optional<int>> result;
  auto live = [&](int id) {
    return std::any_of(fleet.begin(), fleet.end(), [&](const UavState* u) { return u->id == id; });
  };
  for (const auto* area : order) {
    if (area->assigned_uav && live(*area->assigned_uav) && !busy[*area->assigned_uav]) {
      busy[*area->assigned_uav] = true;
      result[area->id] = area->assigned_uav;
    }
  }
  for (const auto* area : order) {
    if (result.count(area->id)) continue;
    const Vec2 center = area->rect.center();
    const UavState* best = nullptr;
    double best_d = std::numeric_limits<double>::infinity();
    for (const auto* u : fleet) {
      if (busy[u->id]) continue;
      const double d = (u->position - center).norm();
      if (d < best_d) {
        best_d = d;
        best = u;
      }
    }
    if (best) {
      busy[best->id] = true;
      result[area->id] = best->id;
    } else {
      result[area->id] = std::nullopt;
    }
  }

  std::vector<AreaAssignment> out;
  for (const auto* area : order) out.push_back({area->id, area->priority, result[area->id]});
  std::sort(out.begin(), out.end(), [](const AreaAssignment& a, const AreaAssignment& b) { return a.area_id < b.area_id; });
  return out;
}

std::string assignment_csv(std::span<const AreaAssignment> rows) {
  std::string out = "area_id,priority,uav_id\n";
  for (const auto& r : rows) {
    out += std::to_string(r.area_id) + "," + std::string(priority_name(r.priority)) + "," +
           (r.uav_id ? std::to_string(*r.uav_id) : std::string()) + "\n";
  }
  return out;
}

SeparationOutput separation_control(const UavState& self, std::span<const NeighborEstimate> neighbors,
                                    const SeparationPolicy& policy, SeparationLatch& latch, double speed) {
  using Mode = SeparationLatch::Mode;
  SeparationOutput out;
  Vec2 away = Vec2::Zero();
  Vec2 toward = Vec2::Zero();

  std::vector<const NeighborEstimate*> sorted;
  for (const auto& n : neighbors) sorted.push_back(&n);
  std::sort(sorted.begin(), sorted.end(),
            [](const NeighborEstimate* a, const NeighborEstimate* b) { return a->uav_id < b->uav_id; });

  for (const auto* n : sorted) {
    const double est = n->estimated_m;
    auto it = latch.engaged.find(n->uav_id);
    if (it != latch.engaged.end()) {
      const bool release = it->second == Mode::TooClose ? est >= policy.d_min + policy.hysteresis
                                                        : est <= policy.d_max - policy.hysteresis;
      if (release) latch.engaged.erase(it);
    }
    if (!latch.engaged.count(n->uav_id)) {
      if (est < policy.d_min - policy.hysteresis) {
        latch.engaged[n->uav_id] = Mode::TooClose;
      } else if (n->chain_neighbor && est > policy.d_max + policy.hysteresis) {
        latch.engaged[n->uav_id] = Mode::TooFar;
      }
    }
    it = latch.engaged.find(n->uav_id);
    if (it == latch.engaged.end()) continue;

    Vec2 offset = self.position - n->position;
    Vec2 dir = offset.norm() > 1e-12 ? Vec2(offset.normalized()) : unit_vector(self.heading + std::numbers::pi);
    if (it->second == Mode::TooClose) {
      away += dir;
      out.outbox.push_back(SwarmMessage{MessageKind::TooClose, self.id, n->uav_id, 0, {}});
    } else {
      toward -= dir;
      out.outbox.push_back(SwarmMessage{MessageKind::TooFar, self.id, n->uav_id, 0, {}});
    }
  }

  if (away.norm() > 1e-12) {
    out.command = MotionCommand{speed, std::atan2(away.y(), away.x())};
  } else if (toward.norm() > 1e-12) {
    out.command = MotionCommand{speed, std::atan2(toward.y(), toward.x())};
  } else if (!latch.engaged.empty()) {
    // Opposing corrections cancel; hold position.
    out.command = MotionCommand{0.0, self.heading};
  }
  return out;
}

bool WaypointPath::valid() const {
  if (waypoints.empty() || laps < 1 || !(speed > 0.0) || !(capture_radius > 0.0)) return false;
  for (std::size_t i = 1; i < waypoints.size(); ++i) {
    if (waypoints[i] == waypoints[i - 1]) return false;
  }
  if (closed && waypoints.size() > 1 && waypoints.front() == waypoints.back()) return false;
  return true;
}

MotionCommand follow_path(const UavState& state, const WaypointPath& path, PathFollower& f,
                          const KinematicLimits& limits, double dt) {
  const MotionCommand hold{0.0, state.heading};
  const std::size_t n = path.waypoints.size();
  if (n == 0 || f.mode == PathFollower::Mode::Done) return hold;
  if (!f.started) {
    f.started = true;
    f.target = 0;
    f.segment_start = state.position;
  }

  // Each iteration either returns or consumes one waypoint arrival.
  for (std::size_t guard = 0; guard <= n + 1; ++guard) {
    const Vec2 to = path.waypoints[f.target];
    const Vec2 seg = to - f.segment_start;
    const double seg_len = seg.norm();
    const Vec2 dir = seg_len > 1e-12 ? Vec2(seg / seg_len) : Vec2::Zero();
    const double remaining = seg_len > 1e-12 ? (to - state.position).dot(dir) : 0.0;

    const bool arrived = seg_len <= 1e-12 || remaining <= 1e-9 ||
                         (state.speed == 0.0 && remaining <= path.capture_radius);
    if (arrived) {
      if (state.speed > 0.0) return hold;
      f.segment_start = to;
      const bool lap_complete = path.closed && f.target == 0 && f.seen_last;
      if (f.target == n - 1) f.seen_last = true;
      if (lap_complete) {
        f.seen_last = false;
        if (++f.laps_done >= path.laps) {
          f.mode = PathFollower::Mode::Done;
          return hold;
        }
      }
      if (f.target + 1 < n) {
        ++f.target;
      } else if (path.closed && n > 1) {
        f.target = 0;
      } else {
        f.mode = PathFollower::Mode::Done;
        return hold;
      }
      continue;
    }

    const double seg_heading = std::atan2(dir.y(), dir.x());
    if (std::abs(normalize_angle(state.heading - seg_heading)) > 1e-12) {
      if (state.speed > 0.0) return hold;
      return MotionCommand{0.0, seg_heading};
    }
    double v = std::min({path.speed, limits.v_max, remaining / dt});
    if (limits.a_max > 0.0) v = std::min(v, std::sqrt(2.0 * limits.a_max * remaining));
    return MotionCommand{v, seg_heading};
  }
  return hold;
}

}  // namespace swarmlink
