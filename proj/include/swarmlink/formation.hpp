#pragma once

#include "swarmlink/link.hpp"
#include "swarmlink/world.hpp"

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace swarmlink {

// ---------------------------------------------------------------------------
// Observation areas

enum class Priority { Major, Minor };
std::string_view priority_name(Priority p);

struct ObservationArea {
  int id = 0;
  Rect rect;
  Priority priority = Priority::Minor;
  std::optional<int> assigned_uav;

  friend bool operator==(const ObservationArea&, const ObservationArea&) = default;
};

struct AreaAssignment {
  int area_id = 0;
  Priority priority = Priority::Minor;
  std::optional<int> uav_id;  // none: left unassigned

  friend bool operator==(const AreaAssignment&, const AreaAssignment&) = default;
};

/// Greedy priority-first assignment. Areas are visited major first, then by id; each takes the
/// nearest idle UAV (distance to the area center, ties to the lower UAV id). Existing assignments
/// to live UAVs are kept. Output is sorted by area id. Throws std::invalid_argument without UAVs.
std::vector<AreaAssignment> assign_areas(std::span<const ObservationArea> areas, std::span<const UavState> uavs);

/// CSV `area_id,priority,uav_id`; unassigned areas carry an empty uav_id.
std::string assignment_csv(std::span<const AreaAssignment> rows);

// ---------------------------------------------------------------------------
// Separation control

struct SeparationPolicy {
  double d_min = 4.0;
  double d_max = 8.0;
  double hysteresis = 0.25;

  bool valid() const { return 0.0 < d_min && d_min < d_max && 0.0 <= hysteresis && hysteresis < (d_max - d_min) / 2.0; }
  friend bool operator==(const SeparationPolicy&, const SeparationPolicy&) = default;
};

struct NeighborEstimate {
  int uav_id = 0;
  double estimated_m = 0.0;
  Vec2 position = Vec2::Zero();  // as reported in the neighbor's heartbeat
  bool chain_neighbor = false;
  double true_m = 0.0;  // logging only
};

/// Latched corrections per neighbor. A TooClose correction engages below d_min - hysteresis and
/// releases at d_min + hysteresis; TooFar engages above d_max + hysteresis and releases at
/// d_max - hysteresis.
struct SeparationLatch {
  enum class Mode { TooClose, TooFar };
  std::map<int, Mode> engaged;
};

struct SeparationOutput {
  std::optional<MotionCommand> command;
  std::vector<SwarmMessage> outbox;
};

SeparationOutput separation_control(const UavState& self, std::span<const NeighborEstimate> neighbors,
                                    const SeparationPolicy& policy, SeparationLatch& latch, double speed);

// ---------------------------------------------------------------------------
// Path following

struct WaypointPath {
  std::vector<Vec2> waypoints;
  bool closed = false;
  int laps = 1;
  double speed = 0.2;
  double capture_radius = 0.05;

  bool valid() const;
  friend bool operator==(const WaypointPath&, const WaypointPath&) = default;
};

struct PathFollower {
  enum class Mode { Translate, Done };
  Mode mode = Mode::Translate;
  std::size_t target = 0;  // index of the waypoint being approached
  Vec2 segment_start = Vec2::Zero();
  int laps_done = 0;
  bool seen_last = false;
  bool started = false;
};

/// Drives straight segments at the path speed with a braking profile into each waypoint, stops,
/// rotates in place to the next segment direction, then proceeds. Heading equals the segment
/// direction whenever the commanded speed is nonzero.
MotionCommand follow_path(const UavState& state, const WaypointPath& path, PathFollower& follower,
                          const KinematicLimits& limits, double dt);

}  // namespace swarmlink
