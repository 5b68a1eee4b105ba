#pragma once

#include "swarmlink/geometry.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string_view>
#include <vector>

namespace swarmlink {

/// Discrete clock. Time is derived from the tick count, never accumulated.
struct SimClock {
  std::int64_t tick = 0;
  double dt = 0.05;

  double time() const { return static_cast<double>(tick) * dt; }
};

/// Number of whole ticks in `duration` seconds at step `dt`; the remainder is dropped.
std::int64_t ticks_for_duration(double duration, double dt);
/// Seconds left over by ticks_for_duration (zero when duration is a multiple of dt).
double duration_remainder(double duration, double dt);

struct KinematicLimits {
  double v_max = 0.2;  // m/s
  double a_max = 0.1;  // m/s^2

  friend bool operator==(const KinematicLimits&, const KinematicLimits&) = default;
};

struct UavState {
  int id = 0;
  Vec2 position = Vec2::Zero();
  double heading = 0.0;  // rad
  double speed = 0.0;    // m/s
  double residual_energy = 0.0;
  double broadcast_rate = 0.0;  // messages/s
};

/// Desired speed and heading. Heading is applied immediately, speed through the acceleration limit.
struct MotionCommand {
  double speed = 0.0;
  double heading = 0.0;
};

struct Environment {
  Rect bounds;
  std::vector<Rect> obstacles;

  bool valid() const;
  bool inside_obstacle(const Vec2& p) const;

  friend bool operator==(const Environment&, const Environment&) = default;
};

UavState step_kinematics(const UavState& state, const MotionCommand& command,
                         const KinematicLimits& limits, double dt);

/// Nearest point (from a) where segment a->b touches an obstacle. A point already inside
/// an obstacle is its own hit.
std::optional<Vec2> segment_hits_obstacle(const Vec2& a, const Vec2& b, const Environment& env);

enum class Phase : int { Kinematics = 0, Sensing, Link, Formation, Learning, Metrics };
inline constexpr int kPhaseCount = 6;
std::string_view phase_name(Phase phase);

struct TraceEvent {
  std::int64_t tick = 0;
  Phase phase = Phase::Kinematics;
  std::string_view tag;  // static string
};

struct Uav {
  UavState state;
  KinematicLimits limits;
  MotionCommand command;
};

/// Simulation kernel state. Modules attach per-phase hooks; run_ticks invokes them in
/// phase order every tick, after the built-in kinematics step.
class World {
 public:
  using Hook = std::function<void(World&)>;

  World(Environment env, double dt);

  SimClock clock;
  Environment env;
  std::vector<Uav> uavs;

  void add_hook(Phase phase, Hook hook);
  bool has_hooks(Phase phase) const { return !hooks_[static_cast<int>(phase)].empty(); }

  Uav* find(int id);
  const Uav* find(int id) const;

  void record(Phase phase, std::string_view tag);
  const std::vector<TraceEvent>& trace() const { return trace_; }

 private:
  friend void run_ticks(World& world, std::int64_t n);
  std::array<std::vector<Hook>, kPhaseCount> hooks_;
  std::vector<TraceEvent> trace_;
};

void run_ticks(World& world, std::int64_t n);

}  // namespace swarmlink
