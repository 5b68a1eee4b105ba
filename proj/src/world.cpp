#include "swarmlink/world.hpp"

#include <cmath>
#include <limits>

namespace swarmlink {

std::int64_t ticks_for_duration(double duration, double dt) {
  // Guard against 94.95 / 0.05 == 1898.9999999999998.
  const double ratio = duration / dt;
  return static_cast<std::int64_t>(std::floor(ratio + 1e-9 * std::max(1.0, ratio)));
}

double duration_remainder(double duration, double dt) {
  const double rem = duration - static_cast<double>(ticks_for_duration(duration, dt)) * dt;
  return std::abs(rem) < 1e-9 * std::max(1.0, duration) ? 0.0 : rem;
}

bool Environment::valid() const {
  if (!bounds.valid()) return false;
  for (const auto& o : obstacles) {
    if (!o.valid() || !o.within(bounds)) return false;
  }
  return true;
}

bool Environment::inside_obstacle(const Vec2& p) const {
  for (const auto& o : obstacles) {
    if (o.contains(p)) return true;
  }
  return false;
}

UavState step_kinematics(const UavState& state, const MotionCommand& command,
                         const KinematicLimits& limits, double dt) {
  UavState next = state;
  next.heading = normalize_angle(command.heading);
  const double max_dv = limits.a_max * dt;
  const double target = std::clamp(command.speed, 0.0, limits.v_max);
  next.speed = std::clamp(target, state.speed - max_dv, state.speed + max_dv);
  next.speed = std::clamp(next.speed, 0.0, limits.v_max);
  if (next.speed > 0.0) next.position += next.speed * dt * unit_vector(next.heading);
  return next;
}

std::optional<Vec2> segment_hits_obstacle(const Vec2& a, const Vec2& b, const Environment& env) {
  std::optional<double> best;
  for (const auto& o : env.obstacles) {
    if (auto t = segment_box_entry(a, b, o); t && (!best || *t < *best)) best = t;
  }
  if (!best) return std::nullopt;
  if (*best == 0.0) return a;
  return Vec2(a + *best * (b - a));
}

std::string_view phase_name(Phase phase) {
  switch (phase) {
    case Phase::Kinematics: return "kinematics";
    case Phase::Sensing: return "sensing";
    case Phase::Link: return "link";
    case Phase::Formation: return "formation";
    case Phase::Learning: return "learning";
    case Phase::Metrics: return "metrics";
  }
  return "unknown";
}

World::World(Environment env_in, double dt) : env(std::move(env_in)) { clock.dt = dt; }

void World::add_hook(Phase phase, Hook hook) { hooks_[static_cast<int>(phase)].push_back(std::move(hook)); }

Uav* World::find(int id) {
  for (auto& u : uavs) {
    if (u.state.id == id) return &u;
  }
  return nullptr;
}

const Uav* World::find(int id) const { return const_cast<World*>(this)->find(id); }

void World::record(Phase phase, std::string_view tag) { trace_.push_back({clock.tick, phase, tag}); }

void run_ticks(World& world, std::int64_t n) {
  for (std::int64_t i = 0; i < n; ++i) {
    world.record(Phase::Kinematics, "step");
    for (auto& u : world.uavs) {
      u.state = step_kinematics(u.state, u.command, u.limits, world.clock.dt);
      u.state.position = world.env.bounds.clamp(u.state.position);
    }
    for (int p = 1; p < kPhaseCount; ++p) {
      auto& hooks = world.hooks_[p];
      if (hooks.empty()) continue;
      world.record(static_cast<Phase>(p), phase_name(static_cast<Phase>(p)));
      for (auto& hook : hooks) hook(world);
    }
    ++world.clock.tick;
  }
}

}  // namespace swarmlink
