#pragma once

#include "swarmlink/formation.hpp"
#include "swarmlink/link.hpp"
#include "swarmlink/qlearn.hpp"
#include "swarmlink/radio.hpp"
#include "swarmlink/slam.hpp"
#include "swarmlink/world.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace swarmlink {

enum class ExperimentKind { Reconnect, RssiAccuracy, SlamMoving, SlamStatic, Free };
std::string_view experiment_kind_name(ExperimentKind kind);
std::optional<ExperimentKind> parse_experiment_kind(std::string_view text);

struct SimConfig {
  std::string name = "scenario";
  std::uint64_t seed = 1;
  double dt = 0.05;
  double duration = 0.0;
  int runs = 1;

  friend bool operator==(const SimConfig&, const SimConfig&) = default;
};

struct UavConfig {
  Vec2 position = Vec2::Zero();
  double heading_deg = 0.0;
  KinematicLimits limits;
  double energy = 100.0;
  double broadcast_rate = 1.0;

  friend bool operator==(const UavConfig&, const UavConfig&) = default;
};

struct SeparationConfig {
  SeparationPolicy policy;
  /// Oracle runs steer on the true distance instead of the rssi estimate.
  bool use_true_distance = false;

  friend bool operator==(const SeparationConfig&, const SeparationConfig&) = default;
};

struct LearnConfig {
  std::vector<double> rates{0.5, 1.0, 2.0, 4.0, 8.0};  // messages per second per bucket
  int energy_buckets = 4;
  double alpha = 0.1;
  double gamma = 0.9;
  double epsilon = 0.1;
  AlphaSchedule schedule = AlphaSchedule::Fixed;
  RewardWeights weights;
  int period_ticks = 20;
  double energy_per_message = 0.05;

  friend bool operator==(const LearnConfig&, const LearnConfig&) = default;
};

struct PathConfig {
  int uav = 0;
  WaypointPath path;

  friend bool operator==(const PathConfig&, const PathConfig&) = default;
};

struct AreaConfig {
  Rect rect;
  Priority priority = Priority::Minor;
  std::optional<int> uav;

  friend bool operator==(const AreaConfig&, const AreaConfig&) = default;
};

struct DisruptionScript {
  UavPair pair;
  double start = 0.0;  // seconds
  double end = 0.0;    // seconds

  friend bool operator==(const DisruptionScript&, const DisruptionScript&) = default;
};

struct IntervalSpec {
  double distance = 0.0;
  RssiInterval interval;

  friend bool operator==(const IntervalSpec&, const IntervalSpec&) = default;
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::Free;
  std::vector<double> distances;
  std::vector<IntervalSpec> intervals;  // file order is the reporting order
  std::vector<int> devices;             // rssi devices; empty means the first two uavs
  double requirement = 0.8;

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

struct ScenarioConfig {
  SimConfig sim;
  Environment env{Rect{Vec2(0, 0), Vec2(20, 20)}, {}};
  std::map<int, UavConfig> uavs;
  ChannelParams channel;
  LinkParams link;
  SeparationConfig separation;
  LearnConfig learn;
  LaserSpec laser;
  SlamParams slam;
  std::map<int, PathConfig> paths;
  std::map<int, AreaConfig> areas;
  std::map<int, DisruptionScript> disruptions;
  ExperimentConfig experiment;

  friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;
};

struct Diagnostic {
  int line = 0;  // 0 when no source line applies
  std::string message;
};

std::string format_diagnostic(const Diagnostic& d);

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<Diagnostic> diagnostics);
  const std::vector<Diagnostic>& diagnostics() const { return diagnostics_; }

 private:
  std::vector<Diagnostic> diagnostics_;
};

struct ParsedScenario {
  ScenarioConfig config;
  std::vector<Diagnostic> warnings;
};

/// Strict parse: unknown sections or keys, duplicates, bad values and invariant violations all
/// raise ConfigError with every problem found.
ParsedScenario parse_scenario(std::string_view text);

/// Invariant check for configs built in code. `section_lines` maps section headers such as
/// "uav.2" to their source line.
std::vector<Diagnostic> validate_config(const ScenarioConfig& config,
                                        const std::map<std::string, int>& section_lines = {});

/// Non-fatal findings, e.g. a duration that is not a whole number of ticks.
std::vector<Diagnostic> config_warnings(const ScenarioConfig& config);

/// Canonical text form; parse_scenario(serialize(c)).config == c for any valid c.
std::string serialize(const ScenarioConfig& config);

}  // namespace swarmlink
