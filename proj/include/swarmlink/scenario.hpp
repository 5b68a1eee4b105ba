#pragma once

#include "swarmlink/config.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace swarmlink {

std::string_view library_version();

struct ExperimentReport {
  std::string scenario;
  ExperimentKind kind = ExperimentKind::Free;
  std::uint64_t seed = 0;
  std::int64_t ticks = 0;  // per run
  int runs = 0;            // kernel runs executed
  bool success = true;
  std::vector<std::string> failures;
  std::vector<std::pair<std::string, std::string>> metrics;  // emission order
  std::array<std::int64_t, kPhaseCount> phase_events{};      // kernel trace events summed over runs
  std::vector<Diagnostic> warnings;
  std::map<std::string, std::string> files;  // file name -> contents, summary.txt included

  std::optional<std::string> metric(std::string_view name) const;
  friend bool operator==(const ExperimentReport& a, const ExperimentReport& b) {
    return a.files == b.files && a.success == b.success && a.metrics == b.metrics && a.phase_events == b.phase_events;
  }
};

/// Builds the world for the configured experiment, runs it for floor(duration / dt) ticks per run
/// and returns the report. Throws ConfigError if the config is invalid.
ExperimentReport run_experiment(const ScenarioConfig& config);

/// Parameters accepted by sweep: distance, noise_sigma, interval (as "a:b").
std::span<const std::string_view> sweep_parameters();

/// One report per value, in value order, each equal to run_experiment on the modified config.
/// Throws std::invalid_argument for an unknown parameter or an unparseable value.
std::vector<ExperimentReport> sweep(const ScenarioConfig& config, std::string_view parameter,
                                    std::span<const std::string> values);

/// The config run_experiment sees for one sweep value.
ScenarioConfig apply_sweep_value(const ScenarioConfig& config, std::string_view parameter, std::string_view value);

/// Writes every report file into `dir`, creating it if needed. Throws std::filesystem::filesystem_error
/// or std::runtime_error on I/O failure.
void write_report(const ExperimentReport& report, const std::filesystem::path& dir);

/// Half width, in dB, of the interval reported at a distance that has none configured. The
/// interval is centred on the noiseless rssi.
inline constexpr double kDefaultIntervalHalfWidth = 3.0;

}  // namespace swarmlink
