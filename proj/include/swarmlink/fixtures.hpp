#pragma once

#include "swarmlink/config.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace swarmlink {

/// One device cell of the hardware rssi accuracy table, with the percentage as printed.
struct PrintedAccuracy {
  double meters = 0.0;
  RssiInterval interval;
  int device = 0;
  std::int64_t successes = 0;
  std::int64_t failures = 0;
  std::string printed;  // e.g. "60,95%"
};

/// The nine hardware rows, two devices each, in table order.
std::span<const PrintedAccuracy> hardware_accuracy_cells();

/// (distance, dB) anchors at the centre of the widest interval per distance.
std::vector<std::pair<double, double>> interval_centre_anchors();

/// Channel fitted to the anchors, with noise sigma solved so the widest 8 m interval scores 50.19%.
ChannelParams calibrated_channel();

ScenarioConfig reconnect_fixture();
ScenarioConfig rssi_accuracy_fixture();
ScenarioConfig slam_moving_fixture();
ScenarioConfig slam_static_fixture();

struct NamedFixture {
  std::string file;  // e.g. "reconnect.scn"
  ScenarioConfig config;
};

/// The four experiment fixtures in a fixed order.
std::vector<NamedFixture> fixture_set();

}  // namespace swarmlink
