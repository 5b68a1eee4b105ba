#pragma once

#include "swarmlink/rng.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace swarmlink {

/// Log-distance path loss with additive gaussian noise:
///   rssi(d) = rssi0 - 10 n log10(d / d0) + N(0, noise_sigma)
struct ChannelParams {
  double rssi0 = 10.0;  // dB at d0
  double d0 = 1.0;      // m
  double path_loss_exponent = 2.5;
  double noise_sigma = 0.0;  // dB

  bool valid() const { return d0 > 0.0 && path_loss_exponent > 0.0 && noise_sigma >= 0.0; }
  friend bool operator==(const ChannelParams&, const ChannelParams&) = default;
};

double mean_rssi(const ChannelParams& params, double distance);
double sample_rssi(const ChannelParams& params, double distance, RngStream& rng);
/// Exact inverse of the noiseless model.
double estimate_distance(const ChannelParams& params, double rssi);

struct RssiSample {
  std::int64_t tick = 0;
  int device = 0;  // measuring UAV
  int peer = 0;
  double true_distance = 0.0;
  double rssi = 0.0;
};

struct RssiInterval {
  double low = 0.0;
  double high = 0.0;

  /// Accepts the bounds in either order ("-14 <-> -20" and "-20 <-> -14" are the same interval).
  static RssiInterval between(double a, double b);
  bool contains(double rssi) const { return low <= rssi && rssi <= high; }
  double width() const { return high - low; }
  /// Rendered high bound first, e.g. "-14 <-> -20".
  std::string label() const;

  friend bool operator==(const RssiInterval&, const RssiInterval&) = default;
};

struct AccuracyRow {
  double distance = 0.0;
  RssiInterval interval;
  int device = 0;
  std::int64_t successes = 0;
  std::int64_t failures = 0;

  std::int64_t total() const { return successes + failures; }
  /// successes / total; none for an empty row.
  std::optional<double> accuracy() const;
};

/// Counts samples with low <= rssi <= high. Throws std::invalid_argument if the samples do not
/// share a single true distance.
AccuracyRow accumulate_interval_stats(std::span<const RssiSample> samples, const RssiInterval& interval);

/// Percent with two decimals and a decimal comma, e.g. 0.6095 -> "60,95%". Undefined -> "0,00%".
std::string format_percent_comma(std::optional<double> ratio);
/// Plain decimal percent with two decimals, e.g. "60.95".
std::string format_percent(std::optional<double> ratio);

/// Least-squares fit of rssi0 and the path-loss exponent to (distance, dB) anchors at reference
/// distance d0. noise_sigma is left at zero. Throws std::invalid_argument with fewer than two
/// distinct distances.
ChannelParams calibrate_params(std::span<const std::pair<double, double>> anchors, double d0 = 1.0);

/// Probability that one noisy sample at `distance` falls inside `interval`.
double interval_probability(const ChannelParams& params, double distance, const RssiInterval& interval);

/// Noise sigma at which the interval's expected accuracy at `distance` equals `target`.
/// The interval must contain the noiseless value and target must lie in (0, 1).
double solve_noise_sigma(const ChannelParams& params, double distance, const RssiInterval& interval,
                         double target);

/// CSV with header `meters,interval_low,interval_high,device,successes,failures,accuracy_pct`.
std::string accuracy_csv(std::span<const AccuracyRow> rows);

}  // namespace swarmlink
