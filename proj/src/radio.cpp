#include "swarmlink/radio.hpp"

#include "swarmlink/format.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace swarmlink {

double mean_rssi(const ChannelParams& params, double distance) {
  if (!(distance > 0.0)) throw std::invalid_argument("rssi distance must be positive");
  return params.rssi0 - 10.0 * params.path_loss_exponent * std::log10(distance / params.d0);
}

double sample_rssi(const ChannelParams& params, double distance, RngStream& rng) {
  return rng.normal(mean_rssi(params, distance), params.noise_sigma);
}

double estimate_distance(const ChannelParams& params, double rssi) {
  return params.d0 * std::pow(10.0, (params.rssi0 - rssi) / (10.0 * params.path_loss_exponent));
}

RssiInterval RssiInterval::between(double a, double b) { return {std::min(a, b), std::max(a, b)}; }

std::string RssiInterval::label() const { return format_number(high) + " <-> " + format_number(low); }

std::optional<double> AccuracyRow::accuracy() const {
  if (total() == 0) return std::nullopt;
  return static_cast<double>(successes) / static_cast<double>(total());
}

AccuracyRow accumulate_interval_stats(std::span<const RssiSample> samples, const RssiInterval& interval) {
  AccuracyRow row;
  row.interval = interval;
  if (samples.empty()) return row;
  row.distance = samples.front().true_distance;
  row.device = samples.front().device;
  for (const auto& s : samples) {
    if (s.true_distance != row.distance) {
      throw std::invalid_argument("interval statistics need samples at a single true distance");
    }
    if (interval.contains(s.rssi)) {
      ++row.successes;
    } else {
      ++row.failures;
    }
  }
  return row;
}

std::string format_percent(std::optional<double> ratio) { return format_fixed(ratio.value_or(0.0) * 100.0, 2); }

std::string format_percent_comma(std::optional<double> ratio) {
  std::string s = format_percent(ratio);
  std::replace(s.begin(), s.end(), '.', ',');
  return s + "%";
}

ChannelParams calibrate_params(std::span<const std::pair<double, double>> anchors, double d0) {
  std::set<double> distinct;
  for (const auto& [d, rssi] : anchors) {
    if (!(d > 0.0)) throw std::invalid_argument("calibration anchor distance must be positive");
    distinct.insert(d);
  }
  if (distinct.size() < 2) {
    throw std::invalid_argument("calibration needs anchors at two or more distinct distances");
  }
  const auto n = static_cast<Eigen::Index>(anchors.size());
  Eigen::MatrixXd design(n, 2);
  Eigen::VectorXd observed(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& [d, rssi] = anchors[static_cast<std::size_t>(i)];
    design(i, 0) = 1.0;
    design(i, 1) = -10.0 * std::log10(d / d0);
    observed(i) = rssi;
  }
  const Eigen::Vector2d fit = design.colPivHouseholderQr().solve(observed);
  ChannelParams params;
  params.rssi0 = fit(0);
  params.d0 = d0;
  params.path_loss_exponent = fit(1);
  params.noise_sigma = 0.0;
  return params;
}

double interval_probability(const ChannelParams& params, double distance, const RssiInterval& interval) {
  const double mu = mean_rssi(params, distance);
  if (params.noise_sigma == 0.0) return interval.contains(mu) ? 1.0 : 0.0;
  const auto cdf = [&](double x) { return 0.5 * std::erfc(-(x - mu) / (params.noise_sigma * std::sqrt(2.0))); };
  return cdf(interval.high) - cdf(interval.low);
}

double solve_noise_sigma(const ChannelParams& params, double distance, const RssiInterval& interval,
                         double target) {
  if (!(target > 0.0 && target < 1.0)) throw std::invalid_argument("target accuracy must lie in (0, 1)");
  if (!interval.contains(mean_rssi(params, distance))) {
    throw std::invalid_argument("interval must contain the noiseless rssi");
  }
  // Probability falls monotonically from 1 towards 0 as sigma grows.
  ChannelParams p = params;
  double lo = 1e-9;
  double hi = 1.0;
  p.noise_sigma = hi;
  while (interval_probability(p, distance, interval) > target) {
    hi *= 2.0;
    p.noise_sigma = hi;
  }
  for (int i = 0; i < 200 && hi - lo > 1e-13 * hi; ++i) {
    p.noise_sigma = 0.5 * (lo + hi);
    if (interval_probability(p, distance, interval) > target) {
      lo = p.noise_sigma;
    } else {
      hi = p.noise_sigma;
    }
  }
  return 0.5 * (lo + hi);
}

std::string accuracy_csv(std::span<const AccuracyRow> rows) {
  std::string out = "meters,interval_low,interval_high,device,successes,failures,accuracy_pct\n";
  for (const auto& r : rows) {
    out += format_number(r.distance) + "," + format_number(r.interval.low) + "," + format_number(r.interval.high) +
           "," + std::to_string(r.device) + "," + std::to_string(r.successes) + "," + std::to_string(r.failures) +
           "," + format_percent(r.accuracy()) + "\n";
  }
  return out;
}

}  // namespace swarmlink
