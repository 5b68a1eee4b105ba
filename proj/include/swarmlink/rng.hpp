#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>

namespace swarmlink {

/// Seeded random stream. Streams with equal (seed, label) replay identically;
/// distinct labels are decorrelated by hashing the label into the engine seed.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::string_view label);

  std::uint64_t seed() const { return seed_; }
  const std::string& label() const { return label_; }

  /// Uniform in [0, 1).
  double uniform();
  /// Uniform integer in [lo, hi].
  int uniform_int(int lo, int hi);
  /// Always consumes one standard normal draw, even when sigma is zero.
  double normal(double mean, double sigma);
  bool bernoulli(double p) { return uniform() < p; }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::uint64_t seed_;
  std::string label_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> std_normal_{0.0, 1.0};
};

/// 64-bit FNV-1a; used for stream derivation, stable across platforms.
std::uint64_t fnv1a64(std::string_view bytes);

}  // namespace swarmlink
