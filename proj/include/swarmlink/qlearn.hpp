#pragma once

#include "swarmlink/rng.hpp"

#include <Eigen/Core>

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string_view>
#include <utility>
#include <vector>

namespace swarmlink {

struct LearnState {
  int rate_bucket = 0;
  int energy_bucket = 0;

  friend bool operator==(const LearnState&, const LearnState&) = default;
};

enum class LearnAction : int { RateUp = 0, RateDown = 1, Hold = 2 };
inline constexpr int kActionCount = 3;
inline constexpr std::array<LearnAction, kActionCount> kAllActions{LearnAction::RateUp, LearnAction::RateDown,
                                                                   LearnAction::Hold};
std::string_view action_name(LearnAction a);

/// Rate bucket after taking `action`; RateUp at the top and RateDown at the bottom act as Hold.
int apply_action(int rate_bucket, LearnAction action, int rate_buckets);

enum class AlphaSchedule { Fixed, InverseVisits };

/// Tabular action values over (rate bucket, energy bucket) x {RateUp, RateDown, Hold}.
/// Row index is rate_bucket * energy_buckets + energy_bucket.
template <typename Scalar = double>
class QTable {
 public:
  using Values = Eigen::Matrix<Scalar, Eigen::Dynamic, kActionCount>;

  QTable(int rate_buckets, int energy_buckets, Scalar alpha, Scalar gamma, Scalar epsilon,
         AlphaSchedule schedule = AlphaSchedule::Fixed)
      : rate_buckets_(rate_buckets),
        energy_buckets_(energy_buckets),
        alpha_(alpha),
        gamma_(gamma),
        epsilon_(epsilon),
        schedule_(schedule),
        values_(Values::Zero(rate_buckets * energy_buckets, kActionCount)),
        visits_(Eigen::Matrix<std::int64_t, Eigen::Dynamic, kActionCount>::Zero(rate_buckets * energy_buckets,
                                                                                kActionCount)) {
    if (rate_buckets < 1 || energy_buckets < 1) throw std::invalid_argument("q-table needs at least one bucket");
    if (!(alpha >= Scalar(0) && alpha <= Scalar(1))) throw std::invalid_argument("alpha must lie in [0, 1]");
    if (!(gamma >= Scalar(0) && gamma < Scalar(1))) throw std::invalid_argument("gamma must lie in [0, 1)");
    if (!(epsilon >= Scalar(0) && epsilon <= Scalar(1))) throw std::invalid_argument("epsilon must lie in [0, 1]");
  }

  int rate_buckets() const { return rate_buckets_; }
  int energy_buckets() const { return energy_buckets_; }
  int state_count() const { return rate_buckets_ * energy_buckets_; }
  Scalar alpha() const { return alpha_; }
  Scalar gamma() const { return gamma_; }
  Scalar epsilon() const { return epsilon_; }
  AlphaSchedule schedule() const { return schedule_; }

  int index(const LearnState& s) const {
    if (s.rate_bucket < 0 || s.rate_bucket >= rate_buckets_ || s.energy_bucket < 0 ||
        s.energy_bucket >= energy_buckets_) {
      throw std::out_of_range("learn state outside the table");
    }
    return s.rate_bucket * energy_buckets_ + s.energy_bucket;
  }
  LearnState state_at(int index) const { return {index / energy_buckets_, index % energy_buckets_}; }

  Scalar operator()(const LearnState& s, LearnAction a) const { return values_(index(s), static_cast<int>(a)); }
  Scalar& operator()(const LearnState& s, LearnAction a) { return values_(index(s), static_cast<int>(a)); }

  Scalar max_value(const LearnState& s) const { return values_.row(index(s)).maxCoeff(); }

  /// Argmax with ties to the lowest action index.
  LearnAction greedy(const LearnState& s) const {
    const auto row = values_.row(index(s));
    int best = 0;
    for (int a = 1; a < kActionCount; ++a) {
      if (row(a) > row(best)) best = a;
    }
    return static_cast<LearnAction>(best);
  }

  /// Step size for the next update of (s, a); counts the visit under InverseVisits.
  Scalar next_alpha(const LearnState& s, LearnAction a) {
    auto& n = visits_(index(s), static_cast<int>(a));
    ++n;
    return schedule_ == AlphaSchedule::InverseVisits ? Scalar(1) / static_cast<Scalar>(n) : alpha_;
  }

  std::int64_t visits(const LearnState& s, LearnAction a) const { return visits_(index(s), static_cast<int>(a)); }

  const Values& values() const { return values_; }
  Values& values() { return values_; }

 private:
  int rate_buckets_;
  int energy_buckets_;
  Scalar alpha_;
  Scalar gamma_;
  Scalar epsilon_;
  AlphaSchedule schedule_;
  Values values_;
  Eigen::Matrix<std::int64_t, Eigen::Dynamic, kActionCount> visits_;
};

/// q[s,a] <- (1 - alpha) q[s,a] + alpha (r + gamma max_a' q[s',a']). Touches one cell.
template <typename Scalar>
void q_update(QTable<Scalar>& q, const LearnState& s, LearnAction a, Scalar reward, const LearnState& next) {
  const Scalar target = reward + q.gamma() * q.max_value(next);
  const Scalar alpha = q.next_alpha(s, a);
  Scalar& cell = q(s, a);
  cell = (Scalar(1) - alpha) * cell + alpha * target;
}

/// Epsilon-greedy: with probability epsilon a uniform action, otherwise the greedy one.
template <typename Scalar>
LearnAction select_action(const QTable<Scalar>& q, const LearnState& s, RngStream& rng) {
  if (rng.uniform() < static_cast<double>(q.epsilon())) {
    return static_cast<LearnAction>(rng.uniform_int(0, kActionCount - 1));
  }
  return q.greedy(s);
}

struct RewardWeights {
  double delivered = 1.0;
  double lost = 1.0;
  double energy = 0.1;

  friend bool operator==(const RewardWeights&, const RewardWeights&) = default;
};

double reward(double delivered, double lost, double energy_spent, const RewardWeights& weights = {});

/// Deterministic broadcast model shared by the live agent and the test MDP: the chosen rate bucket
/// sets messages per period; energy drains at the top rate and recovers at the bottom rate; with
/// an empty battery every message is lost.
struct RateEnergyModel {
  std::vector<double> messages_per_rate{1.0, 2.0, 4.0};
  int energy_buckets = 3;
  RewardWeights weights;

  int rate_buckets() const { return static_cast<int>(messages_per_rate.size()); }
  std::pair<LearnState, double> step(const LearnState& s, LearnAction a) const;
};

struct OfflineTraining {
  double gamma = 0.5;
  double epsilon = 0.2;
  int steps = 50'000;
  /// Jump to a uniformly random state every this many steps, so every state keeps being visited.
  int restart_every = 50;
};

/// Epsilon-greedy Q-learning on the model with alpha = 1 / N(s, a), from a zero table.
QTable<double> train_offline(const RateEnergyModel& model, const OfflineTraining& params, RngStream& rng);

/// Residual-energy bucket in [0, buckets) for energy in [0, capacity].
int energy_bucket(double residual, double capacity, int buckets);

/// Learning trace row: `tick,uav_id,rate_bucket,energy_bucket,action,reward,q_value`.
struct LearnTraceRow {
  std::int64_t tick = 0;
  int uav_id = 0;
  LearnState state;
  LearnAction action = LearnAction::Hold;
  double reward = 0.0;
  double q_value = 0.0;
};

std::string learn_trace_csv(const std::vector<LearnTraceRow>& rows);

}  // namespace swarmlink
