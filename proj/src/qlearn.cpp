#include "swarmlink/qlearn.hpp"

#include "swarmlink/format.hpp"

#include <algorithm>
#include <string>

namespace swarmlink {

std::string_view action_name(LearnAction a) {
  switch (a) {
    case LearnAction::RateUp: return "RateUp";
    case LearnAction::RateDown: return "RateDown";
    case LearnAction::Hold: return "Hold";
  }
  return "?";
}

int apply_action(int rate_bucket, LearnAction action, int rate_buckets) {
  switch (action) {
    case LearnAction::RateUp: return std::min(rate_bucket + 1, rate_buckets - 1);
    case LearnAction::RateDown: return std::max(rate_bucket - 1, 0);
    case LearnAction::Hold: return rate_bucket;
  }
  return rate_bucket;
}

double reward(double delivered, double lost, double energy_spent, const RewardWeights& w) {
  return w.delivered * delivered - w.lost * lost - w.energy * energy_spent;
}

std::pair<LearnState, double> RateEnergyModel::step(const LearnState& s, LearnAction a) const {
  const int top = rate_buckets() - 1;
  const int rate = apply_action(s.rate_bucket, a, rate_buckets());
  int energy = s.energy_bucket;
  if (rate == 0) energy += 1;
  if (rate == top) energy -= 1;
  energy = std::clamp(energy, 0, energy_buckets - 1);

  const double msgs = messages_per_rate[static_cast<std::size_t>(rate)];
  const bool powered = s.energy_bucket > 0;
  const double r = reward(powered ? msgs : 0.0, powered ? 0.0 : msgs, msgs, weights);
  return {LearnState{rate, energy}, r};
}

QTable<double> train_offline(const RateEnergyModel& model, const OfflineTraining& params, RngStream& rng) {
  QTable<double> q(model.rate_buckets(), model.energy_buckets, 1.0, params.gamma, params.epsilon,
                   AlphaSchedule::InverseVisits);
  LearnState s{rng.uniform_int(0, model.rate_buckets() - 1), rng.uniform_int(0, model.energy_buckets - 1)};
  for (int step = 0; step < params.steps; ++step) {
    if (params.restart_every > 0 && step > 0 && step % params.restart_every == 0) {
      s = {rng.uniform_int(0, model.rate_buckets() - 1), rng.uniform_int(0, model.energy_buckets - 1)};
    }
    const LearnAction a = select_action(q, s, rng);
    const auto [next, r] = model.step(s, a);
    q_update(q, s, a, r, next);
    s = next;
  }
  return q;
}

int energy_bucket(double residual, double capacity, int buckets) {
  if (!(capacity > 0.0)) return 0;
  const double frac = std::clamp(residual / capacity, 0.0, 1.0);
  return std::min(buckets - 1, static_cast<int>(frac * buckets));
}

std::string learn_trace_csv(const std::vector<LearnTraceRow>& rows) {
  std::string out = "tick,uav_id,rate_bucket,energy_bucket,action,reward,q_value\n";
  for (const auto& r : rows) {
    out += std::to_string(r.tick) + "," + std::to_string(r.uav_id) + "," + std::to_string(r.state.rate_bucket) +
           "," + std::to_string(r.state.energy_bucket) + "," + std::string(action_name(r.action)) + "," +
           format_number(r.reward) + "," + format_number(r.q_value) + "\n";
  }
  return out;
}

}  // namespace swarmlink
