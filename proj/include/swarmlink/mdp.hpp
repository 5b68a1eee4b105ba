#pragma once

#include "swarmlink/qlearn.hpp"

#include <Eigen/Core>

#include <vector>

namespace swarmlink {

/// Explicit finite MDP. transitions[a](s, s') is the probability of s -> s' under action a.
struct Mdp {
  std::vector<Eigen::MatrixXd> transitions;
  Eigen::MatrixXd rewards;  // states x actions, expected immediate reward
  double gamma = 0.9;

  int states() const { return static_cast<int>(rewards.rows()); }
  int actions() const { return static_cast<int>(rewards.cols()); }
};

struct ValueIterationResult {
  Eigen::MatrixXd q;               // states x actions
  std::vector<double> residuals;   // sup-norm change per sweep
  double bellman_residual = 0.0;   // sup-norm of T(q) - q for the returned q
  int sweeps = 0;
};

/// Classic value iteration on Q, iterated until the sweep change drops below tolerance.
ValueIterationResult value_iteration_oracle(const Mdp& mdp, double tolerance = 1e-10, int max_sweeps = 1'000'000);

/// One Bellman optimality backup of q.
Eigen::MatrixXd bellman_backup(const Mdp& mdp, const Eigen::MatrixXd& q);

/// Actions within `tolerance` of the row maximum, per state.
std::vector<std::vector<int>> optimal_actions(const Eigen::MatrixXd& q, double tolerance = 1e-9);

/// Explicit MDP equivalent of the deterministic rate/energy model.
Mdp rate_energy_mdp(const RateEnergyModel& model, double gamma);

}  // namespace swarmlink
