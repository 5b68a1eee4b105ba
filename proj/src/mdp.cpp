#include "swarmlink/mdp.hpp"

#include <stdexcept>

namespace swarmlink {

Eigen::MatrixXd bellman_backup(const Mdp& mdp, const Eigen::MatrixXd& q) {
  const Eigen::VectorXd v = q.rowwise().maxCoeff();
  Eigen::MatrixXd next(mdp.states(), mdp.actions());
  for (int a = 0; a < mdp.actions(); ++a) {
    next.col(a) = mdp.rewards.col(a) + mdp.gamma * (mdp.transitions[static_cast<std::size_t>(a)] * v);
  }
  return next;
}

ValueIterationResult value_iteration_oracle(const Mdp& mdp, double tolerance, int max_sweeps) {
  if (static_cast<int>(mdp.transitions.size()) != mdp.actions()) {
    throw std::invalid_argument("mdp needs one transition matrix per action");
  }
  if (!(mdp.gamma >= 0.0 && mdp.gamma < 1.0)) throw std::invalid_argument("mdp gamma must lie in [0, 1)");

  ValueIterationResult result;
  result.q = Eigen::MatrixXd::Zero(mdp.states(), mdp.actions());
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    Eigen::MatrixXd next = bellman_backup(mdp, result.q);
    const double change = (next - result.q).cwiseAbs().maxCoeff();
    result.q = std::move(next);
    result.residuals.push_back(change);
    ++result.sweeps;
    if (change < tolerance) break;
  }
  result.bellman_residual = (bellman_backup(mdp, result.q) - result.q).cwiseAbs().maxCoeff();
  return result;
}

std::vector<std::vector<int>> optimal_actions(const Eigen::MatrixXd& q, double tolerance) {
  std::vector<std::vector<int>> out(static_cast<std::size_t>(q.rows()));
  for (Eigen::Index s = 0; s < q.rows(); ++s) {
    const double best = q.row(s).maxCoeff();
    for (Eigen::Index a = 0; a < q.cols(); ++a) {
      if (q(s, a) >= best - tolerance) out[static_cast<std::size_t>(s)].push_back(static_cast<int>(a));
    }
  }
  return out;
}

Mdp rate_energy_mdp(const RateEnergyModel& model, double gamma) {
  const int states = model.rate_buckets() * model.energy_buckets;
  Mdp mdp;
  mdp.gamma = gamma;
  mdp.rewards = Eigen::MatrixXd::Zero(states, kActionCount);
  mdp.transitions.assign(kActionCount, Eigen::MatrixXd::Zero(states, states));
  for (int s = 0; s < states; ++s) {
    const LearnState ls{s / model.energy_buckets, s % model.energy_buckets};
    for (int a = 0; a < kActionCount; ++a) {
      const auto [next, r] = model.step(ls, static_cast<LearnAction>(a));
      mdp.transitions[static_cast<std::size_t>(a)](s, next.rate_bucket * model.energy_buckets + next.energy_bucket) = 1.0;
      mdp.rewards(s, a) = r;
    }
  }
  return mdp;
}

}  // namespace swarmlink
