#include "swarmlink/fixtures.hpp"
#include "swarmlink/format.hpp"
#include "swarmlink/mdp.hpp"
#include "swarmlink/qlearn.hpp"
#include "swarmlink/scenario.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

using namespace swarmlink;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

struct Criterion {
  const char* id;
  const char* title;
  double time_limit_s;  // zero means no limit
  std::function<Outcome()> check;
};

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

double metric(const ExperimentReport& r, const char* name) { return std::stod(r.metric(name).value()); }

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

// Reports kept for the determinism re-run.
std::vector<std::pair<ScenarioConfig, ExperimentReport>> g_runs;

ExperimentReport keep(const ScenarioConfig& c) {
  ExperimentReport r = run_experiment(c);
  g_runs.emplace_back(c, r);
  return r;
}

Outcome ac1_table_arithmetic() {
  Outcome o;
  int ok = 0, total = 0;
  for (const auto& cell : hardware_accuracy_cells()) {
    ++total;
    std::string printed = cell.printed;
    std::replace(printed.begin(), printed.end(), ',', '.');
    const double printed_pct = std::stod(printed.substr(0, printed.size() - 1));
    const double pct = 100.0 * static_cast<double>(cell.successes) / static_cast<double>(cell.successes + cell.failures);
    if (std::abs(pct - printed_pct) <= 0.01 + 1e-9) {
      ++ok;
    } else {
      o.pass = false;
      o.detail += "; " + format_number(cell.meters) + "m " + cell.interval.label() + " device " +
                  std::to_string(cell.device) + ": " + std::to_string(cell.successes) + "/" +
                  std::to_string(cell.successes + cell.failures) + " = " + fmt("%.2f%%", pct) + ", printed " +
                  cell.printed;
    }
  }
  o.detail = std::to_string(ok) + "/" + std::to_string(total) + " cells within 0.01 pp" + o.detail;
  return o;
}

Outcome ac2_rssi_ordering() {
  Outcome o;
  const ChannelParams ch = calibrated_channel();
  if (std::abs(ch.path_loss_exponent - 2.5) > 0.1) {
    o.pass = false;
    o.detail = "fitted exponent " + fmt("%.4f", ch.path_loss_exponent) + "; ";
  }
  double lo = 1.0, hi = 0.0;
  int violations = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    ScenarioConfig c = rssi_accuracy_fixture();
    c.sim.seed = seed;
    const ExperimentReport r = seed == 1 ? keep(c) : run_experiment(c);
    // key: (distance, device) -> accuracies in listed order
    std::map<std::pair<std::string, std::string>, std::vector<double>> acc;
    for (const auto& row : csv_rows(r.files.at("rssi_accuracy.csv"))) {
      acc[{row[0], row[3]}].push_back(std::stod(row[6]));
    }
    for (const auto& [key, values] : acc) {
      for (std::size_t i = 1; i < values.size(); ++i) {
        if (values[i] > values[i - 1]) {
          ++violations;
          o.detail += "seed " + std::to_string(seed) + " " + key.first + "m device " + key.second + " row " +
                      std::to_string(i) + " rises; ";
        }
      }
      if (key.first == "8") {
        lo = std::min(lo, values.front() / 100);
        hi = std::max(hi, values.front() / 100);
      }
    }
  }
  if (violations > 0 || lo < 0.45 || hi > 0.55) o.pass = false;
  o.detail += "n = " + fmt("%.4f", ch.path_loss_exponent) + ", sigma = " + fmt("%.4f", ch.noise_sigma) +
              " dB, widest 8 m interval accuracy in [" + fmt("%.2f", 100 * lo) + "%, " + fmt("%.2f", 100 * hi) +
              "%] over 10 seeds, " + std::to_string(violations) + " ordering violations";
  return o;
}

Outcome ac3_estimator() {
  Outcome o;
  RngStream rng(2024, "acceptance/estimator");
  double worst = 0.0;
  for (int i = 0; i < 10'000; ++i) {
    ChannelParams p;
    p.rssi0 = -40 + 80 * rng.uniform();
    p.d0 = 0.1 + 4.9 * rng.uniform();
    p.path_loss_exponent = 1.0 + 4.0 * rng.uniform();
    for (double d : {4.0, 8.0, 12.0, 16.0}) {
      worst = std::max(worst, std::abs(estimate_distance(p, mean_rssi(p, d)) - d) / d);
    }
  }
  o.pass = worst < 1e-9;
  o.detail = "worst relative error " + fmt("%.3g", worst) + " over 40000 round trips";
  return o;
}

double schedule_oracle(std::int64_t start, std::int64_t end, const LinkParams& p, double dt) {
  const std::int64_t last_heartbeat = start - 1 + p.latency;
  const std::int64_t lost = last_heartbeat + p.miss_threshold + 1;
  const std::int64_t wait = std::max<std::int64_t>(0, end - lost);
  const std::int64_t beacon = lost + p.beacon_period * ((wait + p.beacon_period - 1) / p.beacon_period);
  return static_cast<double>(beacon + 3 * p.latency - (last_heartbeat + 1)) * dt;
}

Outcome ac4_reconnect() {
  Outcome o;
  int outages = 0, recovered = 0, exact = 0;
  bool shape = true;
  const std::regex cell_re(R"(\d+,\d{4}s)");
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    ScenarioConfig c = reconnect_fixture();
    c.sim.seed = seed;
    const ExperimentReport r = seed == 1 ? keep(c) : run_experiment(c);
    std::map<std::pair<std::string, std::string>, std::vector<double>> per_run;
    for (const auto& row : csv_rows(r.files.at("reconnect_runs.csv"))) {
      ++outages;
      if (row.size() < 4 || row[3].empty()) continue;
      ++recovered;
      const auto& d = c.disruptions.at(row[1] == "1-2" ? 1 : 2);
      const double oracle = schedule_oracle(ticks_for_duration(d.start, c.sim.dt), ticks_for_duration(d.end, c.sim.dt),
                                            c.link, c.sim.dt);
      if (row[3] == format_fixed(oracle, 4)) ++exact;
      per_run[{row[0], row[1]}].push_back(std::stod(row[3]));
    }
    std::istringstream table(r.files.at("table1.tsv"));
    std::string line;
    std::getline(table, line);
    shape = shape && line == "Distance\tDevice 1 and Device 2\tDevice 2 and Device 3";
    const std::vector<std::string> labels{"4", "8", "12"};
    for (const auto& d : labels) {
      if (!std::getline(table, line)) {
        shape = false;
        break;
      }
      std::vector<std::string> cells;
      std::istringstream ls(line);
      std::string cell;
      while (std::getline(ls, cell, '\t')) cells.push_back(cell);
      if (cells.size() != 3 || cells[0] != d + "m") {
        shape = false;
        continue;
      }
      for (int k = 1; k <= 2; ++k) {
        const auto& runs = per_run[{d, k == 1 ? "1-2" : "2-3"}];
        double mean = 0;
        for (double v : runs) mean += v;
        mean /= static_cast<double>(runs.size());
        std::string expected = format_fixed(mean, 4);
        std::replace(expected.begin(), expected.end(), '.', ',');
        shape = shape && runs.size() == 5 && std::regex_match(cells[static_cast<std::size_t>(k)], cell_re) &&
                cells[static_cast<std::size_t>(k)] == expected + "s";
      }
    }
    shape = shape && !std::getline(table, line);
  }
  o.pass = outages == recovered && recovered == exact && shape && outages == 5 * 3 * 5 * 2;
  o.detail = std::to_string(recovered) + "/" + std::to_string(outages) + " outages recovered, " +
             std::to_string(exact) + " equal to the schedule oracle, table shape " + (shape ? "ok" : "wrong");
  return o;
}

Outcome ac5_separation() {
  Outcome o;
  ScenarioConfig c;
  c.sim = {"separation", 1, 0.05, 60.0, 1};
  c.env = Environment{Rect{Vec2(0, 0), Vec2(40, 40)}, {}};
  c.uavs[1] = UavConfig{Vec2(15, 20), 0.0, {1.0, 1.0}, 100.0, 1.0};
  c.uavs[2] = UavConfig{Vec2(17, 20), 0.0, {1.0, 1.0}, 100.0, 1.0};
  c.channel = calibrated_channel();
  c.channel.noise_sigma = 0.0;
  c.experiment.kind = ExperimentKind::Free;
  const ExperimentReport r = keep(c);

  std::int64_t reached = -1;
  bool held = true;
  for (const auto& row : csv_rows(r.files.at("pair_distance.csv"))) {
    const std::int64_t tick = std::stoll(row[0]);
    const double d = std::stod(row[2]);
    const bool inside = d >= c.separation.policy.d_min && d <= c.separation.policy.d_max;
    if (reached < 0 && inside) reached = tick;
    if (tick >= 500 && !inside) held = false;
  }
  const std::int64_t last_message = std::stoll(r.metric("last_separation_tick").value());
  const bool loop_ok = reached >= 0 && reached < 500 && held && last_message < 500;

  // Accuracy requirement, noise free and with calibrated noise.
  ScenarioConfig clean = rssi_accuracy_fixture();
  clean.sim.duration = 100.0;
  clean.channel.noise_sigma = 0.0;
  const ExperimentReport a = run_experiment(clean);
  ScenarioConfig noisy = clean;
  noisy.channel = calibrated_channel();
  const ExperimentReport b = run_experiment(noisy);
  // The flag must agree with the widest-interval accuracies in the report itself.
  auto flag_consistent = [](const ExperimentReport& rep, double requirement) {
    std::map<std::pair<std::string, std::string>, double> widest;  // (distance, device) -> first row
    for (const auto& row : csv_rows(rep.files.at("rssi_accuracy.csv"))) {
      widest.try_emplace({row[0], row[3]}, std::stod(row[6]) / 100);
    }
    bool all = true;
    for (const auto& [k, v] : widest) all = all && v >= requirement;
    return rep.metric("requirement_met") == (all ? "true" : "false");
  };
  const bool clean_ok = a.metric("requirement_met") == "true" && flag_consistent(a, 0.8);
  const bool noisy_ok = flag_consistent(b, 0.8);
  o.pass = loop_ok && clean_ok && noisy_ok;
  o.detail = "band reached at tick " + std::to_string(reached) + ", last separation message at tick " +
             std::to_string(last_message) + (held ? ", held" : ", left the band") +
             "; 80% requirement: noise free " + a.metric("requirement_met").value_or("?") + ", calibrated noise " +
             b.metric("requirement_met").value_or("?") + (clean_ok && noisy_ok ? " (flags consistent)" : " (flag mismatch)");
  return o;
}

Outcome ac6_qlearning() {
  Outcome o;
  const RateEnergyModel model;
  const OfflineTraining params;
  const ValueIterationResult oracle = value_iteration_oracle(rate_energy_mdp(model, params.gamma));
  const auto optimal = optimal_actions(oracle.q);
  int matched = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    RngStream rng(seed, "qlearn");
    const QTable<double> q = train_offline(model, params, rng);
    bool all = true;
    for (int s = 0; s < q.state_count(); ++s) {
      const int a = static_cast<int>(q.greedy(q.state_at(s)));
      const auto& ok = optimal[static_cast<std::size_t>(s)];
      all = all && std::find(ok.begin(), ok.end(), a) != ok.end();
    }
    matched += all ? 1 : 0;
  }
  o.pass = matched == 10 && oracle.bellman_residual < 1e-10 && params.steps <= 50'000;
  o.detail = std::to_string(matched) + "/10 seeds greedy-optimal after " + std::to_string(params.steps) +
             " steps, oracle residual " + fmt("%.2g", oracle.bellman_residual);
  return o;
}

Outcome ac7_slam_static() {
  Outcome o;
  double drift = 0.0, agreement = 1.0;
  int edge = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    ScenarioConfig c = slam_static_fixture();
    c.sim.seed = seed;
    const ExperimentReport r = seed == 1 ? keep(c) : run_experiment(c);
    drift = std::max(drift, metric(r, "max_drift_cells"));
    agreement = std::min(agreement, metric(r, "agreement"));
    edge = static_cast<int>(metric(r, "edge_only_obstacles"));
  }
  o.pass = drift < 1.0 && agreement >= 0.90;
  o.detail = "over 10 seeds: max drift " + fmt("%.3f", drift) + " cells, min agreement " + fmt("%.2f", 100 * agreement) +
             "% (" + std::to_string(edge) + " edge-beam-only obstacles excluded)";
  return o;
}

Outcome ac8_slam_moving() {
  Outcome o;
  int closed = 0;
  std::string errors;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    ScenarioConfig c = slam_moving_fixture();
    c.sim.seed = seed;
    const ExperimentReport r = seed == 1 ? keep(c) : run_experiment(c);
    const double e = metric(r, "loop_closure_error_cells");
    closed += e < 5.0 ? 1 : 0;
    errors += (errors.empty() ? "" : " ") + fmt("%.2f", e);
  }
  o.pass = closed >= 8;
  o.detail = std::to_string(closed) + "/10 seeds close the loop within 5 cells (errors: " + errors + ")";
  return o;
}

Outcome ac9_determinism() {
  Outcome o;
  int identical = 0;
  std::size_t files = 0;
  for (const auto& [config, first] : g_runs) {
    const ExperimentReport again = run_experiment(config);
    if (again.files == first.files) ++identical;
    files += first.files.size();
  }
  o.pass = identical == static_cast<int>(g_runs.size()) && !g_runs.empty();
  o.detail = std::to_string(identical) + "/" + std::to_string(g_runs.size()) + " repeated runs byte-identical (" +
             std::to_string(files) + " files)";
  return o;
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {"AC1", "hardware accuracy arithmetic", 1.0, ac1_table_arithmetic},
      {"AC2", "rssi accuracy ordering", 10.0, ac2_rssi_ordering},
      {"AC3", "estimator exactness", 0.0, ac3_estimator},
      {"AC4", "reconnect liveness and oracle", 5.0, ac4_reconnect},
      {"AC5", "separation closed loop", 0.0, ac5_separation},
      {"AC6", "q-learning oracle equivalence", 30.0, ac6_qlearning},
      {"AC7", "slam static", 60.0, ac7_slam_static},
      {"AC8", "slam moving loop closure", 120.0, ac8_slam_moving},
      {"AC9", "global determinism", 0.0, ac9_determinism},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.check();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.time_limit_s > 0 && secs >= c.time_limit_s) {
      o.pass = false;
      o.detail += "; took " + fmt("%.2f", secs) + " s, limit " + fmt("%.0f", c.time_limit_s) + " s";
    }
    failed += o.pass ? 0 : 1;
    std::printf("%s %s  %s: %s [%.2f s]\n", c.id, o.pass ? "PASS" : "FAIL", c.title, o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
