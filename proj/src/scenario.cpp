#include "swarmlink/scenario.hpp"

#include "swarmlink/format.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <stdexcept>

#ifndef SWARMLINK_VERSION
#define SWARMLINK_VERSION "0.0.0"
#endif

namespace swarmlink {

std::string_view library_version() { return SWARMLINK_VERSION; }

std::optional<std::string> ExperimentReport::metric(std::string_view name) const {
  for (const auto& [k, v] : metrics) {
    if (k == name) return v;
  }
  return std::nullopt;
}

namespace {

using Mask = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>;

std::string num(double v) { return format_number(v); }

std::string distance_label(double d) { return format_number(d) + "m"; }

std::string seconds_comma(double s) {
  std::string text = format_fixed(s, 4);
  std::replace(text.begin(), text.end(), '.', ',');
  return text + "s";
}

Uav make_uav(int id, const UavConfig& u) {
  Uav out;
  out.state.id = id;
  out.state.position = u.position;
  out.state.heading = normalize_angle(deg_to_rad(u.heading_deg));
  out.state.residual_energy = u.energy;
  out.state.broadcast_rate = u.broadcast_rate;
  out.limits = u.limits;
  out.command = {0.0, out.state.heading};
  return out;
}

World make_world(const ScenarioConfig& c) {
  World w(c.env, c.sim.dt);
  for (const auto& [id, u] : c.uavs) w.uavs.push_back(make_uav(id, u));
  return w;
}

void tally(ExperimentReport& report, const World& world) {
  for (const auto& e : world.trace()) ++report.phase_events[static_cast<std::size_t>(e.phase)];
  ++report.runs;
}

std::int64_t seconds_to_tick(double seconds, double dt) { return ticks_for_duration(seconds, dt); }

std::vector<DisruptionWindow> disruption_windows(const ScenarioConfig& c) {
  std::vector<DisruptionWindow> out;
  for (const auto& [id, d] : c.disruptions) {
    out.push_back({d.pair, seconds_to_tick(d.start, c.sim.dt), seconds_to_tick(d.end, c.sim.dt)});
  }
  return out;
}

// ---------------------------------------------------------------------------

void run_reconnect(const ScenarioConfig& c, ExperimentReport& report) {
  const std::int64_t ticks = report.ticks;
  std::vector<int> ids;
  for (const auto& [id, u] : c.uavs) ids.push_back(id);
  const auto pairs = chain_pairs(ids);
  const auto windows = disruption_windows(c);

  std::string runs_csv = "distance_m,pair,run_index,elapsed_s\n";
  std::string events_csv = "distance_m,run_index,tick,pair,from,to\n";
  // (distance index, pair) -> elapsed values over runs
  std::map<std::pair<std::size_t, UavPair>, std::vector<double>> elapsed;
  std::int64_t outages = 0, unrecovered = 0;

  for (std::size_t di = 0; di < c.experiment.distances.size(); ++di) {
    const double d = c.experiment.distances[di];
    for (int run = 0; run < c.sim.runs; ++run) {
      World world = make_world(c);
      const Vec2 origin = world.uavs.front().state.position;
      for (std::size_t i = 0; i < world.uavs.size(); ++i) {
        world.uavs[i].state.position = origin + Vec2(static_cast<double>(i) * d, 0.0);
        if (!c.env.bounds.contains(world.uavs[i].state.position)) {
          throw ConfigError({{0, "reconnect layout at " + num(d) + " m spacing leaves the environment bounds"}});
        }
      }
      const std::string label = "reconnect/d=" + num(d) + "/run=" + std::to_string(run);
      LinkEngine engine(pairs, c.link, windows, RngStream(c.sim.seed, label + "/jitter"));
      world.add_hook(Phase::Link, [&engine](World& w) { engine.tick(w); });
      run_ticks(world, ticks);
      tally(report, world);

      for (const auto& rec : engine.records()) {
        for (const auto& t : rec.transitions) {
          events_csv += num(d) + "," + std::to_string(run) + "," + std::to_string(t.tick) + "," + rec.pair.key() +
                        "," + std::string(link_state_name(t.from)) + "," + std::string(link_state_name(t.to)) + "\n";
        }
      }
      for (const auto& row : measure_reestablishment(engine.records(), c.sim.dt)) {
        ++outages;
        runs_csv += num(d) + "," + row.pair.key() + "," + std::to_string(run) + ",";
        if (row.elapsed_s) {
          runs_csv += format_fixed(*row.elapsed_s, 4);
          elapsed[{di, row.pair}].push_back(*row.elapsed_s);
        } else {
          ++unrecovered;
          report.failures.push_back("link " + row.pair.key() + " at " + num(d) + " m, run " + std::to_string(run) +
                                    ": disruption at tick " + std::to_string(row.disruption_tick) +
                                    " never recovered");
        }
        runs_csv += "\n";
      }
    }
  }

  std::string mean_csv = "distance_m,pair,mean_elapsed_s\n";
  std::string table = "Distance";
  for (const auto& p : pairs) table += "\t" + p.device_label();
  table += "\n";
  for (std::size_t di = 0; di < c.experiment.distances.size(); ++di) {
    const double d = c.experiment.distances[di];
    table += distance_label(d);
    for (const auto& p : pairs) {
      auto it = elapsed.find({di, p});
      table += "\t";
      if (it == elapsed.end() || it->second.empty()) {
        table += "-";
        continue;
      }
      const double mean = std::accumulate(it->second.begin(), it->second.end(), 0.0) /
                          static_cast<double>(it->second.size());
      mean_csv += num(d) + "," + p.key() + "," + format_fixed(mean, 4) + "\n";
      table += seconds_comma(mean);
    }
    table += "\n";
  }

  report.files["reconnect_runs.csv"] = runs_csv;
  report.files["reconnect_mean.csv"] = mean_csv;
  report.files["table1.tsv"] = table;
  report.files["link_events.csv"] = events_csv;
  report.metrics.emplace_back("outages", std::to_string(outages));
  report.metrics.emplace_back("unrecovered", std::to_string(unrecovered));
  report.success = unrecovered == 0;
}

// ---------------------------------------------------------------------------

std::vector<int> rssi_devices(const ScenarioConfig& c) {
  if (!c.experiment.devices.empty()) return {c.experiment.devices[0], c.experiment.devices[1]};
  auto it = c.uavs.begin();
  const int a = it->first;
  return {a, (++it)->first};
}

void run_rssi(const ScenarioConfig& c, ExperimentReport& report) {
  const auto devices = rssi_devices(c);
  std::vector<AccuracyRow> rows;
  bool requirement_met = true;
  std::map<int, bool> device_met;
  for (int dev : devices) device_met[dev] = true;

  for (double d : c.experiment.distances) {
    World world(c.env, c.sim.dt);
    world.uavs.push_back(make_uav(devices[0], c.uavs.at(devices[0])));
    world.uavs.push_back(make_uav(devices[1], c.uavs.at(devices[1])));
    world.uavs[1].state.position = world.uavs[0].state.position + Vec2(d, 0.0);
    if (!c.env.bounds.contains(world.uavs[1].state.position)) {
      throw ConfigError({{0, "rssi devices at " + num(d) + " m leave the environment bounds"}});
    }

    std::map<int, std::vector<RssiSample>> samples;
    std::map<int, RngStream> streams;
    for (int dev : devices) {
      streams.emplace(dev, RngStream(c.sim.seed, "rssi/d=" + num(d) + "/sigma=" + num(c.channel.noise_sigma) +
                                                     "/device=" + std::to_string(dev)));
    }
    world.add_hook(Phase::Sensing, [&](World& w) {
      for (std::size_t i = 0; i < 2; ++i) {
        const auto& self = w.uavs[i].state;
        const auto& peer = w.uavs[1 - i].state;
        const double true_d = (peer.position - self.position).norm();
        samples[self.id].push_back(
            {w.clock.tick, self.id, peer.id, d, sample_rssi(c.channel, true_d, streams.at(self.id))});
      }
    });
    run_ticks(world, report.ticks);
    tally(report, world);

    std::vector<RssiInterval> intervals;
    for (const auto& iv : c.experiment.intervals) {
      if (iv.distance == d) intervals.push_back(iv.interval);
    }
    if (intervals.empty()) {
      const double mu = mean_rssi(c.channel, d);
      intervals.push_back({mu - kDefaultIntervalHalfWidth, mu + kDefaultIntervalHalfWidth});
    }
    const auto widest = std::max_element(intervals.begin(), intervals.end(), [](const auto& a, const auto& b) {
      return a.width() < b.width();
    });
    for (const auto& iv : intervals) {
      for (int dev : devices) {
        AccuracyRow row = accumulate_interval_stats(samples[dev], iv);
        row.distance = d;
        row.device = dev;
        if (&iv == &*widest && !(row.accuracy().value_or(0.0) >= c.experiment.requirement)) {
          device_met[dev] = false;
          requirement_met = false;
        }
        rows.push_back(row);
      }
    }
  }

  report.files["rssi_accuracy.csv"] = accuracy_csv(rows);

  std::string table = "Meters\tRSSI Interval";
  for (int dev : devices) table += "\tDevice " + std::to_string(dev) + "\t\t";
  table += "\n\t";
  for (std::size_t i = 0; i < devices.size(); ++i) table += "\tSuccesses\tFailures\tAccuracy";
  table += "\n";
  for (std::size_t i = 0; i < rows.size(); i += devices.size()) {
    table += distance_label(rows[i].distance) + "\t" + rows[i].interval.label();
    for (std::size_t k = 0; k < devices.size(); ++k) {
      const auto& r = rows[i + k];
      table += "\t" + std::to_string(r.successes) + "\t" + std::to_string(r.failures) + "\t" +
               format_percent_comma(r.accuracy());
    }
    table += "\n";
  }
  report.files["table2.tsv"] = table;

  report.metrics.emplace_back("requirement", num(c.experiment.requirement));
  for (int dev : devices) {
    report.metrics.emplace_back("requirement_device_" + std::to_string(dev), device_met[dev] ? "pass" : "fail");
  }
  report.metrics.emplace_back("requirement_met", requirement_met ? "true" : "false");
}

// ---------------------------------------------------------------------------

struct SlamTraceRow {
  std::int64_t tick;
  Pose corrected;
  Pose truth;
  std::int64_t score;
};

int scan_period_ticks(const LaserSpec& laser, double dt) {
  return std::max(1, static_cast<int>(std::lround(1.0 / (laser.scan_rate_hz * dt))));
}

Pose pose_of(const UavState& s) { return {s.position.x(), s.position.y(), s.heading}; }

void run_slam(const ScenarioConfig& c, ExperimentReport& report) {
  World world = make_world(c);
  Uav& uav = world.uavs.front();
  const SlamParams& sp = c.slam;
  const double span = sp.grid_side * sp.resolution;
  const Vec2 origin = c.env.bounds.center() - Vec2(span / 2.0, span / 2.0);
  SlamState slam{OccupancyGrid(sp.grid_side, sp.resolution, origin), pose_of(uav.state), 0};

  const PathConfig* path = c.paths.empty() ? nullptr : &c.paths.begin()->second;
  PathFollower follower;
  RngStream odom_rng(c.sim.seed, "slam/odometry");
  RngStream search_rng(c.sim.seed, "slam/search");
  const int period = scan_period_ticks(c.laser, c.sim.dt);

  std::vector<SlamTraceRow> trace;
  Pose prev_truth = pose_of(uav.state);
  Mask seen = Mask::Constant(sp.grid_side, sp.grid_side, false);
  int scans = 0, error_scans = 0, edge_only = 0;
  const bool moving = c.experiment.kind == ExperimentKind::SlamMoving;

  world.add_hook(Phase::Sensing, [&](World& w) {
    if (w.clock.tick % period != 0) return;
    const Pose truth = pose_of(uav.state);
    const LaserScan scan = simulate_scan(w.env, truth, c.laser);
    Pose delta = Pose::between(prev_truth, truth);
    const bool moved = std::abs(delta.x) > 0.0 || std::abs(delta.y) > 0.0 || std::abs(delta.theta) > 0.0;
    const double nx = odom_rng.normal(0.0, sp.odom_sigma_xy);
    const double ny = odom_rng.normal(0.0, sp.odom_sigma_xy);
    const double nt = odom_rng.normal(0.0, sp.odom_sigma_theta);
    if (moved) {
      delta.x += nx;
      delta.y += ny;
      delta.theta = normalize_angle(delta.theta + nt);
    }
    prev_truth = truth;
    const Pose hint = scans == 0 ? slam.pose : slam.pose.compose(delta);
    const SlamStepResult step = scans == 0 ? [&] {
      // The first scan fixes the map frame at the known start pose.
      map_update(slam.grid, scan, slam.pose, sp.quality, sp.hole_width);
      ++slam.steps;
      return SlamStepResult{hint, hint, scan_score(slam.grid, scan, hint)};
    }()
                                           : slam_step(slam, scan, delta, search_rng, sp);
    trace.push_back({w.clock.tick, step.corrected, truth, step.score});
    if (scan.error) ++error_scans;
    if (!moving || scans % 10 == 0) {
      const Mask region = sensed_region(w.env, scan, truth, slam.grid);
      seen = seen.array() || region.array();
      if (!moving) {
        const auto hits = beams_per_obstacle(w.env, scan, truth);
        const int last = c.laser.beam_count - 1;
        edge_only = static_cast<int>(std::count_if(hits.begin(), hits.end(), [&](const std::vector<int>& b) {
          return !b.empty() && std::all_of(b.begin(), b.end(), [&](int i) { return i == 0 || i == last; });
        }));
      }
    }
    ++scans;
  });
  if (path) {
    world.add_hook(Phase::Formation, [&](World& w) {
      uav.command = follow_path(uav.state, path->path, follower, uav.limits, w.clock.dt);
    });
  }
  run_ticks(world, report.ticks);
  tally(report, world);

  std::string pose_csv = "tick,x_m,y_m,theta_rad,score\n";
  std::string true_csv = "tick,x_m,y_m,theta_rad\n";
  double drift = 0.0;
  for (const auto& r : trace) {
    pose_csv += std::to_string(r.tick) + "," + num(r.corrected.x) + "," + num(r.corrected.y) + "," +
                num(r.corrected.theta) + "," + std::to_string(r.score) + "\n";
    true_csv += std::to_string(r.tick) + "," + num(r.truth.x) + "," + num(r.truth.y) + "," + num(r.truth.theta) + "\n";
    drift = std::max(drift, (r.corrected.position() - r.truth.position()).norm());
  }
  const OccupancyGrid truth_grid = rasterize_truth(c.env, sp.grid_side, sp.resolution, origin);
  const MapAgreement agreement = map_agreement(slam.grid, truth_grid, seen);

  report.files["map.pgm"] = to_pgm(slam.grid);
  report.files["truth.pgm"] = to_pgm(truth_grid);
  report.files["pose_trace.csv"] = pose_csv;
  report.files["true_trace.csv"] = true_csv;

  report.metrics.emplace_back("scans", std::to_string(scans));
  report.metrics.emplace_back("max_drift_m", num(drift));
  report.metrics.emplace_back("max_drift_cells", num(drift / sp.resolution));
  if (!trace.empty()) {
    const auto& last = trace.back();
    const double err = (last.corrected.position() - last.truth.position()).norm();
    report.metrics.emplace_back("final_error_m", num(err));
    report.metrics.emplace_back("final_error_cells", num(err / sp.resolution));
    report.metrics.emplace_back("final_heading_error_rad",
                                num(std::abs(normalize_angle(last.corrected.theta - last.truth.theta))));
    report.metrics.emplace_back("return_to_start_m", num((last.truth.position() - trace.front().truth.position()).norm()));
    if (path) {
      const double loop = (last.corrected.position() - trace.front().truth.position()).norm();
      report.metrics.emplace_back("loop_closure_error_m", num(loop));
      report.metrics.emplace_back("loop_closure_error_cells", num(loop / sp.resolution));
    }
  }
  if (path) {
    report.metrics.emplace_back("laps_completed", std::to_string(follower.laps_done));
    report.metrics.emplace_back("path_done", follower.mode == PathFollower::Mode::Done ? "true" : "false");
  }
  report.metrics.emplace_back("sensed_cells", std::to_string(agreement.cells));
  report.metrics.emplace_back("agreeing_cells", std::to_string(agreement.agreeing));
  report.metrics.emplace_back("agreement", num(agreement.ratio()));
  if (!moving) report.metrics.emplace_back("edge_only_obstacles", std::to_string(edge_only));
  if (error_scans > 0) {
    report.failures.push_back(std::to_string(error_scans) + " scans taken from inside an obstacle");
    report.success = false;
  }
}

// ---------------------------------------------------------------------------

struct Agent {
  QTable<double> q;
  LearnState state;
  LearnAction action = LearnAction::Hold;
  double capacity = 0.0;
  double credit = 0.0;
  std::int64_t delivered = 0;
  std::int64_t lost = 0;
  double spent = 0.0;
};

void run_free(const ScenarioConfig& c, ExperimentReport& report) {
  World world = make_world(c);
  if (world.uavs.empty()) {
    run_ticks(world, report.ticks);
    tally(report, world);
    report.metrics.emplace_back("uavs", "0");
    return;
  }
  const std::size_t n = world.uavs.size();
  std::vector<int> ids;
  for (const auto& u : world.uavs) ids.push_back(u.state.id);
  const auto pairs = chain_pairs(ids);
  const bool networked = n >= 2;

  // Areas are assigned once, from the starting positions.
  {
    std::vector<ObservationArea> areas;
    for (const auto& [id, a] : c.areas) areas.push_back({id, a.rect, a.priority, a.uav});
    std::vector<UavState> states;
    for (const auto& u : world.uavs) states.push_back(u.state);
    const auto assignment = assign_areas(areas, states);
    report.files["assignment.csv"] = assignment_csv(assignment);
    const auto unassigned = std::count_if(assignment.begin(), assignment.end(), [](const auto& a) { return !a.uav_id; });
    report.metrics.emplace_back("unassigned_areas", std::to_string(unassigned));
  }

  std::optional<LinkEngine> engine;
  if (networked) engine.emplace(pairs, c.link, disruption_windows(c), RngStream(c.sim.seed, "free/jitter"));

  std::map<int, PathFollower> followers;
  std::map<int, const WaypointPath*> paths;
  for (const auto& [id, p] : c.paths) paths[p.uav] = &p.path;

  std::vector<RngStream> rssi_rng;
  for (int id : ids) rssi_rng.emplace_back(c.sim.seed, "free/rssi/uav=" + std::to_string(id));
  std::vector<std::vector<NeighborEstimate>> estimates(n);
  std::map<int, SeparationLatch> latches;
  std::string separation_csv = "tick,sender,receiver,kind,estimated_m,true_m\n";
  std::int64_t separation_messages = 0;
  std::int64_t last_separation_tick = -1;

  const auto chain_neighbors = [&](std::size_t i, std::size_t j) { return i + 1 == j || j + 1 == i; };

  if (networked) {
    world.add_hook(Phase::Sensing, [&](World& w) {
      for (std::size_t i = 0; i < n; ++i) {
        estimates[i].clear();
        const auto& self = w.uavs[i].state;
        for (std::size_t j = 0; j < n; ++j) {
          if (i == j) continue;
          const auto& other = w.uavs[j].state;
          const double true_d = (other.position - self.position).norm();
          const double rssi = sample_rssi(c.channel, std::max(true_d, 1e-6), rssi_rng[i]);
          const double est = c.separation.use_true_distance ? true_d : estimate_distance(c.channel, rssi);
          if (true_d > c.link.comm_range) continue;
          estimates[i].push_back({other.id, est, other.position, chain_neighbors(i, j), true_d});
        }
      }
    });
    world.add_hook(Phase::Link, [&](World& w) { engine->tick(w); });
  }

  world.add_hook(Phase::Formation, [&](World& w) {
    std::vector<MotionCommand> next(n);
    for (std::size_t i = 0; i < n; ++i) {
      Uav& u = w.uavs[i];
      std::optional<MotionCommand> cmd;
      if (networked) {
        const auto out = separation_control(u.state, estimates[i], c.separation.policy, latches[u.state.id],
                                            u.limits.v_max);
        for (auto msg : out.outbox) {
          msg.sent_tick = w.clock.tick;
          const auto est = std::find_if(estimates[i].begin(), estimates[i].end(),
                                        [&](const NeighborEstimate& e) { return e.uav_id == msg.receiver; });
          separation_csv += std::to_string(w.clock.tick) + "," + std::to_string(msg.sender) + "," +
                            std::to_string(msg.receiver) + "," + std::string(message_kind_name(msg.kind)) + "," +
                            format_fixed(est->estimated_m, 4) + "," + format_fixed(est->true_m, 4) + "\n";
          ++separation_messages;
          last_separation_tick = w.clock.tick;
          engine->send(w, std::move(msg));
        }
        cmd = out.command;
      }
      auto p = paths.find(u.state.id);
      if (p != paths.end()) {
        // The path follower keeps its own state even while separation overrides it.
        const MotionCommand follow = follow_path(u.state, *p->second, followers[u.state.id], u.limits, w.clock.dt);
        if (!cmd) cmd = follow;
      }
      next[i] = cmd.value_or(MotionCommand{0.0, u.state.heading});
    }
    for (std::size_t i = 0; i < n; ++i) w.uavs[i].command = next[i];
  });

  // Learning: each uav streams sensor data to its chain neighbour at the learnt broadcast rate.
  const LearnConfig& lc = c.learn;
  const int rate_buckets = static_cast<int>(lc.rates.size());
  std::vector<Agent> agents;
  std::vector<RngStream> learn_rng;
  std::vector<LearnTraceRow> learn_rows;
  for (const auto& u : world.uavs) {
    Agent a{QTable<double>(rate_buckets, lc.energy_buckets, lc.alpha, lc.gamma, lc.epsilon, lc.schedule), {}, {},
            u.state.residual_energy, 0.0, 0, 0, 0.0};
    int bucket = 0;
    for (int b = 1; b < rate_buckets; ++b) {
      if (std::abs(lc.rates[static_cast<std::size_t>(b)] - u.state.broadcast_rate) <
          std::abs(lc.rates[static_cast<std::size_t>(bucket)] - u.state.broadcast_rate)) {
        bucket = b;
      }
    }
    a.state = {bucket, energy_bucket(u.state.residual_energy, a.capacity, lc.energy_buckets)};
    agents.push_back(std::move(a));
    learn_rng.emplace_back(c.sim.seed, "free/learn/uav=" + std::to_string(u.state.id));
  }

  if (networked) {
    world.add_hook(Phase::Learning, [&](World& w) {
      const std::int64_t now = w.clock.tick;
      for (std::size_t i = 0; i < n; ++i) {
        Agent& a = agents[i];
        UavState& s = w.uavs[i].state;
        if (now % lc.period_ticks == 0) {
          if (now > 0) {
            const double r = reward(static_cast<double>(a.delivered), static_cast<double>(a.lost), a.spent, lc.weights);
            const LearnState next{a.state.rate_bucket, energy_bucket(s.residual_energy, a.capacity, lc.energy_buckets)};
            q_update(a.q, a.state, a.action, r, next);
            learn_rows.push_back({now, s.id, a.state, a.action, r, a.q(a.state, a.action)});
            a.state = next;
            a.delivered = a.lost = 0;
            a.spent = 0.0;
          }
          a.action = select_action(a.q, a.state, learn_rng[i]);
          a.state.rate_bucket = apply_action(a.state.rate_bucket, a.action, rate_buckets);
          s.broadcast_rate = lc.rates[static_cast<std::size_t>(a.state.rate_bucket)];
        }
        a.credit += s.broadcast_rate * w.clock.dt;
        const int target = i + 1 < n ? w.uavs[i + 1].state.id : w.uavs[i - 1].state.id;
        while (a.credit >= 1.0) {
          a.credit -= 1.0;
          if (s.residual_energy < lc.energy_per_message) {
            ++a.lost;
            continue;
          }
          s.residual_energy -= lc.energy_per_message;
          a.spent += lc.energy_per_message;
          const Delivery d = engine->send(w, SwarmMessage{MessageKind::SensorData, s.id, target, now, {}});
          (d == Delivery::Delivered ? a.delivered : a.lost) += 1;
        }
      }
    });
  }

  std::string distance_csv = "tick,pair,true_m\n";
  if (networked) {
    world.add_hook(Phase::Metrics, [&](World& w) {
      for (const auto& p : pairs) {
        const double d = (w.find(p.first)->state.position - w.find(p.second)->state.position).norm();
        distance_csv += std::to_string(w.clock.tick) + "," + p.key() + "," + format_fixed(d, 6) + "\n";
      }
    });
  }

  run_ticks(world, report.ticks);
  tally(report, world);

  report.metrics.emplace_back("uavs", std::to_string(n));
  if (networked) {
    report.files["separation_events.csv"] = separation_csv;
    report.files["pair_distance.csv"] = distance_csv;
    report.files["learning_trace.csv"] = learn_trace_csv(learn_rows);
    std::string link_csv = "pair,state,outages,recovered\n";
    for (const auto& rec : engine->records()) {
      const auto recovered = std::count_if(rec.outages.begin(), rec.outages.end(),
                                           [](const Outage& o) { return o.reconnect_tick.has_value(); });
      link_csv += rec.pair.key() + "," + std::string(link_state_name(rec.state)) + "," +
                  std::to_string(rec.outages.size()) + "," + std::to_string(recovered) + "\n";
    }
    report.files["link_state.csv"] = link_csv;
    report.metrics.emplace_back("separation_messages", std::to_string(separation_messages));
    report.metrics.emplace_back("last_separation_tick", std::to_string(last_separation_tick));
  }
  for (const auto& u : world.uavs) {
    report.metrics.emplace_back("residual_energy_uav_" + std::to_string(u.state.id), num(u.state.residual_energy));
  }
  for (const auto& [uav, f] : followers) {
    report.metrics.emplace_back("path_done_uav_" + std::to_string(uav),
                                f.mode == PathFollower::Mode::Done ? "true" : "false");
  }
}

std::string summary_text(const ScenarioConfig& c, const ExperimentReport& r) {
  std::string s;
  s += "scenario = " + r.scenario + "\n";
  s += "kind = " + std::string(experiment_kind_name(r.kind)) + "\n";
  s += "seed = " + std::to_string(r.seed) + "\n";
  s += "version = " + std::string(library_version()) + "\n";
  s += "dt = " + num(c.sim.dt) + "\n";
  s += "ticks = " + std::to_string(r.ticks) + "\n";
  s += "runs = " + std::to_string(r.runs) + "\n";
  s += "success = " + std::string(r.success ? "true" : "false") + "\n";
  for (const auto& f : r.failures) s += "failure = " + f + "\n";
  for (const auto& w : r.warnings) s += "warning = " + w.message + "\n";
  for (const auto& [k, v] : r.metrics) s += k + " = " + v + "\n";
  for (int p = 0; p < kPhaseCount; ++p) {
    s += "events." + std::string(phase_name(static_cast<Phase>(p))) + " = " +
         std::to_string(r.phase_events[static_cast<std::size_t>(p)]) + "\n";
  }
  return s;
}

}  // namespace

ExperimentReport run_experiment(const ScenarioConfig& config) {
  if (auto errors = validate_config(config); !errors.empty()) throw ConfigError(std::move(errors));
  ExperimentReport report;
  report.scenario = config.sim.name;
  report.kind = config.experiment.kind;
  report.seed = config.sim.seed;
  report.ticks = ticks_for_duration(config.sim.duration, config.sim.dt);
  report.warnings = config_warnings(config);

  switch (config.experiment.kind) {
    case ExperimentKind::Reconnect: run_reconnect(config, report); break;
    case ExperimentKind::RssiAccuracy: run_rssi(config, report); break;
    case ExperimentKind::SlamMoving:
    case ExperimentKind::SlamStatic: run_slam(config, report); break;
    case ExperimentKind::Free: run_free(config, report); break;
  }
  report.files["summary.txt"] = summary_text(config, report);
  return report;
}

namespace {
constexpr std::string_view kSweepParameters[] = {"distance", "noise_sigma", "interval"};

double parse_value(std::string_view text) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(v)) {
    throw std::invalid_argument("not a number: '" + std::string(text) + "'");
  }
  return v;
}
}  // namespace

std::span<const std::string_view> sweep_parameters() { return kSweepParameters; }

ScenarioConfig apply_sweep_value(const ScenarioConfig& config, std::string_view parameter, std::string_view value) {
  ScenarioConfig c = config;
  const bool distance_kind = c.experiment.kind == ExperimentKind::Reconnect ||
                             c.experiment.kind == ExperimentKind::RssiAccuracy;
  if (parameter == "noise_sigma") {
    c.channel.noise_sigma = parse_value(value);
  } else if (parameter == "distance") {
    if (!distance_kind) throw std::invalid_argument("distance sweeps need a reconnect or rssi_accuracy scenario");
    const double d = parse_value(value);
    c.experiment.distances = {d};
    std::erase_if(c.experiment.intervals, [&](const IntervalSpec& iv) { return iv.distance != d; });
  } else if (parameter == "interval") {
    if (c.experiment.kind != ExperimentKind::RssiAccuracy) {
      throw std::invalid_argument("interval sweeps need an rssi_accuracy scenario");
    }
    const auto colon = value.find(':');
    if (colon == std::string_view::npos) throw std::invalid_argument("interval values look like -10:-15");
    const RssiInterval iv = RssiInterval::between(parse_value(value.substr(0, colon)), parse_value(value.substr(colon + 1)));
    c.experiment.intervals.clear();
    for (double d : c.experiment.distances) c.experiment.intervals.push_back({d, iv});
  } else {
    throw std::invalid_argument("unknown sweep parameter '" + std::string(parameter) +
                                "' (expected distance, noise_sigma or interval)");
  }
  return c;
}

std::vector<ExperimentReport> sweep(const ScenarioConfig& config, std::string_view parameter,
                                    std::span<const std::string> values) {
  if (std::find(std::begin(kSweepParameters), std::end(kSweepParameters), parameter) == std::end(kSweepParameters)) {
    throw std::invalid_argument("unknown sweep parameter '" + std::string(parameter) +
                                "' (expected distance, noise_sigma or interval)");
  }
  std::vector<ScenarioConfig> configs;
  for (const auto& v : values) configs.push_back(apply_sweep_value(config, parameter, v));
  std::vector<ExperimentReport> reports;
  for (const auto& c : configs) reports.push_back(run_experiment(c));
  return reports;
}

void write_report(const ExperimentReport& report, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  for (const auto& [name, content] : report.files) {
    const auto path = dir / name;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw std::runtime_error("failed writing " + path.string());
  }
}

}  // namespace swarmlink
