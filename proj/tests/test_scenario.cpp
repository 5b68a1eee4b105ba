#include "doctest.h"

#include "swarmlink/fixtures.hpp"
#include "swarmlink/scenario.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

using namespace swarmlink;

namespace {

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

std::size_t line_count(const std::string& text) { return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n')); }

// Hand-traced heartbeat schedule for an outage [start, end) ticks with fixed latency.
double oracle_elapsed(std::int64_t start, std::int64_t end, const LinkParams& p, double dt) {
  const std::int64_t last_heartbeat = start - 1 + p.latency;
  const std::int64_t lost = last_heartbeat + p.miss_threshold + 1;
  const std::int64_t wait = std::max<std::int64_t>(0, end - lost);
  const std::int64_t beacon = lost + p.beacon_period * ((wait + p.beacon_period - 1) / p.beacon_period);
  const std::int64_t reconnect = beacon + 3 * p.latency;
  return static_cast<double>(reconnect - (last_heartbeat + 1)) * dt;
}

ScenarioConfig two_uav_free(double gap) {
  ScenarioConfig c;
  c.sim = {"pair", 3, 0.05, 40.0, 1};
  c.env = Environment{Rect{Vec2(0, 0), Vec2(30, 30)}, {}};
  c.uavs[1] = UavConfig{Vec2(10, 15), 0.0, {1.0, 1.0}, 100.0, 1.0};
  c.uavs[2] = UavConfig{Vec2(10 + gap, 15), 0.0, {1.0, 1.0}, 100.0, 1.0};
  c.experiment.kind = ExperimentKind::Free;
  return c;
}

}  // namespace

TEST_CASE("rssi accuracy report has nine rows per device") {
  ScenarioConfig c = rssi_accuracy_fixture();
  c.sim.duration = 20.0;
  const ExperimentReport r = run_experiment(c);
  CHECK(r.success);
  const auto rows = csv_rows(r.files.at("rssi_accuracy.csv"));
  CHECK(rows.size() == 18);
  std::map<std::string, int> per_device;
  for (const auto& row : rows) {
    ++per_device[row[3]];
    CHECK(std::stoll(row[4]) + std::stoll(row[5]) == 400);
  }
  CHECK(per_device["1"] == 9);
  CHECK(per_device["2"] == 9);
  const std::string& table = r.files.at("table2.tsv");
  CHECK(line_count(table) == 11);
  CHECK(table.find("4m\t-3 <-> -7\t") != std::string::npos);
  CHECK(r.metric("requirement_met").has_value());
}

TEST_CASE("rssi requirement flag") {
  ScenarioConfig c = rssi_accuracy_fixture();
  c.sim.duration = 10.0;
  c.channel.noise_sigma = 0.0;
  const ExperimentReport clean = run_experiment(c);
  CHECK(clean.metric("requirement_met") == "true");
  CHECK(clean.success);
  for (const auto& row : csv_rows(clean.files.at("rssi_accuracy.csv"))) {
    // Without noise every sample is the noiseless value, which sits inside the widest intervals.
    if (row[1] == "-8" || row[1] == "-15" || row[1] == "-20") CHECK(row[6] == "100.00");
  }
  c.sim.duration = 200.0;
  c.channel = calibrated_channel();
  const ExperimentReport noisy = run_experiment(c);
  CHECK(noisy.metric("requirement_met") == "false");
  CHECK(noisy.success);
}

TEST_CASE("default interval when a distance has none configured") {
  ScenarioConfig c = rssi_accuracy_fixture();
  c.sim.duration = 5.0;
  c.experiment.distances = {4, 8, 12, 16};
  const ExperimentReport r = run_experiment(c);
  const auto rows = csv_rows(r.files.at("rssi_accuracy.csv"));
  REQUIRE(rows.size() == 20);
  const double mu = mean_rssi(c.channel, 16.0);
  CHECK(std::stod(rows[18][1]) == doctest::Approx(mu - kDefaultIntervalHalfWidth));
  CHECK(std::stod(rows[18][2]) == doctest::Approx(mu + kDefaultIntervalHalfWidth));
}

TEST_CASE("reconnect runs match the schedule oracle and average correctly") {
  const ScenarioConfig c = reconnect_fixture();
  const ExperimentReport r = run_experiment(c);
  CHECK(r.success);
  CHECK(r.runs == 15);
  const auto runs = csv_rows(r.files.at("reconnect_runs.csv"));
  REQUIRE(runs.size() == 3 * 5 * 2);
  for (const auto& row : runs) {
    const auto& d = c.disruptions.at(row[1] == "1-2" ? 1 : 2);
    const double expected = oracle_elapsed(ticks_for_duration(d.start, c.sim.dt), ticks_for_duration(d.end, c.sim.dt),
                                           c.link, c.sim.dt);
    CHECK(std::stod(row[3]) == doctest::Approx(expected).epsilon(1e-12));
  }
  CHECK(oracle_elapsed(100, 140, c.link, 0.05) == doctest::Approx(2.1));

  const std::string& table = r.files.at("table1.tsv");
  CHECK(table == "Distance\tDevice 1 and Device 2\tDevice 2 and Device 3\n"
                 "4m\t2,1000s\t2,1000s\n8m\t2,1000s\t2,1000s\n12m\t2,1000s\t2,1000s\n");
}

TEST_CASE("reconnect mean recomputed from the per-run rows") {
  ScenarioConfig c = reconnect_fixture();
  c.link.jitter = 2;
  c.link.miss_threshold = 8;
  c.link.handshake_timeout = 12;
  const ExperimentReport r = run_experiment(c);
  CHECK(r.success);
  std::map<std::pair<std::string, std::string>, std::vector<double>> values;
  for (const auto& row : csv_rows(r.files.at("reconnect_runs.csv"))) values[{row[0], row[1]}].push_back(std::stod(row[3]));
  bool varied = false;
  for (const auto& row : csv_rows(r.files.at("reconnect_mean.csv"))) {
    const auto& v = values.at({row[0], row[1]});
    REQUIRE(v.size() == 5);
    double sum = 0;
    for (double x : v) sum += x;
    CHECK(std::stod(row[2]) == doctest::Approx(sum / 5).epsilon(1e-4));
    varied = varied || std::any_of(v.begin(), v.end(), [&](double x) { return x != v.front(); });
  }
  CHECK(varied);
}

TEST_CASE("an outage that never lifts fails the experiment") {
  ScenarioConfig c = reconnect_fixture();
  c.disruptions[2].end = c.sim.duration;
  const ExperimentReport r = run_experiment(c);
  CHECK_FALSE(r.success);
  CHECK(r.failures.size() == 15);
  CHECK(r.metric("unrecovered") == "15");
  CHECK(r.files.at("summary.txt").find("success = false") != std::string::npos);
}

TEST_CASE("free kind with zero uavs") {
  ScenarioConfig c;
  c.sim.duration = 1.0;
  const ExperimentReport r = run_experiment(c);
  CHECK(r.success);
  CHECK(r.files.size() == 1);
  CHECK(r.files.count("summary.txt") == 1);
  CHECK(r.ticks == 20);
}

TEST_CASE("separation closed loop in the free kind") {
  ScenarioConfig c = two_uav_free(2.0);
  c.channel.noise_sigma = 0.0;
  const ExperimentReport r = run_experiment(c);
  CHECK(r.success);
  const auto last = std::stoll(*r.metric("last_separation_tick"));
  CHECK(last >= 0);
  CHECK(last < 500);
  for (const auto& row : csv_rows(r.files.at("pair_distance.csv"))) {
    if (std::stoll(row[0]) < 500) continue;
    const double d = std::stod(row[2]);
    CHECK(d >= 4.0);
    CHECK(d <= 8.0);
  }
  CHECK(line_count(r.files.at("separation_events.csv")) > 1);
  CHECK(r.files.at("learning_trace.csv").size() > 60);
  CHECK(std::stod(*r.metric("residual_energy_uav_1")) < 100.0);
}

TEST_CASE("free kind assigns areas once") {
  ScenarioConfig c = two_uav_free(5.0);
  c.areas[1] = {Rect{Vec2(0, 0), Vec2(5, 5)}, Priority::Minor, std::nullopt};
  c.areas[2] = {Rect{Vec2(20, 20), Vec2(25, 25)}, Priority::Major, std::nullopt};
  c.areas[3] = {Rect{Vec2(8, 12), Vec2(12, 18)}, Priority::Major, std::nullopt};
  const ExperimentReport r = run_experiment(c);
  CHECK(r.files.at("assignment.csv") == "area_id,priority,uav_id\n1,minor,\n2,major,2\n3,major,1\n");
  CHECK(r.metric("unassigned_areas") == "1");
}

TEST_CASE("experiment kinds touch only their own phases") {
  auto events = [](const ExperimentReport& r, Phase p) { return r.phase_events[static_cast<std::size_t>(p)]; };
  ScenarioConfig slam = slam_static_fixture();
  const ExperimentReport s = run_experiment(slam);
  CHECK(events(s, Phase::Link) == 0);
  CHECK(events(s, Phase::Formation) == 0);
  CHECK(events(s, Phase::Learning) == 0);
  CHECK(events(s, Phase::Sensing) == 100);
  CHECK(events(s, Phase::Kinematics) == 100);

  ScenarioConfig rc = reconnect_fixture();
  rc.sim.runs = 1;
  const ExperimentReport l = run_experiment(rc);
  CHECK(events(l, Phase::Sensing) == 0);
  CHECK(events(l, Phase::Formation) == 0);
  CHECK(events(l, Phase::Link) >= 3 * 400);

  ScenarioConfig rs = rssi_accuracy_fixture();
  rs.sim.duration = 1.0;
  const ExperimentReport a = run_experiment(rs);
  CHECK(events(a, Phase::Link) == 0);
  CHECK(events(a, Phase::Sensing) == 3 * 20);
}

TEST_CASE("slam static report") {
  const ExperimentReport r = run_experiment(slam_static_fixture());
  CHECK(r.success);
  CHECK(r.files.at("map.pgm").starts_with("P5\n400 400\n255\n"));
  CHECK(r.files.at("pose_trace.csv").starts_with("tick,x_m,y_m,theta_rad,score\n"));
  CHECK(line_count(r.files.at("pose_trace.csv")) == 51);
  CHECK(std::stod(*r.metric("max_drift_cells")) < 1.0);
  CHECK(r.metric("edge_only_obstacles") == "2");
}

TEST_CASE("summary metadata") {
  ScenarioConfig c = slam_static_fixture();
  c.sim.duration = 1.03;
  const ExperimentReport r = run_experiment(c);
  const std::string& s = r.files.at("summary.txt");
  CHECK(s.find("seed = 1\n") != std::string::npos);
  CHECK(s.find("version = " + std::string(library_version()) + "\n") != std::string::npos);
  CHECK(s.find("ticks = 20\n") != std::string::npos);
  CHECK(s.find("remainder") != std::string::npos);
  CHECK(r.warnings.size() == 1);
}

TEST_CASE("reports are deterministic") {
  for (auto f : fixture_set()) {
    if (f.config.experiment.kind == ExperimentKind::RssiAccuracy) f.config.sim.duration = 50;
    if (f.config.experiment.kind == ExperimentKind::SlamMoving) f.config.sim.duration = 20;
    CAPTURE(f.file);
    const ExperimentReport a = run_experiment(f.config);
    const ExperimentReport b = run_experiment(f.config);
    CHECK(a == b);
    CHECK(a.files == b.files);
  }
  ScenarioConfig c = rssi_accuracy_fixture();
  c.sim.duration = 50;
  const ExperimentReport one = run_experiment(c);
  c.sim.seed = 2;
  CHECK(run_experiment(c).files.at("rssi_accuracy.csv") != one.files.at("rssi_accuracy.csv"));
}

TEST_CASE("invalid configs are rejected before running") {
  ScenarioConfig c = slam_static_fixture();
  c.sim.duration = -1;
  CHECK_THROWS_AS(run_experiment(c), ConfigError);
}

TEST_CASE("sweep") {
  ScenarioConfig c = rssi_accuracy_fixture();
  c.sim.duration = 5.0;
  const std::vector<std::string> distances{"4", "8", "12", "16"};
  const auto reports = sweep(c, "distance", distances);
  REQUIRE(reports.size() == 4);
  CHECK(csv_rows(reports[0].files.at("rssi_accuracy.csv")).size() == 6);
  CHECK(csv_rows(reports[3].files.at("rssi_accuracy.csv")).size() == 2);

  CHECK(sweep(c, "distance", std::vector<std::string>{}).empty());

  const std::vector<std::string> one{"1.5"};
  const auto single = sweep(c, "noise_sigma", one);
  REQUIRE(single.size() == 1);
  CHECK(single[0] == run_experiment(apply_sweep_value(c, "noise_sigma", "1.5")));
  CHECK(apply_sweep_value(c, "noise_sigma", "1.5").channel.noise_sigma == 1.5);

  const ScenarioConfig narrowed = apply_sweep_value(c, "interval", "-10:-15");
  CHECK(narrowed.experiment.intervals.size() == 3);
  CHECK(narrowed.experiment.intervals[0].interval == RssiInterval::between(-10, -15));

  CHECK_THROWS_AS(sweep(c, "gravity", one), std::invalid_argument);
  CHECK_THROWS_AS(apply_sweep_value(c, "distance", "far"), std::invalid_argument);
  CHECK_THROWS_AS(apply_sweep_value(c, "interval", "-10"), std::invalid_argument);
  CHECK_THROWS_AS(apply_sweep_value(slam_static_fixture(), "distance", "4"), std::invalid_argument);
  CHECK(sweep_parameters().size() == 3);
}

TEST_CASE("write_report") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "swarmlink_write_report";
  fs::remove_all(dir);
  ScenarioConfig c;
  c.sim.duration = 1.0;
  const ExperimentReport r = run_experiment(c);
  write_report(r, dir / "nested");
  std::ifstream in(dir / "nested" / "summary.txt");
  std::stringstream text;
  text << in.rdbuf();
  CHECK(text.str() == r.files.at("summary.txt"));

  std::ofstream(dir / "plain_file") << "x";
  CHECK_THROWS(write_report(r, dir / "plain_file"));
  fs::remove_all(dir);
}
