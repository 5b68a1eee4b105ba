#include "swarmlink/fixtures.hpp"

namespace swarmlink {

namespace {

RssiInterval iv(double a, double b) { return RssiInterval::between(a, b); }

// Room with 0.2 m thick walls on every side.
Environment room(double side) {
  const double t = 0.2;
  Environment env{Rect{Vec2(0, 0), Vec2(side, side)}, {}};
  env.obstacles = {
      Rect{Vec2(0, 0), Vec2(side, t)},
      Rect{Vec2(0, side - t), Vec2(side, side)},
      Rect{Vec2(0, 0), Vec2(t, side)},
      Rect{Vec2(side - t, 0), Vec2(side, side)},
  };
  return env;
}

Rect box(double x0, double x1, double y0, double y1) { return Rect{Vec2(x0, y0), Vec2(x1, y1)}; }

}  // namespace

std::span<const PrintedAccuracy> hardware_accuracy_cells() {
  static const std::vector<PrintedAccuracy> cells{
      {4, iv(-2, -8), 1, 0, 513, "0,00%"},       {4, iv(-2, -8), 2, 258, 257, "50,10%"},
      {4, iv(-3, -7), 1, 0, 513, "0,00%"},       {4, iv(-3, -7), 2, 216, 328, "39,37%"},
      {4, iv(-2, -6), 1, 0, 513, "0,00%"},       {4, iv(-2, -6), 2, 196, 348, "36,03%"},
      {8, iv(-10, -15), 1, 260, 258, "50,19%"},  {8, iv(-10, -15), 2, 139, 355, "28,14%"},
      {8, iv(-11, -14), 1, 166, 352, "32,05%"},  {8, iv(-11, -14), 2, 63, 431, "12,75%"},
      {8, iv(-12, -13), 1, 68, 450, "13,13%"},   {8, iv(-12, -13), 2, 18, 476, "3,64%"},
      {12, iv(-14, -20), 1, 309, 198, "60,95%"}, {12, iv(-14, -20), 2, 385, 124, "75,64%"},
      {12, iv(-15, -19), 1, 242, 265, "47,73%"}, {12, iv(-15, -19), 2, 232, 277, "45,58%"},
      {12, iv(-16, -18), 1, 138, 369, "27,22%"}, {12, iv(-16, -18), 2, 75, 434, "14,73%"},
  };
  return cells;
}

std::vector<std::pair<double, double>> interval_centre_anchors() { return {{4, -5}, {8, -12.5}, {12, -17}}; }

ChannelParams calibrated_channel() {
  const auto anchors = interval_centre_anchors();
  ChannelParams p = calibrate_params(anchors);
  p.noise_sigma = solve_noise_sigma(p, 8.0, iv(-10, -15), 0.5019);
  return p;
}

ScenarioConfig reconnect_fixture() {
  ScenarioConfig c;
  c.sim = {"reconnect", 1, 0.05, 20.0, 5};
  c.env = Environment{Rect{Vec2(0, 0), Vec2(30, 10)}, {}};
  for (int id = 1; id <= 3; ++id) c.uavs[id] = UavConfig{Vec2(1, 5), 0.0, {0.2, 0.1}, 100.0, 1.0};
  c.link = LinkParams{};
  c.disruptions[1] = {UavPair::of(1, 2), 5.0, 7.0};
  c.disruptions[2] = {UavPair::of(2, 3), 10.0, 12.0};
  c.experiment.kind = ExperimentKind::Reconnect;
  c.experiment.distances = {4, 8, 12};
  return c;
}

ScenarioConfig rssi_accuracy_fixture() {
  ScenarioConfig c;
  c.sim = {"rssi_accuracy", 1, 0.05, 1000.0, 1};
  c.env = Environment{Rect{Vec2(0, 0), Vec2(20, 10)}, {}};
  c.uavs[1] = UavConfig{Vec2(2, 5), 0.0, {0.0, 0.0}, 100.0, 1.0};
  c.uavs[2] = UavConfig{Vec2(6, 5), 180.0, {0.0, 0.0}, 100.0, 1.0};
  c.channel = calibrated_channel();
  c.experiment.kind = ExperimentKind::RssiAccuracy;
  c.experiment.distances = {4, 8, 12};
  std::vector<IntervalSpec> rows;
  for (const auto& cell : hardware_accuracy_cells()) {
    if (cell.device == 1) rows.push_back({cell.meters, cell.interval});
  }
  c.experiment.intervals = rows;
  c.experiment.devices = {1, 2};
  return c;
}

ScenarioConfig slam_moving_fixture() {
  ScenarioConfig c;
  c.sim = {"slam_moving", 1, 0.05, 94.95, 1};
  c.env = room(10.0);
  c.env.obstacles.push_back(box(4.5, 5.5, 4.5, 5.5));
  c.env.obstacles.push_back(box(1.0, 1.8, 1.0, 1.5));
  c.env.obstacles.push_back(box(8.2, 9.0, 8.0, 8.8));
  c.env.obstacles.push_back(box(1.0, 1.5, 8.0, 9.0));
  c.env.obstacles.push_back(box(8.5, 9.0, 1.0, 2.0));
  c.uavs[1] = UavConfig{Vec2(3, 3), 0.0, {0.2, 0.1}, 100.0, 1.0};
  PathConfig path;
  path.uav = 1;
  path.path.waypoints = {Vec2(3, 3), Vec2(7, 3), Vec2(7, 7), Vec2(3, 7)};
  path.path.closed = true;
  path.path.laps = 1;
  path.path.speed = 0.2;
  c.paths[1] = path;
  c.laser = LaserSpec{5.0, 240.0, 684, 10.0};
  c.experiment.kind = ExperimentKind::SlamMoving;
  return c;
}

ScenarioConfig slam_static_fixture() {
  ScenarioConfig c;
  c.sim = {"slam_static", 1, 0.05, 5.0, 1};
  c.env = room(10.0);
  for (const Rect& r : {box(2.0, 4.3, 5.0, 5.2), box(5.7, 8.0, 5.0, 5.2), box(3.5, 3.7, 6.5, 9.0),
                        box(6.3, 6.5, 6.5, 9.0), box(1.0, 1.6, 3.0, 3.6), box(8.4, 9.0, 3.5, 4.1),
                        // Reached only by the outermost beam on each side.
                        box(8.0, 8.04, 0.6, 1.2688), box(1.96, 2.0, 0.6, 1.2688)}) {
    c.env.obstacles.push_back(r);
  }
  c.uavs[1] = UavConfig{Vec2(5, 3), 90.0, {0.0, 0.0}, 100.0, 1.0};
  c.laser = LaserSpec{5.0, 240.0, 684, 10.0};
  c.experiment.kind = ExperimentKind::SlamStatic;
  return c;
}

std::vector<NamedFixture> fixture_set() {
  return {
      {"reconnect.scn", reconnect_fixture()},
      {"rssi_accuracy.scn", rssi_accuracy_fixture()},
      {"slam_moving.scn", slam_moving_fixture()},
      {"slam_static.scn", slam_static_fixture()},
  };
}

}  // namespace swarmlink
