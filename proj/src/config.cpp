#include "swarmlink/config.hpp"

#include "swarmlink/format.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <set>
#include <sstream>

namespace swarmlink {

std::string_view experiment_kind_name(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::Reconnect: return "reconnect";
    case ExperimentKind::RssiAccuracy: return "rssi_accuracy";
    case ExperimentKind::SlamMoving: return "slam_moving";
    case ExperimentKind::SlamStatic: return "slam_static";
    case ExperimentKind::Free: return "free";
  }
  return "?";
}

std::optional<ExperimentKind> parse_experiment_kind(std::string_view text) {
  for (auto k : {ExperimentKind::Reconnect, ExperimentKind::RssiAccuracy, ExperimentKind::SlamMoving,
                 ExperimentKind::SlamStatic, ExperimentKind::Free}) {
    if (experiment_kind_name(k) == text) return k;
  }
  return std::nullopt;
}

std::string format_diagnostic(const Diagnostic& d) {
  return d.line > 0 ? "line " + std::to_string(d.line) + ": " + d.message : d.message;
}

namespace {

std::string join_diagnostics(const std::vector<Diagnostic>& ds) {
  std::string out;
  for (const auto& d : ds) {
    if (!out.empty()) out += "\n";
    out += format_diagnostic(d);
  }
  return out;
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    parts.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

struct BadValue {
  std::string message;
};

double to_double(std::string_view s) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) {
    throw BadValue{"expected a number, got '" + std::string(s) + "'"};
  }
  return v;
}

template <typename Int>
Int to_int(std::string_view s) {
  Int v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) {
    throw BadValue{"expected an integer, got '" + std::string(s) + "'"};
  }
  return v;
}

bool to_bool(std::string_view s) {
  if (s == "true") return true;
  if (s == "false") return false;
  throw BadValue{"expected true or false, got '" + std::string(s) + "'"};
}

std::vector<double> to_doubles(std::string_view s, std::size_t expected = 0) {
  std::vector<double> out;
  if (trim(s).empty()) {
    if (expected == 0) return out;
    throw BadValue{"expected " + std::to_string(expected) + " numbers"};
  }
  for (auto part : split(s, ',')) out.push_back(to_double(part));
  if (expected != 0 && out.size() != expected) {
    throw BadValue{"expected " + std::to_string(expected) + " comma-separated numbers, got " +
                   std::to_string(out.size())};
  }
  return out;
}

Vec2 to_point(std::string_view s) {
  const auto v = to_doubles(s, 2);
  return {v[0], v[1]};
}

Rect to_rect(std::string_view s) {
  const auto v = to_doubles(s, 4);
  return Rect::from_corners(Vec2(v[0], v[1]), Vec2(v[2], v[3]));
}

std::vector<Vec2> to_points(std::string_view s) {
  std::vector<Vec2> out;
  for (auto part : split(s, ';')) {
    if (part.empty()) throw BadValue{"empty waypoint"};
    out.push_back(to_point(part));
  }
  return out;
}

Priority to_priority(std::string_view s) {
  if (s == "major") return Priority::Major;
  if (s == "minor") return Priority::Minor;
  throw BadValue{"expected major or minor, got '" + std::string(s) + "'"};
}

AlphaSchedule to_schedule(std::string_view s) {
  if (s == "fixed") return AlphaSchedule::Fixed;
  if (s == "inverse_visits") return AlphaSchedule::InverseVisits;
  throw BadValue{"expected fixed or inverse_visits, got '" + std::string(s) + "'"};
}

using Setter = std::function<void(std::string_view)>;
using KeyTable = std::map<std::string, Setter, std::less<>>;

KeyTable sim_keys(SimConfig& s) {
  return {{"name", [&](auto v) { s.name = std::string(v); }},
          {"seed", [&](auto v) { s.seed = to_int<std::uint64_t>(v); }},
          {"dt", [&](auto v) { s.dt = to_double(v); }},
          {"duration", [&](auto v) { s.duration = to_double(v); }},
          {"runs", [&](auto v) { s.runs = to_int<int>(v); }}};
}

KeyTable uav_keys(UavConfig& u) {
  return {{"position", [&](auto v) { u.position = to_point(v); }},
          {"heading_deg", [&](auto v) { u.heading_deg = to_double(v); }},
          {"v_max", [&](auto v) { u.limits.v_max = to_double(v); }},
          {"a_max", [&](auto v) { u.limits.a_max = to_double(v); }},
          {"energy", [&](auto v) { u.energy = to_double(v); }},
          {"broadcast_rate", [&](auto v) { u.broadcast_rate = to_double(v); }}};
}

KeyTable channel_keys(ChannelParams& c) {
  return {{"rssi0", [&](auto v) { c.rssi0 = to_double(v); }},
          {"d0", [&](auto v) { c.d0 = to_double(v); }},
          {"path_loss_exponent", [&](auto v) { c.path_loss_exponent = to_double(v); }},
          {"noise_sigma", [&](auto v) { c.noise_sigma = to_double(v); }}};
}

KeyTable link_keys(LinkParams& l) {
  return {{"miss_threshold", [&](auto v) { l.miss_threshold = to_int<int>(v); }},
          {"beacon_period", [&](auto v) { l.beacon_period = to_int<int>(v); }},
          {"handshake_timeout", [&](auto v) { l.handshake_timeout = to_int<int>(v); }},
          {"comm_range", [&](auto v) { l.comm_range = to_double(v); }},
          {"latency", [&](auto v) { l.latency = to_int<int>(v); }},
          {"jitter", [&](auto v) { l.jitter = to_int<int>(v); }}};
}

KeyTable separation_keys(SeparationConfig& s) {
  return {{"d_min", [&](auto v) { s.policy.d_min = to_double(v); }},
          {"d_max", [&](auto v) { s.policy.d_max = to_double(v); }},
          {"hysteresis", [&](auto v) { s.policy.hysteresis = to_double(v); }},
          {"use_true_distance", [&](auto v) { s.use_true_distance = to_bool(v); }}};
}

KeyTable learn_keys(LearnConfig& l) {
  return {{"rates", [&](auto v) { l.rates = to_doubles(v); }},
          {"energy_buckets", [&](auto v) { l.energy_buckets = to_int<int>(v); }},
          {"alpha", [&](auto v) { l.alpha = to_double(v); }},
          {"gamma", [&](auto v) { l.gamma = to_double(v); }},
          {"epsilon", [&](auto v) { l.epsilon = to_double(v); }},
          {"alpha_schedule", [&](auto v) { l.schedule = to_schedule(v); }},
          {"w_delivered", [&](auto v) { l.weights.delivered = to_double(v); }},
          {"w_lost", [&](auto v) { l.weights.lost = to_double(v); }},
          {"w_energy", [&](auto v) { l.weights.energy = to_double(v); }},
          {"period_ticks", [&](auto v) { l.period_ticks = to_int<int>(v); }},
          {"energy_per_message", [&](auto v) { l.energy_per_message = to_double(v); }}};
}

KeyTable laser_keys(LaserSpec& l) {
  return {{"max_range", [&](auto v) { l.max_range = to_double(v); }},
          {"fov_deg", [&](auto v) { l.fov_deg = to_double(v); }},
          {"beam_count", [&](auto v) { l.beam_count = to_int<int>(v); }},
          {"scan_rate_hz", [&](auto v) { l.scan_rate_hz = to_double(v); }}};
}

KeyTable slam_keys(SlamParams& s) {
  return {{"grid_side", [&](auto v) { s.grid_side = to_int<int>(v); }},
          {"resolution", [&](auto v) { s.resolution = to_double(v); }},
          {"hole_width", [&](auto v) { s.hole_width = to_double(v); }},
          {"quality", [&](auto v) { s.quality = to_int<int>(v); }},
          {"search_iterations", [&](auto v) { s.search.iterations = to_int<int>(v); }},
          {"search_sigma",
           [&](auto v) {
             const auto d = to_doubles(v, 3);
             s.search.sigma = {d[0], d[1], d[2]};
           }},
          {"stall_limit", [&](auto v) { s.search.stall_limit = to_int<int>(v); }},
          {"odom_sigma_xy", [&](auto v) { s.odom_sigma_xy = to_double(v); }},
          {"odom_sigma_theta", [&](auto v) { s.odom_sigma_theta = to_double(v); }}};
}

KeyTable path_keys(PathConfig& p) {
  return {{"uav", [&](auto v) { p.uav = to_int<int>(v); }},
          {"waypoints", [&](auto v) { p.path.waypoints = to_points(v); }},
          {"closed", [&](auto v) { p.path.closed = to_bool(v); }},
          {"laps", [&](auto v) { p.path.laps = to_int<int>(v); }},
          {"speed", [&](auto v) { p.path.speed = to_double(v); }},
          {"capture_radius", [&](auto v) { p.path.capture_radius = to_double(v); }}};
}

KeyTable area_keys(AreaConfig& a) {
  return {{"rect", [&](auto v) { a.rect = to_rect(v); }},
          {"priority", [&](auto v) { a.priority = to_priority(v); }},
          {"uav", [&](auto v) { a.uav = to_int<int>(v); }}};
}

KeyTable disruption_keys(DisruptionScript& d) {
  return {{"pair",
           [&](auto v) {
             const auto ids = split(v, ',');
             if (ids.size() != 2) throw BadValue{"expected two uav ids"};
             const int a = to_int<int>(ids[0]);
             const int b = to_int<int>(ids[1]);
             if (a == b) throw BadValue{"a disrupted pair needs two distinct uavs"};
             d.pair = UavPair::of(a, b);
           }},
          {"start", [&](auto v) { d.start = to_double(v); }},
          {"end", [&](auto v) { d.end = to_double(v); }}};
}

KeyTable experiment_keys(ExperimentConfig& e) {
  return {{"kind",
           [&](auto v) {
             auto k = parse_experiment_kind(v);
             if (!k) throw BadValue{"unknown experiment kind '" + std::string(v) + "'"};
             e.kind = *k;
           }},
          {"distances", [&](auto v) { e.distances = to_doubles(v); }},
          {"devices",
           [&](auto v) {
             e.devices.clear();
             for (auto part : split(v, ',')) e.devices.push_back(to_int<int>(part));
           }},
          {"requirement", [&](auto v) { e.requirement = to_double(v); }}};
}

// Keys that may appear more than once in a section; each occurrence appends.
bool repeatable(std::string_view section_kind, std::string_view key) {
  return (section_kind == "env" && key == "obstacle") || (section_kind == "experiment" && key == "interval");
}

}  // namespace

ConfigError::ConfigError(std::vector<Diagnostic> diagnostics)
    : std::runtime_error(join_diagnostics(diagnostics)), diagnostics_(std::move(diagnostics)) {}

std::vector<Diagnostic> validate_config(const ScenarioConfig& c, const std::map<std::string, int>& lines) {
  std::vector<Diagnostic> out;
  const auto line_of = [&](const std::string& section) {
    auto it = lines.find(section);
    return it == lines.end() ? 0 : it->second;
  };
  const auto fail = [&](const std::string& section, std::string msg) {
    out.push_back({line_of(section), "[" + section + "] " + std::move(msg)});
  };

  if (c.sim.name.empty() || c.sim.name.find_first_of("#\n\r") != std::string::npos ||
      c.sim.name != trim(c.sim.name)) {
    fail("sim", "name must be nonempty, single-line, without surrounding spaces and contain no '#'");
  }
  if (!(c.sim.dt > 0.0)) fail("sim", "dt must be positive");
  if (!(c.sim.duration > 0.0)) fail("sim", "duration must be positive");
  if (c.sim.runs < 1) fail("sim", "runs must be at least 1");

  if (!c.env.bounds.valid()) fail("env", "bounds must have positive extent");
  for (std::size_t i = 0; i < c.env.obstacles.size(); ++i) {
    if (!c.env.obstacles[i].valid() || !c.env.obstacles[i].within(c.env.bounds)) {
      fail("env", "obstacle " + std::to_string(i + 1) + " must lie within bounds");
    }
  }

  for (const auto& [id, u] : c.uavs) {
    const std::string sec = "uav." + std::to_string(id);
    if (id < 1) fail(sec, "uav ids must be positive");
    if (!c.env.bounds.contains(u.position)) fail(sec, "position lies outside the environment bounds");
    if (!(u.limits.v_max >= 0.0)) fail(sec, "v_max must be nonnegative");
    if (!(u.limits.a_max >= 0.0)) fail(sec, "a_max must be nonnegative");
    if (!(u.energy >= 0.0)) fail(sec, "energy must be nonnegative");
    if (!(u.broadcast_rate >= 0.0)) fail(sec, "broadcast_rate must be nonnegative");
  }

  if (!c.channel.valid()) fail("channel", "needs d0 > 0, path_loss_exponent > 0 and noise_sigma >= 0");
  if (!c.link.valid()) {
    fail("link",
         "needs miss_threshold >= latency + jitter, beacon_period >= 1, handshake_timeout >= 2 * (latency + "
         "jitter), comm_range > 0, latency >= 1 and jitter >= 0");
  }
  if (!c.separation.policy.valid()) fail("separation", "needs 0 < d_min < d_max and hysteresis < (d_max - d_min) / 2");

  const auto& l = c.learn;
  if (l.rates.empty() || std::any_of(l.rates.begin(), l.rates.end(), [](double r) { return !(r >= 0.0); })) {
    fail("learn", "rates must be a nonempty list of nonnegative values");
  }
  if (l.energy_buckets < 1) fail("learn", "energy_buckets must be at least 1");
  if (!(l.alpha >= 0.0 && l.alpha <= 1.0)) fail("learn", "alpha must lie in [0, 1]");
  if (!(l.gamma >= 0.0 && l.gamma < 1.0)) fail("learn", "gamma must lie in [0, 1)");
  if (!(l.epsilon >= 0.0 && l.epsilon <= 1.0)) fail("learn", "epsilon must lie in [0, 1]");
  if (!(l.weights.delivered >= 0.0 && l.weights.lost >= 0.0 && l.weights.energy >= 0.0)) {
    fail("learn", "reward weights must be nonnegative");
  }
  if (l.period_ticks < 1) fail("learn", "period_ticks must be at least 1");
  if (!(l.energy_per_message >= 0.0)) fail("learn", "energy_per_message must be nonnegative");

  if (!c.laser.valid()) fail("laser", "needs max_range > 0, 0 < fov_deg <= 360, beam_count >= 2, scan_rate_hz > 0");
  const auto& s = c.slam;
  if (s.grid_side < 1 || !(s.resolution > 0.0)) fail("slam", "grid_side and resolution must be positive");
  if (!(s.hole_width >= 0.0)) fail("slam", "hole_width must be nonnegative");
  if (s.quality < 0 || s.quality > 255) fail("slam", "quality must lie in [0, 255]");
  if (s.search.iterations < 1 || s.search.stall_limit < 1) fail("slam", "search_iterations and stall_limit must be >= 1");
  if (!(s.search.sigma.x >= 0.0 && s.search.sigma.y >= 0.0 && s.search.sigma.theta >= 0.0)) {
    fail("slam", "search_sigma must be nonnegative");
  }
  if (!(s.odom_sigma_xy >= 0.0 && s.odom_sigma_theta >= 0.0)) fail("slam", "odometry sigmas must be nonnegative");

  std::set<int> path_owners;
  for (const auto& [id, p] : c.paths) {
    const std::string sec = "path." + std::to_string(id);
    if (!c.uavs.count(p.uav)) fail(sec, "uav " + std::to_string(p.uav) + " does not exist");
    if (!path_owners.insert(p.uav).second) fail(sec, "uav " + std::to_string(p.uav) + " already follows a path");
    if (!p.path.valid()) {
      fail(sec, "needs distinct consecutive waypoints, laps >= 1, speed > 0 and capture_radius > 0");
    }
    for (const auto& w : p.path.waypoints) {
      if (!c.env.bounds.contains(w)) {
        fail(sec, "waypoint lies outside the environment bounds");
        break;
      }
    }
  }
  for (const auto& [id, a] : c.areas) {
    const std::string sec = "area." + std::to_string(id);
    if (!a.rect.valid() || !a.rect.within(c.env.bounds)) fail(sec, "rect must lie within the environment bounds");
    if (a.uav && !c.uavs.count(*a.uav)) fail(sec, "uav " + std::to_string(*a.uav) + " does not exist");
  }
  for (const auto& [id, d] : c.disruptions) {
    const std::string sec = "disruption." + std::to_string(id);
    if (!c.uavs.count(d.pair.first) || !c.uavs.count(d.pair.second)) fail(sec, "pair references a missing uav");
    if (!(0.0 <= d.start && d.start < d.end && d.end <= c.sim.duration)) {
      fail(sec, "needs 0 <= start < end <= duration");
    }
  }

  const auto& e = c.experiment;
  for (double d : e.distances) {
    if (!(d > 0.0)) fail("experiment", "distances must be positive");
  }
  for (const auto& iv : e.intervals) {
    if (std::find(e.distances.begin(), e.distances.end(), iv.distance) == e.distances.end()) {
      fail("experiment", "interval at " + format_number(iv.distance) + " m has no matching distance");
    }
  }
  for (int d : e.devices) {
    if (!c.uavs.count(d)) fail("experiment", "device " + std::to_string(d) + " does not exist");
  }
  if (!(e.requirement >= 0.0 && e.requirement <= 1.0)) fail("experiment", "requirement must lie in [0, 1]");

  switch (e.kind) {
    case ExperimentKind::Reconnect:
      if (c.uavs.size() < 2) fail("experiment", "reconnect needs at least two uavs");
      if (e.distances.empty()) fail("experiment", "reconnect needs distances");
      if (c.disruptions.empty()) fail("experiment", "reconnect needs at least one [disruption.N] section");
      break;
    case ExperimentKind::RssiAccuracy:
      if (e.distances.empty()) fail("experiment", "rssi_accuracy needs distances");
      if (e.devices.empty() ? c.uavs.size() < 2 : e.devices.size() < 2) {
        fail("experiment", "rssi_accuracy needs two devices");
      }
      break;
    case ExperimentKind::SlamMoving:
      if (c.uavs.size() != 1) fail("experiment", "slam_moving needs exactly one uav");
      if (c.paths.empty()) fail("experiment", "slam_moving needs a [path.N] section");
      break;
    case ExperimentKind::SlamStatic:
      if (c.uavs.size() != 1) fail("experiment", "slam_static needs exactly one uav");
      break;
    case ExperimentKind::Free:
      break;
  }
  return out;
}

std::vector<Diagnostic> config_warnings(const ScenarioConfig& c) {
  std::vector<Diagnostic> out;
  if (c.sim.dt > 0.0 && c.sim.duration > 0.0) {
    const double rem = duration_remainder(c.sim.duration, c.sim.dt);
    if (rem != 0.0) {
      out.push_back({0, "duration " + format_number(c.sim.duration) + " s is not a multiple of dt " +
                            format_number(c.sim.dt) + " s; running " +
                            std::to_string(ticks_for_duration(c.sim.duration, c.sim.dt)) + " ticks, remainder " +
                            format_number(rem) + " s discarded"});
    }
  }
  return out;
}

ParsedScenario parse_scenario(std::string_view text) {
  ParsedScenario parsed;
  ScenarioConfig& c = parsed.config;
  std::vector<Diagnostic> errors;
  std::map<std::string, int> section_lines;

  std::string section;       // full header, e.g. "uav.2"
  std::string section_kind;  // part before the dot
  KeyTable keys;
  std::set<std::string, std::less<>> seen_keys;
  bool skip_section = false;

  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (line_no == 1 && line.starts_with("\xEF\xBB\xBF")) line.remove_prefix(3);
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') {
        errors.push_back({line_no, "malformed section header"});
        skip_section = true;
        continue;
      }
      section = std::string(trim(line.substr(1, line.size() - 2)));
      const auto dot = section.find('.');
      section_kind = section.substr(0, dot);
      seen_keys.clear();
      skip_section = false;
      if (section_lines.count(section)) {
        errors.push_back({line_no, "duplicate section [" + section + "] (first at line " +
                                       std::to_string(section_lines[section]) + ")"});
        skip_section = true;
        continue;
      }
      section_lines[section] = line_no;

      std::optional<int> index;
      const bool indexed = section_kind == "uav" || section_kind == "path" || section_kind == "area" ||
                           section_kind == "disruption";
      if (indexed) {
        try {
          if (dot == std::string::npos) throw BadValue{};
          index = to_int<int>(std::string_view(section).substr(dot + 1));
        } catch (const BadValue&) {
          errors.push_back({line_no, "section [" + section + "] needs a numeric index, e.g. [" + section_kind + ".1]"});
          skip_section = true;
          continue;
        }
      } else if (dot != std::string::npos) {
        errors.push_back({line_no, "unknown section [" + section + "]"});
        skip_section = true;
        continue;
      }

      if (section_kind == "sim") {
        keys = sim_keys(c.sim);
      } else if (section_kind == "env") {
        keys = {{"bounds", [&](auto v) { c.env.bounds = to_rect(v); }},
                {"obstacle", [&](auto v) { c.env.obstacles.push_back(to_rect(v)); }}};
      } else if (section_kind == "uav") {
        keys = uav_keys(c.uavs[*index]);
      } else if (section_kind == "channel") {
        keys = channel_keys(c.channel);
      } else if (section_kind == "link") {
        keys = link_keys(c.link);
      } else if (section_kind == "separation") {
        keys = separation_keys(c.separation);
      } else if (section_kind == "learn") {
        keys = learn_keys(c.learn);
      } else if (section_kind == "laser") {
        keys = laser_keys(c.laser);
      } else if (section_kind == "slam") {
        keys = slam_keys(c.slam);
      } else if (section_kind == "path") {
        keys = path_keys(c.paths[*index]);
      } else if (section_kind == "area") {
        keys = area_keys(c.areas[*index]);
      } else if (section_kind == "disruption") {
        keys = disruption_keys(c.disruptions[*index]);
      } else if (section_kind == "experiment") {
        keys = experiment_keys(c.experiment);
        keys["interval"] = [&](auto v) {
          const auto d = to_doubles(v, 3);
          c.experiment.intervals.push_back({d[0], RssiInterval::between(d[1], d[2])});
        };
      } else {
        errors.push_back({line_no, "unknown section [" + section + "]"});
        skip_section = true;
      }
      continue;
    }

    if (skip_section) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      errors.push_back({line_no, "expected 'key = value'"});
      continue;
    }
    const std::string_view key = trim(line.substr(0, eq));
    const std::string_view value = trim(line.substr(eq + 1));
    if (section.empty()) {
      errors.push_back({line_no, "key '" + std::string(key) + "' appears before any section"});
      continue;
    }
    auto it = keys.find(key);
    if (it == keys.end()) {
      errors.push_back({line_no, "unknown key '" + std::string(key) + "' in [" + section + "]"});
      continue;
    }
    if (!repeatable(section_kind, key) && !seen_keys.insert(std::string(key)).second) {
      errors.push_back({line_no, "duplicate key '" + std::string(key) + "' in [" + section + "]"});
      continue;
    }
    try {
      it->second(value);
    } catch (const BadValue& e) {
      errors.push_back({line_no, std::string(key) + ": " + e.message});
    } catch (const std::exception& e) {
      errors.push_back({line_no, std::string(key) + ": " + e.what()});
    }
  }

  std::vector<std::string> missing;
  for (const char* required : {"sim", "experiment"}) {
    if (!section_lines.count(required)) missing.push_back(required);
  }
  if (section_lines.count("sim") && c.sim.duration == 0.0) {
    errors.push_back({section_lines["sim"], "[sim] is missing the duration key"});
  }
  const auto kind = c.experiment.kind;
  if (kind == ExperimentKind::Reconnect && !section_lines.count("link")) missing.push_back("link");
  if (kind == ExperimentKind::RssiAccuracy && !section_lines.count("channel")) missing.push_back("channel");
  if (kind == ExperimentKind::SlamMoving || kind == ExperimentKind::SlamStatic) {
    for (const char* required : {"env", "laser"}) {
      if (!section_lines.count(required)) missing.push_back(required);
    }
  }
  if (!missing.empty()) {
    std::string list;
    for (const auto& m : missing) list += (list.empty() ? "[" : ", [") + m + "]";
    errors.push_back({0, "missing required section" + std::string(missing.size() > 1 ? "s " : " ") + list});
  }

  if (errors.empty()) {
    auto invariant_errors = validate_config(c, section_lines);
    errors.insert(errors.end(), invariant_errors.begin(), invariant_errors.end());
  }
  if (!errors.empty()) {
    std::stable_sort(errors.begin(), errors.end(), [](const Diagnostic& a, const Diagnostic& b) {
      return (a.line == 0 ? INT32_MAX : a.line) < (b.line == 0 ? INT32_MAX : b.line);
    });
    throw ConfigError(std::move(errors));
  }
  parsed.warnings = config_warnings(c);
  return parsed;
}

namespace {

std::string nums(std::initializer_list<double> values) {
  std::string out;
  for (double v : values) out += (out.empty() ? "" : ",") + format_number(v);
  return out;
}

std::string nums(const std::vector<double>& values) {
  std::string out;
  for (double v : values) out += (out.empty() ? "" : ",") + format_number(v);
  return out;
}

std::string rect_text(const Rect& r) { return nums({r.min.x(), r.min.y(), r.max.x(), r.max.y()}); }

const char* bool_text(bool b) { return b ? "true" : "false"; }

}  // namespace

std::string serialize(const ScenarioConfig& c) {
  std::ostringstream o;
  o << "[sim]\n"
    << "name = " << c.sim.name << "\n"
    << "seed = " << c.sim.seed << "\n"
    << "dt = " << format_number(c.sim.dt) << "\n"
    << "duration = " << format_number(c.sim.duration) << "\n"
    << "runs = " << c.sim.runs << "\n";

  o << "\n[env]\n"
    << "bounds = " << rect_text(c.env.bounds) << "\n";
  for (const auto& ob : c.env.obstacles) o << "obstacle = " << rect_text(ob) << "\n";

  for (const auto& [id, u] : c.uavs) {
    o << "\n[uav." << id << "]\n"
      << "position = " << nums({u.position.x(), u.position.y()}) << "\n"
      << "heading_deg = " << format_number(u.heading_deg) << "\n"
      << "v_max = " << format_number(u.limits.v_max) << "\n"
      << "a_max = " << format_number(u.limits.a_max) << "\n"
      << "energy = " << format_number(u.energy) << "\n"
      << "broadcast_rate = " << format_number(u.broadcast_rate) << "\n";
  }

  o << "\n[channel]\n"
    << "rssi0 = " << format_number(c.channel.rssi0) << "\n"
    << "d0 = " << format_number(c.channel.d0) << "\n"
    << "path_loss_exponent = " << format_number(c.channel.path_loss_exponent) << "\n"
    << "noise_sigma = " << format_number(c.channel.noise_sigma) << "\n";

  o << "\n[link]\n"
    << "miss_threshold = " << c.link.miss_threshold << "\n"
    << "beacon_period = " << c.link.beacon_period << "\n"
    << "handshake_timeout = " << c.link.handshake_timeout << "\n"
    << "comm_range = " << format_number(c.link.comm_range) << "\n"
    << "latency = " << c.link.latency << "\n"
    << "jitter = " << c.link.jitter << "\n";

  o << "\n[separation]\n"
    << "d_min = " << format_number(c.separation.policy.d_min) << "\n"
    << "d_max = " << format_number(c.separation.policy.d_max) << "\n"
    << "hysteresis = " << format_number(c.separation.policy.hysteresis) << "\n"
    << "use_true_distance = " << bool_text(c.separation.use_true_distance) << "\n";

  const auto& l = c.learn;
  o << "\n[learn]\n"
    << "rates = " << nums(l.rates) << "\n"
    << "energy_buckets = " << l.energy_buckets << "\n"
    << "alpha = " << format_number(l.alpha) << "\n"
    << "gamma = " << format_number(l.gamma) << "\n"
    << "epsilon = " << format_number(l.epsilon) << "\n"
    << "alpha_schedule = " << (l.schedule == AlphaSchedule::Fixed ? "fixed" : "inverse_visits") << "\n"
    << "w_delivered = " << format_number(l.weights.delivered) << "\n"
    << "w_lost = " << format_number(l.weights.lost) << "\n"
    << "w_energy = " << format_number(l.weights.energy) << "\n"
    << "period_ticks = " << l.period_ticks << "\n"
    << "energy_per_message = " << format_number(l.energy_per_message) << "\n";

  o << "\n[laser]\n"
    << "max_range = " << format_number(c.laser.max_range) << "\n"
    << "fov_deg = " << format_number(c.laser.fov_deg) << "\n"
    << "beam_count = " << c.laser.beam_count << "\n"
    << "scan_rate_hz = " << format_number(c.laser.scan_rate_hz) << "\n";

  const auto& s = c.slam;
  o << "\n[slam]\n"
    << "grid_side = " << s.grid_side << "\n"
    << "resolution = " << format_number(s.resolution) << "\n"
    << "hole_width = " << format_number(s.hole_width) << "\n"
    << "quality = " << s.quality << "\n"
    << "search_iterations = " << s.search.iterations << "\n"
    << "search_sigma = " << nums({s.search.sigma.x, s.search.sigma.y, s.search.sigma.theta}) << "\n"
    << "stall_limit = " << s.search.stall_limit << "\n"
    << "odom_sigma_xy = " << format_number(s.odom_sigma_xy) << "\n"
    << "odom_sigma_theta = " << format_number(s.odom_sigma_theta) << "\n";

  for (const auto& [id, p] : c.paths) {
    o << "\n[path." << id << "]\n"
      << "uav = " << p.uav << "\n"
      << "waypoints = ";
    for (std::size_t i = 0; i < p.path.waypoints.size(); ++i) {
      o << (i ? "; " : "") << nums({p.path.waypoints[i].x(), p.path.waypoints[i].y()});
    }
    o << "\n"
      << "closed = " << bool_text(p.path.closed) << "\n"
      << "laps = " << p.path.laps << "\n"
      << "speed = " << format_number(p.path.speed) << "\n"
      << "capture_radius = " << format_number(p.path.capture_radius) << "\n";
  }

  for (const auto& [id, a] : c.areas) {
    o << "\n[area." << id << "]\n"
      << "rect = " << rect_text(a.rect) << "\n"
      << "priority = " << priority_name(a.priority) << "\n";
    if (a.uav) o << "uav = " << *a.uav << "\n";
  }

  for (const auto& [id, d] : c.disruptions) {
    o << "\n[disruption." << id << "]\n"
      << "pair = " << d.pair.first << "," << d.pair.second << "\n"
      << "start = " << format_number(d.start) << "\n"
      << "end = " << format_number(d.end) << "\n";
  }

  const auto& e = c.experiment;
  o << "\n[experiment]\n"
    << "kind = " << experiment_kind_name(e.kind) << "\n";
  if (!e.distances.empty()) o << "distances = " << nums(e.distances) << "\n";
  for (const auto& iv : e.intervals) {
    o << "interval = " << nums({iv.distance, iv.interval.high, iv.interval.low}) << "\n";
  }
  if (!e.devices.empty()) {
    o << "devices = ";
    for (std::size_t i = 0; i < e.devices.size(); ++i) o << (i ? "," : "") << e.devices[i];
    o << "\n";
  }
  o << "requirement = " << format_number(e.requirement) << "\n";
  return o.str();
}

}  // namespace swarmlink
