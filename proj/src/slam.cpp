#include "swarmlink/slam.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace swarmlink {

double LaserSpec::angular_step() const { return deg_to_rad(fov_deg) / static_cast<double>(beam_count - 1); }

double LaserSpec::bearing(int i) const { return -deg_to_rad(fov_deg) / 2.0 + static_cast<double>(i) * angular_step(); }

Pose Pose::compose(const Pose& d) const {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  return {x + c * d.x - s * d.y, y + s * d.x + c * d.y, normalize_angle(theta + d.theta)};
}

Pose Pose::between(const Pose& from, const Pose& to) {
  const double c = std::cos(from.theta);
  const double s = std::sin(from.theta);
  const double dx = to.x - from.x;
  const double dy = to.y - from.y;
  return {c * dx + s * dy, -s * dx + c * dy, normalize_angle(to.theta - from.theta)};
}

int LaserScan::hit_count() const {
  return static_cast<int>(std::count_if(ranges.begin(), ranges.end(), [&](double r) { return r < spec.max_range; }));
}

LaserScan simulate_scan(const Environment& env, const Pose& pose, const LaserSpec& spec) {
  if (!spec.valid()) throw std::invalid_argument("invalid laser spec");
  LaserScan scan;
  scan.spec = spec;
  scan.pose_hint = pose;
  scan.ranges.assign(static_cast<std::size_t>(spec.beam_count), spec.max_range);
  const Vec2 origin = pose.position();
  if (env.inside_obstacle(origin)) {
    std::fill(scan.ranges.begin(), scan.ranges.end(), 0.0);
    scan.error = true;
    return scan;
  }
  for (int i = 0; i < spec.beam_count; ++i) {
    const Vec2 end = origin + spec.max_range * unit_vector(pose.theta + spec.bearing(i));
    if (auto hit = segment_hits_obstacle(origin, end, env)) {
      scan.ranges[static_cast<std::size_t>(i)] = std::min((*hit - origin).norm(), spec.max_range);
    }
  }
  return scan;
}

OccupancyGrid::OccupancyGrid(int side, double resolution, Vec2 origin, std::uint16_t fill)
    : side_(side), resolution_(resolution), origin_(std::move(origin)) {
  if (side < 1 || !(resolution > 0.0)) throw std::invalid_argument("grid needs a positive side and resolution");
  cells_ = Cells::Constant(side, side, fill);
}

std::optional<Eigen::Vector2i> OccupancyGrid::cell_of(const Vec2& world) const {
  const Vec2 g = (world - origin_) / resolution_;
  const int ix = static_cast<int>(std::floor(g.x()));
  const int iy = static_cast<int>(std::floor(g.y()));
  if (!in_bounds(ix, iy)) return std::nullopt;
  return Eigen::Vector2i(ix, iy);
}

Vec2 OccupancyGrid::cell_center(int ix, int iy) const {
  return origin_ + resolution_ * Vec2(static_cast<double>(ix) + 0.5, static_cast<double>(iy) + 0.5);
}

std::uint16_t OccupancyGrid::value_at(const Vec2& world) const {
  auto c = cell_of(world);
  return c ? at(c->x(), c->y()) : kUnknown;
}

namespace {

/// Hit endpoints in the sensor frame.
std::vector<Vec2> local_hit_points(const LaserScan& scan) {
  std::vector<Vec2> pts;
  pts.reserve(scan.ranges.size());
  for (int i = 0; i < scan.spec.beam_count; ++i) {
    if (!scan.is_hit(i)) continue;
    pts.push_back(scan.ranges[static_cast<std::size_t>(i)] * unit_vector(scan.spec.bearing(i)));
  }
  return pts;
}

std::int64_t score_points(const OccupancyGrid& grid, const std::vector<Vec2>& pts, const Pose& pose) {
  const double c = std::cos(pose.theta);
  const double s = std::sin(pose.theta);
  std::int64_t sum = 0;
  for (const auto& p : pts) {
    const Vec2 w(pose.x + c * p.x() - s * p.y(), pose.y + s * p.x() + c * p.y());
    sum += grid.value_at(w);
  }
  return sum;
}

}  // namespace

std::int64_t scan_score(const OccupancyGrid& grid, const LaserScan& scan, const Pose& pose) {
  return score_points(grid, local_hit_points(scan), pose);
}

SearchResult monte_carlo_search(const OccupancyGrid& grid, const LaserScan& scan, const Pose& seed, RngStream& rng,
                                const SearchParams& params) {
  if (params.iterations < 1) throw std::invalid_argument("search needs at least one iteration");
  const auto pts = local_hit_points(scan);
  SearchResult best{seed, score_points(grid, pts, seed)};
  SearchSigma sigma = params.sigma;
  int stale = 0;
  for (int it = 0; it < params.iterations; ++it) {
    Pose cand;
    cand.x = rng.normal(best.pose.x, sigma.x);
    cand.y = rng.normal(best.pose.y, sigma.y);
    cand.theta = normalize_angle(rng.normal(best.pose.theta, sigma.theta));
    const std::int64_t score = score_points(grid, pts, cand);
    if (score < best.score) {
      best = {cand, score};
      stale = 0;
    } else if (++stale >= params.stall_limit) {
      sigma.x *= 0.5;
      sigma.y *= 0.5;
      sigma.theta *= 0.5;
      stale = 0;
    }
  }
  return best;
}

namespace {

/// Visits grid cells crossed by the ray start + t * dir, t in [0, length), passing the distance
/// of each cell's midpoint along the ray.
template <typename Visit>
void trace_ray(const OccupancyGrid& grid, const Vec2& start, const Vec2& dir, double length, Visit&& visit) {
  auto cell = grid.cell_of(start);
  if (!cell) return;
  int ix = cell->x();
  int iy = cell->y();
  const double res = grid.resolution();
  const double inf = std::numeric_limits<double>::infinity();
  const int step_x = dir.x() > 0 ? 1 : -1;
  const int step_y = dir.y() > 0 ? 1 : -1;
  const auto boundary = [&](int i, int step, int axis) {
    return grid.origin()[axis] + res * static_cast<double>(i + (step > 0 ? 1 : 0));
  };
  double t_max_x = dir.x() != 0.0 ? (boundary(ix, step_x, 0) - start.x()) / dir.x() : inf;
  double t_max_y = dir.y() != 0.0 ? (boundary(iy, step_y, 1) - start.y()) / dir.y() : inf;
  const double t_delta_x = dir.x() != 0.0 ? res / std::abs(dir.x()) : inf;
  const double t_delta_y = dir.y() != 0.0 ? res / std::abs(dir.y()) : inf;

  double t = 0.0;
  while (t < length) {
    const double t_next = std::min({t_max_x, t_max_y, length});
    visit(ix, iy, 0.5 * (t + t_next));
    if (t_next >= length) break;
    if (t_max_x < t_max_y) {
      ix += step_x;
      t = t_max_x;
      t_max_x += t_delta_x;
    } else {
      iy += step_y;
      t = t_max_y;
      t_max_y += t_delta_y;
    }
    if (!grid.in_bounds(ix, iy)) break;
  }
}

}  // namespace

void map_update(OccupancyGrid& grid, const LaserScan& scan, const Pose& pose, int quality, double hole_width) {
  if (scan.error || quality <= 0) return;
  const std::uint32_t q = static_cast<std::uint32_t>(std::min(quality, 255));
  const double half = std::max(hole_width, grid.resolution()) / 2.0;
  const Vec2 start = pose.position();
  for (int i = 0; i < scan.spec.beam_count; ++i) {
    const double r = scan.ranges[static_cast<std::size_t>(i)];
    const bool hit = scan.is_hit(i);
    const Vec2 dir = unit_vector(pose.theta + scan.spec.bearing(i));
    const double length = hit ? r + half : r;
    const auto end_cell = grid.cell_of(start + r * dir);
    trace_ray(grid, start, dir, length, [&](int ix, int iy, double s) {
      std::uint32_t target = OccupancyGrid::kFree;
      if (hit && end_cell && end_cell->x() == ix && end_cell->y() == iy) {
        target = OccupancyGrid::kOccupied;
      } else if (hit && s > r - half) {
        const double frac = std::min(1.0, std::abs(s - r) / half);
        target = static_cast<std::uint32_t>(std::lround(frac * OccupancyGrid::kFree));
      }
      std::uint16_t& cell = grid.at(ix, iy);
      cell = static_cast<std::uint16_t>(((256 - q) * cell + q * target) >> 8);
    });
  }
}

SlamStepResult slam_step(SlamState& state, const LaserScan& scan, const Pose& odometry_delta, RngStream& rng,
                         const SlamParams& params) {
  SlamStepResult out;
  out.predicted = state.pose.compose(odometry_delta);
  if (scan.error) {
    state.pose = out.predicted;
    out.corrected = out.predicted;
    return out;
  }
  const SearchResult found = monte_carlo_search(state.grid, scan, out.predicted, rng, params.search);
  state.pose = found.pose;
  out.corrected = found.pose;
  out.score = found.score;
  map_update(state.grid, scan, state.pose, params.quality, params.hole_width);
  ++state.steps;
  return out;
}

OccupancyGrid rasterize_truth(const Environment& env, int side, double resolution, const Vec2& origin) {
  OccupancyGrid grid(side, resolution, origin, OccupancyGrid::kFree);
  for (int iy = 0; iy < side; ++iy) {
    for (int ix = 0; ix < side; ++ix) {
      if (env.inside_obstacle(grid.cell_center(ix, iy))) grid.at(ix, iy) = OccupancyGrid::kOccupied;
    }
  }
  return grid;
}

std::string to_pgm(const OccupancyGrid& grid) {
  const int side = grid.side();
  std::string out = "P5\n" + std::to_string(side) + " " + std::to_string(side) + "\n255\n";
  out.reserve(out.size() + static_cast<std::size_t>(side) * static_cast<std::size_t>(side));
  for (int iy = side - 1; iy >= 0; --iy) {
    for (int ix = 0; ix < side; ++ix) out.push_back(static_cast<char>(grid.at(ix, iy) >> 8));
  }
  return out;
}

std::vector<std::vector<int>> beams_per_obstacle(const Environment& env, const LaserScan& scan, const Pose& pose) {
  std::vector<std::vector<int>> out(env.obstacles.size());
  for (int i = 0; i < scan.spec.beam_count; ++i) {
    if (!scan.is_hit(i)) continue;
    const Vec2 end = pose.position() + scan.ranges[static_cast<std::size_t>(i)] *
                                           unit_vector(pose.theta + scan.spec.bearing(i));
    for (std::size_t k = 0; k < env.obstacles.size(); ++k) {
      Rect grown = env.obstacles[k];
      grown.min.array() -= 1e-9;
      grown.max.array() += 1e-9;
      if (grown.contains(end)) out[k].push_back(i);
    }
  }
  return out;
}

Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> sensed_region(const Environment& env, const LaserScan& scan,
                                                                  const Pose& pose, const OccupancyGrid& like) {
  const int side = like.side();
  const double res = like.resolution();
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> mask =
      Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>::Constant(side, side, false);
  if (scan.error) return mask;

  const int last = scan.spec.beam_count - 1;
  std::vector<Rect> edge_only;
  const auto hits = beams_per_obstacle(env, scan, pose);
  for (std::size_t k = 0; k < hits.size(); ++k) {
    if (!hits[k].empty() && std::all_of(hits[k].begin(), hits[k].end(), [&](int b) { return b == 0 || b == last; })) {
      edge_only.push_back(env.obstacles[k]);
    }
  }

  const double half_fov = deg_to_rad(scan.spec.fov_deg) / 2.0;
  const double step = scan.spec.angular_step();
  const Vec2 p = pose.position();
  for (int iy = 0; iy < side; ++iy) {
    for (int ix = 0; ix < side; ++ix) {
      const Vec2 c = like.cell_center(ix, iy);
      const Vec2 v = c - p;
      const double dist = v.norm();
      if (dist > scan.spec.max_range) continue;
      const double rel = normalize_angle(std::atan2(v.y(), v.x()) - pose.theta);
      if (std::abs(rel) > half_fov) continue;
      const int beam = std::clamp(static_cast<int>(std::lround((rel + half_fov) / step)), 0, last);
      const double r = scan.ranges[static_cast<std::size_t>(beam)];
      const double limit = scan.is_hit(beam) ? r + res : r;
      if (dist > limit) continue;
      if (std::any_of(edge_only.begin(), edge_only.end(), [&](const Rect& o) { return o.contains(c); })) continue;
      mask(iy, ix) = true;
    }
  }
  return mask;
}

MapAgreement map_agreement(const OccupancyGrid& map, const OccupancyGrid& truth,
                           const Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>& mask) {
  MapAgreement a;
  for (int iy = 0; iy < map.side(); ++iy) {
    for (int ix = 0; ix < map.side(); ++ix) {
      if (!mask(iy, ix)) continue;
      ++a.cells;
      const bool map_occ = map.at(ix, iy) < OccupancyGrid::kUnknown;
      const bool truth_occ = truth.at(ix, iy) < OccupancyGrid::kUnknown;
      if (map_occ == truth_occ) ++a.agreeing;
    }
  }
  return a;
}

}  // namespace swarmlink
