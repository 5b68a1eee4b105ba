#pragma once

#include "swarmlink/rng.hpp"
#include "swarmlink/world.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace swarmlink {

struct LaserSpec {
  double max_range = 5.0;   // m
  double fov_deg = 240.0;   // total scope
  int beam_count = 684;
  double scan_rate_hz = 10.0;

  bool valid() const { return max_range > 0.0 && fov_deg > 0.0 && fov_deg <= 360.0 && beam_count >= 2 && scan_rate_hz > 0.0; }
  /// Bearing of beam i relative to the heading: -fov/2 + i * fov / (beam_count - 1), radians.
  double bearing(int i) const;
  double angular_step() const;

  friend bool operator==(const LaserSpec&, const LaserSpec&) = default;
};

struct Pose {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;  // (-pi, pi]

  Vec2 position() const { return {x, y}; }
  /// This pose followed by `delta` expressed in this pose's frame.
  Pose compose(const Pose& delta) const;
  /// Delta such that from.compose(delta) == to.
  static Pose between(const Pose& from, const Pose& to);
};

struct LaserScan {
  LaserSpec spec;
  std::vector<double> ranges;  // max_range means no hit
  Pose pose_hint;
  bool error = false;  // sensor inside an obstacle

  bool is_hit(int i) const { return ranges[static_cast<std::size_t>(i)] < spec.max_range; }
  int hit_count() const;
};

LaserScan simulate_scan(const Environment& env, const Pose& pose, const LaserSpec& spec);

/// Square grid of 16-bit likelihoods: 0 occupied, 65535 free, 32768 unknown.
/// Cell (ix, iy) covers [origin + (ix, iy) * res, origin + (ix + 1, iy + 1) * res).
class OccupancyGrid {
 public:
  static constexpr std::uint16_t kOccupied = 0;
  static constexpr std::uint16_t kFree = 65535;
  static constexpr std::uint16_t kUnknown = 32768;

  using Cells = Eigen::Matrix<std::uint16_t, Eigen::Dynamic, Eigen::Dynamic>;  // (iy, ix)

  OccupancyGrid(int side, double resolution, Vec2 origin, std::uint16_t fill = kUnknown);

  int side() const { return side_; }
  double resolution() const { return resolution_; }
  const Vec2& origin() const { return origin_; }

  bool in_bounds(int ix, int iy) const { return ix >= 0 && iy >= 0 && ix < side_ && iy < side_; }
  std::optional<Eigen::Vector2i> cell_of(const Vec2& world) const;
  Vec2 cell_center(int ix, int iy) const;

  std::uint16_t at(int ix, int iy) const { return cells_(iy, ix); }
  std::uint16_t& at(int ix, int iy) { return cells_(iy, ix); }
  /// Value at a world point; unknown outside the grid.
  std::uint16_t value_at(const Vec2& world) const;

  const Cells& cells() const { return cells_; }

 private:
  int side_;
  double resolution_;
  Vec2 origin_;
  Cells cells_;
};

/// Sum of grid values at hit-beam endpoints projected through `pose`. Lower is a better fit.
std::int64_t scan_score(const OccupancyGrid& grid, const LaserScan& scan, const Pose& pose);

struct SearchSigma {
  double x = 0.1;      // m
  double y = 0.1;      // m
  double theta = 0.1;  // rad
};

struct SearchParams {
  int iterations = 400;
  SearchSigma sigma;
  /// Consecutive non-improving draws before the sampling spread is halved.
  int stall_limit = 40;
};

struct SearchResult {
  Pose pose;
  std::int64_t score = 0;
};

/// Randomized hill climbing around `seed`: perturb the best pose so far with gaussian noise, keep
/// strict improvements, and halve the spread after stall_limit misses. Each iteration draws three
/// normals, so a longer search replays a shorter one as its prefix.
SearchResult monte_carlo_search(const OccupancyGrid& grid, const LaserScan& scan, const Pose& seed, RngStream& rng,
                                const SearchParams& params);

/// Blends each beam into the grid. Along the ray the target is free; within hole_width / 2 of a
/// hit the target dips linearly to occupied at the endpoint. Blend weight is quality / 256.
void map_update(OccupancyGrid& grid, const LaserScan& scan, const Pose& pose, int quality, double hole_width);

struct SlamParams {
  int grid_side = 400;
  double resolution = 0.05;
  double hole_width = 0.6;
  int quality = 10;
  SearchParams search;
  double odom_sigma_xy = 0.004;       // m per scan step while moving
  double odom_sigma_theta = 0.003;    // rad per scan step while moving

  friend bool operator==(const SlamParams& a, const SlamParams& b) {
    return a.grid_side == b.grid_side && a.resolution == b.resolution && a.hole_width == b.hole_width &&
           a.quality == b.quality && a.search.iterations == b.search.iterations &&
           a.search.sigma.x == b.search.sigma.x && a.search.sigma.y == b.search.sigma.y &&
           a.search.sigma.theta == b.search.sigma.theta && a.search.stall_limit == b.search.stall_limit &&
           a.odom_sigma_xy == b.odom_sigma_xy && a.odom_sigma_theta == b.odom_sigma_theta;
  }
};

struct SlamState {
  OccupancyGrid grid;
  Pose pose;
  std::int64_t steps = 0;
};

struct SlamStepResult {
  Pose predicted;
  Pose corrected;
  std::int64_t score = 0;
};

/// Predict with odometry, correct by scan matching, then integrate the scan at the corrected pose.
SlamStepResult slam_step(SlamState& state, const LaserScan& scan, const Pose& odometry_delta, RngStream& rng,
                         const SlamParams& params);

/// Ground-truth raster: occupied where the cell center lies inside an obstacle.
OccupancyGrid rasterize_truth(const Environment& env, int side, double resolution, const Vec2& origin);

/// Binary PGM (P5), north up, maxval 255, pixel = value / 256.
std::string to_pgm(const OccupancyGrid& grid);

/// Cells seen by a scan from `pose`: within the field of view and no deeper than the nearest
/// beam's range plus one cell. Cells of obstacles hit only by the two edge beams are excluded.
Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> sensed_region(const Environment& env, const LaserScan& scan,
                                                                  const Pose& pose, const OccupancyGrid& like);

/// Indices of obstacles hit by the scan, with the beams hitting each.
std::vector<std::vector<int>> beams_per_obstacle(const Environment& env, const LaserScan& scan, const Pose& pose);

struct MapAgreement {
  std::int64_t cells = 0;
  std::int64_t agreeing = 0;
  double ratio() const { return cells == 0 ? 0.0 : static_cast<double>(agreeing) / static_cast<double>(cells); }
};

/// Occupied means value < 32768 in both grids; compared over `mask`.
MapAgreement map_agreement(const OccupancyGrid& map, const OccupancyGrid& truth,
                           const Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>& mask);

}  // namespace swarmlink
