#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <utility>

namespace swarmlink {

template <typename Scalar>
using Point2 = Eigen::Matrix<Scalar, 2, 1>;

/// Closed axis-aligned rectangle.
template <typename Scalar>
struct Box {
  Point2<Scalar> min = Point2<Scalar>::Zero();
  Point2<Scalar> max = Point2<Scalar>::Zero();

  static Box from_corners(const Point2<Scalar>& a, const Point2<Scalar>& b) {
    return Box{a.cwiseMin(b), a.cwiseMax(b)};
  }

  bool valid() const { return (min.array() <= max.array()).all(); }
  bool contains(const Point2<Scalar>& p) const {
    return (p.array() >= min.array()).all() && (p.array() <= max.array()).all();
  }
  bool within(const Box& outer) const { return outer.contains(min) && outer.contains(max); }
  Point2<Scalar> center() const { return (min + max) / Scalar(2); }
  Point2<Scalar> clamp(const Point2<Scalar>& p) const { return p.cwiseMax(min).cwiseMin(max); }

  friend bool operator==(const Box& a, const Box& b) { return a.min == b.min && a.max == b.max; }
};

using Vec2 = Point2<double>;
using Rect = Box<double>;

/// Parameter t in [0, 1] at which segment a->b first touches the box, or none.
/// A start point inside the box yields t = 0.
template <typename Scalar>
std::optional<Scalar> segment_box_entry(const Point2<Scalar>& a, const Point2<Scalar>& b,
                                        const Box<Scalar>& box) {
  if (box.contains(a)) return Scalar(0);
  const Point2<Scalar> d = b - a;
  Scalar t0 = 0;
  Scalar t1 = 1;
  for (int k = 0; k < 2; ++k) {
    if (d[k] == Scalar(0)) {
      if (a[k] < box.min[k] || a[k] > box.max[k]) return std::nullopt;
      continue;
    }
    Scalar ta = (box.min[k] - a[k]) / d[k];
    Scalar tb = (box.max[k] - a[k]) / d[k];
    if (ta > tb) std::swap(ta, tb);
    t0 = std::max(t0, ta);
    t1 = std::min(t1, tb);
    if (t0 > t1) return std::nullopt;
  }
  return t0;
}

/// Wraps an angle into (-pi, pi].
template <typename Scalar>
Scalar normalize_angle(Scalar angle) {
  constexpr Scalar pi = std::numbers::pi_v<Scalar>;
  angle = std::remainder(angle, Scalar(2) * pi);
  if (angle <= -pi) angle += Scalar(2) * pi;
  return angle;
}

template <typename Scalar>
Point2<Scalar> unit_vector(Scalar angle) {
  return Point2<Scalar>(std::cos(angle), std::sin(angle));
}

template <typename Scalar>
constexpr Scalar deg_to_rad(Scalar deg) {
  return deg * std::numbers::pi_v<Scalar> / Scalar(180);
}

template <typename Scalar>
constexpr Scalar rad_to_deg(Scalar rad) {
  return rad * Scalar(180) / std::numbers::pi_v<Scalar>;
}

}  // namespace swarmlink
