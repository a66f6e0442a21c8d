#pragma once

#include <complex>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace numrange {

using Point = std::complex<double>;

enum class MembershipMode { closure, relint };

/// Convex polygon in C = R^2, possibly collapsed to a segment or a point.
/// Non-degenerate polygons keep their vertices strictly counterclockwise.
class Polygon2D {
 public:
  enum class Kind { empty, point, segment, polygon };

  Polygon2D() = default;

  /// Convex hull of `points`. Points closer than `dedup_tol` are merged and
  /// collinear vertices dropped; nearly collinear clouds collapse to a segment.
  static Polygon2D hull(std::span<const Point> points, double dedup_tol = 1e-12);

  Kind kind() const noexcept { return kind_; }
  bool is_point() const noexcept { return kind_ == Kind::point; }
  bool is_segment() const noexcept { return kind_ == Kind::segment; }
  const std::vector<Point>& vertices() const noexcept { return vertices_; }

  /// max over vertices of Re(e^{-i theta} v).
  double support(double theta) const;

  /// Euclidean distance from z to the (closed) polygon; 0 inside.
  double distance(Point z) const;

  /// Distance from an interior point to the relative boundary; negative
  /// outside the affine hull's relative interior.
  double relint_margin(Point z) const;

  bool contains(Point z, MembershipMode mode, double tol) const;

  Point centroid() const;

  void write_csv(std::ostream& os) const;

 private:
  Kind kind_ = Kind::empty;
  std::vector<Point> vertices_;
};

/// Distance from z to the segment [a, b].
double segment_distance(Point z, Point a, Point b);

}  // namespace numrange
