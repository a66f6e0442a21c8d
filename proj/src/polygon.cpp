#include "numrange/polygon.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>

#include "numrange/errors.hpp"

namespace numrange {
namespace {

double cross(Point o, Point a, Point b) {
  return (a.real() - o.real()) * (b.imag() - o.imag()) - (a.imag() - o.imag()) * (b.real() - o.real());
}

}  // namespace

double segment_distance(Point z, Point a, Point b) {
  const Point d = b - a;
  const double len2 = std::norm(d);
  if (len2 == 0.0) return std::abs(z - a);
  const double t = std::clamp(std::real((z - a) * std::conj(d)) / len2, 0.0, 1.0);
  return std::abs(z - (a + t * d));
}

Polygon2D Polygon2D::hull(std::span<const Point> points, double dedup_tol) {
  Polygon2D poly;
  std::vector<Point> pts;
  for (const Point& p : points) {
    if (!std::isfinite(p.real()) || !std::isfinite(p.imag())) throw InvalidInput("hull: non-finite point");
    pts.push_back(p);
  }
  if (pts.empty()) return poly;

  std::sort(pts.begin(), pts.end(), [](Point a, Point b) {
    return a.real() < b.real() || (a.real() == b.real() && a.imag() < b.imag());
  });
  std::vector<Point> uniq;
  for (const Point& p : pts) {
    bool dup = false;
    for (const Point& q : uniq)
      if (std::abs(p - q) <= dedup_tol) {
        dup = true;
        break;
      }
    if (!dup) uniq.push_back(p);
  }

  double diam = 0.0;
  Point far_a = uniq.front(), far_b = uniq.front();
  for (const Point& p : uniq)
    if (std::abs(p - uniq.front()) > diam) {
      diam = std::abs(p - uniq.front());
      far_b = p;
    }
  if (uniq.size() == 1 || diam <= dedup_tol) {
    poly.kind_ = Kind::point;
    poly.vertices_ = {uniq.front()};
    return poly;
  }
  for (const Point& p : uniq)
    if (std::abs(p - far_b) > std::abs(far_a - far_b)) far_a = p;

  // Collapse to a segment when every point sits within tolerance of the line.
  const Point dir = (far_b - far_a) / std::abs(far_b - far_a);
  const double flat_tol = std::max(dedup_tol, 1e-12 * std::abs(far_b - far_a));
  bool flat = true;
  double lo = 0.0, hi = 0.0;
  for (const Point& p : uniq) {
    const Point rel = (p - far_a) * std::conj(dir);
    if (std::abs(rel.imag()) > flat_tol) flat = false;
    lo = std::min(lo, rel.real());
    hi = std::max(hi, rel.real());
  }
  if (flat) {
    poly.kind_ = Kind::segment;
    poly.vertices_ = {far_a + lo * dir, far_a + hi * dir};
    return poly;
  }

  // Andrew's monotone chain, dropping collinear points.
  std::vector<Point> h(2 * uniq.size());
  std::size_t k = 0;
  for (const Point& p : uniq) {
    while (k >= 2 && cross(h[k - 2], h[k - 1], p) <= 0) --k;
    h[k++] = p;
  }
  for (std::size_t i = uniq.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross(h[k - 2], h[k - 1], uniq[i]) <= 0) --k;
    h[k++] = uniq[i];
  }
  h.resize(k - 1);
  poly.kind_ = Kind::polygon;
  poly.vertices_ = std::move(h);
  return poly;
}

double Polygon2D::support(double theta) const {
  const Point rot = std::polar(1.0, -theta);
  double best = -std::numeric_limits<double>::infinity();
  for (const Point& v : vertices_) best = std::max(best, std::real(rot * v));
  return best;
}

double Polygon2D::distance(Point z) const {
  switch (kind_) {
    case Kind::empty:
      return std::numeric_limits<double>::infinity();
    case Kind::point:
      return std::abs(z - vertices_[0]);
    case Kind::segment:
      return segment_distance(z, vertices_[0], vertices_[1]);
    case Kind::polygon:
      break;
  }
  bool inside = true;
  double best = std::numeric_limits<double>::infinity();
  const std::size_t n = vertices_.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point a = vertices_[i], b = vertices_[(i + 1) % n];
    if (cross(a, b, z) < 0) inside = false;
    best = std::min(best, segment_distance(z, a, b));
  }
  return inside ? 0.0 : best;
}

double Polygon2D::relint_margin(Point z) const {
  switch (kind_) {
    case Kind::empty:
      return -std::numeric_limits<double>::infinity();
    case Kind::point:
      return -std::abs(z - vertices_[0]);
    case Kind::segment: {
      const Point a = vertices_[0], b = vertices_[1];
      const Point dir = (b - a) / std::abs(b - a);
      const Point rel = (z - a) * std::conj(dir);
      const double along = std::min(rel.real(), std::abs(b - a) - rel.real());
      if (std::abs(rel.imag()) > 1e-12 * std::abs(b - a)) return -std::abs(rel.imag());
      return along;
    }
    case Kind::polygon:
      break;
  }
  double margin = std::numeric_limits<double>::infinity();
  const std::size_t n = vertices_.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point a = vertices_[i], b = vertices_[(i + 1) % n];
    margin = std::min(margin, cross(a, b, z) / std::abs(b - a));
  }
  return margin;
}

bool Polygon2D::contains(Point z, MembershipMode mode, double tol) const {
  if (mode == MembershipMode::closure) return distance(z) <= tol;
  switch (kind_) {
    case Kind::empty:
      return false;
    case Kind::point:
      return std::abs(z - vertices_[0]) <= tol;
    case Kind::segment: {
      const Point a = vertices_[0], b = vertices_[1];
      const Point dir = (b - a) / std::abs(b - a);
      const Point rel = (z - a) * std::conj(dir);
      return std::abs(rel.imag()) <= tol && rel.real() >= tol && std::abs(b - a) - rel.real() >= tol;
    }
    case Kind::polygon:
      return relint_margin(z) >= tol;
  }
  return false;
}

Point Polygon2D::centroid() const {
  if (vertices_.empty()) throw InvalidInput("centroid of empty polygon");
  Point s = 0.0;
  for (const Point& v : vertices_) s += v;
  return s / static_cast<double>(vertices_.size());
}

void Polygon2D::write_csv(std::ostream& os) const {
  os << std::setprecision(17);
  for (const Point& v : vertices_) os << v.real() << ',' << v.imag() << '\n';
}

}  // namespace numrange
