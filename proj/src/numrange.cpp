#include "numrange/numrange.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace numrange {
namespace {

constexpr double kPi = std::numbers::pi;

Complex value_of(const ComplexMatrix& T, const ComplexVector& x) { return quadratic_form(T, x); }

// Barycentric coordinates of z in triangle (a, b, c); nullopt when degenerate.
std::optional<std::array<double, 3>> barycentric(Complex a, Complex b, Complex c, Complex z) {
  const double det = (b - a).real() * (c - a).imag() - (b - a).imag() * (c - a).real();
  const double scale = std::max({std::norm(b - a), std::norm(c - a), 1e-300});
  if (std::abs(det) <= 1e-14 * scale) return std::nullopt;
  const double l1 = ((z - a).real() * (c - a).imag() - (z - a).imag() * (c - a).real()) / det;
  const double l2 = ((b - a).real() * (z - a).imag() - (b - a).imag() * (z - a).real()) / det;
  return std::array<double, 3>{1.0 - l1 - l2, l1, l2};
}

Index nearest_index(std::span<const Complex> points, Complex v) {
  Index best = 0;
  for (Index i = 1; i < static_cast<Index>(points.size()); ++i)
    if (std::abs(points[static_cast<std::size_t>(i)] - v) < std::abs(points[static_cast<std::size_t>(best)] - v))
      best = i;
  return best;
}

}  // namespace

SupportPoint support_point(const ComplexMatrix& T, double theta) {
  if (T.rows() != T.cols()) throw DimensionMismatch("support_point: matrix not square");
  const Complex rot = std::polar(1.0, -theta);
  const ComplexMatrix H = (rot * T + std::conj(rot) * T.adjoint()) * 0.5;
  const auto eig = jacobi_eigen(H);
  SupportPoint sp;
  const Index last = T.rows() - 1;
  sp.s = eig.values(last);
  sp.x = eig.vectors.col(last);
  sp.value = value_of(T, sp.x);
  return sp;
}

std::optional<DegenerateRange> degenerate_range(const ComplexMatrix& T) {
  const Index n = T.rows();
  if (n == 0 || T.cols() != n) throw DimensionMismatch("degenerate_range: matrix not square");
  const Complex center = T.trace() / static_cast<double>(n);
  ComplexMatrix S = T;
  S.diagonal().array() -= center;
  const double sn = S.norm();
  const double scale = std::max(1.0, T.norm());
  DegenerateRange dr;
  dr.center = center;
  if (sn <= 1e-10 * scale) {
    dr.x_lo = dr.x_hi = ComplexVector::Unit(n, 0);
    return dr;
  }
  Index bi = 0, bj = 0;
  S.cwiseAbs().maxCoeff(&bi, &bj);
  const Complex omega = std::conj(S(bj, bi)) / S(bi, bj);
  if (std::abs(std::abs(omega) - 1.0) > 1e-10) return std::nullopt;
  if ((ComplexMatrix(S.adjoint()) - omega * S).norm() > 1e-10 * sn) return std::nullopt;
  const Complex unphase = std::sqrt(omega);  // e^{-i psi}
  ComplexMatrix A = unphase * S;
  A = (A + ComplexMatrix(A.adjoint())) * 0.5;
  const auto eig = jacobi_eigen(A);
  dr.direction = std::conj(unphase);
  dr.lo = eig.values(0);
  dr.hi = eig.values(n - 1);
  dr.x_lo = eig.vectors.col(0);
  dr.x_hi = eig.vectors.col(n - 1);
  if (dr.hi - dr.lo <= 1e-12 * scale) dr.hi = dr.lo;
  return dr;
}

Polygon2D boundary_polygon(const ComplexMatrix& T, int angles) {
  if (angles < 3) throw InvalidInput("boundary_polygon: need at least 3 angles");
  if (T.rows() == 0 || T.rows() != T.cols()) throw DimensionMismatch("boundary_polygon: matrix not square");
  if (!T.allFinite()) throw InvalidInput("boundary_polygon: non-finite entry");
  if (auto dr = degenerate_range(T)) {
    std::vector<Point> pts{value_of(T, dr->x_lo), value_of(T, dr->x_hi)};
    if (dr->is_point()) pts = {dr->center};
    return Polygon2D::hull(pts);
  }
  std::vector<Point> pts;
  pts.reserve(static_cast<std::size_t>(angles));
  for (int k = 0; k < angles; ++k) pts.push_back(support_point(T, 2.0 * kPi * k / angles).value);
  return Polygon2D::hull(pts);
}

bool polygon_membership(const Polygon2D& poly, Complex z, MembershipMode mode, double tol) {
  return poly.contains(z, mode, tol);
}

ComplexVector solve_on_chord(const ComplexMatrix& T, const ComplexVector& x, const ComplexVector& y, Complex mu) {
  const Complex zx = value_of(T, x), zy = value_of(T, y);
  const Complex D = zy - zx;
  const double len = std::abs(D);
  if (len <= 1e-15 * (1.0 + std::abs(zx))) return x;
  const Complex dir = D / len;
  const double goal = std::real(std::conj(dir) * (mu - zx));
  if (goal <= 0.0) return x;
  if (goal >= len) return y;

  const ComplexVector Tx = T * x, Ty = T * y;
  const Complex xTy = x.dot(Ty), yTx = y.dot(Tx), xy = x.dot(y);
  // Unnormalized <Tv,v> and <v,v> for v = cos t x + sin t e^{i phi} y.
  auto moments = [&](double t, double phi) {
    const double c = std::cos(t), s = std::sin(t);
    const Complex e = std::polar(1.0, phi);
    const Complex num = c * c * zx + s * s * zy + c * s * (e * xTy + std::conj(e) * yTx);
    const double nrm = c * c + s * s + 2.0 * c * s * std::real(e * xy);
    return std::pair<Complex, double>{num, nrm};
  };
  // The perpendicular offset from the chord's line is sin t cos t * Q(phi)
  // with Q a zero-mean sinusoid; pick its root.
  auto perp = [&](double phi) {
    const auto [num, nrm] = moments(kPi / 4, phi);
    return std::imag(std::conj(dir) * (num - zx * nrm));
  };
  const double a = perp(0.0), b = perp(kPi / 2);
  const double phi = (a == 0.0 && b == 0.0) ? 0.0 : std::atan2(-a, b);
  auto along = [&](double t) {
    const auto [num, nrm] = moments(t, phi);
    return std::real(std::conj(dir) * (num / nrm - zx));
  };
  double lo = 0.0, hi = kPi / 2;
  for (int it = 0; it < 200 && hi - lo > 1e-17; ++it) {
    const double mid = 0.5 * (lo + hi);
    (along(mid) < goal ? lo : hi) = mid;
  }
  const double t = std::abs(along(lo) - goal) <= std::abs(along(hi) - goal) ? lo : hi;
  ComplexVector v = std::cos(t) * x + std::sin(t) * std::polar(1.0, phi) * y;
  return v / v.norm();
}

std::optional<ComplexVector> attain_in_hull(const ComplexMatrix& T, std::span<const ComplexVector> vectors,
                                            std::span<const Complex> values, Complex lambda, double slack) {
  const std::size_t n = vectors.size();
  if (n == 0 || values.size() != n) return std::nullopt;
  std::size_t far = 0;
  double scale = 1.0;
  for (std::size_t j = 0; j < n; ++j) {
    scale = std::max(scale, std::abs(values[j]));
    if (std::abs(values[j] - lambda) > std::abs(values[far] - lambda)) far = j;
  }
  const double reach = std::abs(values[far] - lambda);
  if (reach <= 1e-15 * scale) return vectors[far];
  const Complex dir = (lambda - values[far]) / reach;
  const double eps = 1e-14 * scale;

  std::vector<double> along(n), side(n);
  for (std::size_t j = 0; j < n; ++j) {
    const Complex rel = (values[j] - values[far]) * std::conj(dir);
    along[j] = rel.real();
    side[j] = rel.imag();
  }
  // The ray from values[far] through lambda leaves the hull through the chord
  // (or point) crossing it farthest out.
  double best = -std::numeric_limits<double>::infinity();
  std::size_t bj = far, bk = far;
  bool pair = false;
  for (std::size_t j = 0; j < n; ++j)
    if (std::abs(side[j]) <= eps && along[j] > best) {
      best = along[j];
      bj = j;
      pair = false;
    }
  for (std::size_t j = 0; j < n; ++j) {
    if (side[j] >= -eps) continue;
    for (std::size_t k = 0; k < n; ++k) {
      if (side[k] <= eps) continue;
      const double s = along[j] + (along[k] - along[j]) * (-side[j]) / (side[k] - side[j]);
      if (s > best) {
        best = s;
        bj = j;
        bk = k;
        pair = true;
      }
    }
  }
  if (best < reach - slack) return std::nullopt;

  ComplexVector y;
  if (pair) {
    y = solve_on_chord(T, vectors[bj], vectors[bk], values[far] + best * dir);
  } else {
    y = vectors[bj];
  }
  const Complex goal = best >= reach ? lambda : values[far] + best * dir;
  return solve_on_chord(T, vectors[far], y, goal);
}

ComplexVector inverse_numrange(const ComplexMatrix& T, Complex lambda, double tol, int angles) {
  const Index n = T.rows();
  if (n == 0 || T.cols() != n) throw DimensionMismatch("inverse_numrange: matrix not square");
  if (!T.allFinite() || !std::isfinite(lambda.real()) || !std::isfinite(lambda.imag()))
    throw InvalidInput("inverse_numrange: non-finite input");

  auto finish = [&](const ComplexVector& u) {
    const double err = std::abs(value_of(T, u) - lambda);
    if (!(err <= tol)) {
      std::ostringstream os;
      os << "inverse_numrange: residual " << err << " exceeds " << tol;
      throw NumericalBreakdown(os.str());
    }
    return u;
  };

  const Polygon2D poly = boundary_polygon(T, angles);
  if (poly.distance(lambda) > tol) {
    std::ostringstream os;
    os << "lambda " << lambda << " outside the numerical range (distance " << poly.distance(lambda) << ")";
    throw OutsideRange(os.str());
  }

  if (auto dr = degenerate_range(T)) {
    if (dr->is_point()) return finish(ComplexVector::Unit(n, 0));
    return finish(solve_on_chord(T, dr->x_lo, dr->x_hi, lambda));
  }

  // Cheap route: the diagonal entries are attained by the coordinate vectors.
  {
    std::vector<ComplexVector> basis;
    std::vector<Complex> diag;
    for (Index j = 0; j < n; ++j) {
      basis.push_back(ComplexVector::Unit(n, j));
      diag.push_back(T(j, j));
    }
    if (auto u = attain_in_hull(T, basis, diag, lambda, 1e-13)) {
      if (std::abs(value_of(T, *u) - lambda) <= tol) return *u;
    }
  }

  // Boundary route: an attained point z1 on the far side of lambda, then
  // bisection on supporting angles for the boundary point where the ray
  // z1 -> lambda exits W(T).
  const Complex center = T.trace() / static_cast<double>(n);
  const double theta1 = std::abs(center - lambda) > 1e-14 ? std::arg(center - lambda) : 0.0;
  const SupportPoint p1 = support_point(T, theta1);
  if (std::abs(p1.value - lambda) <= tol) return finish(p1.x);
  const Complex dir = (lambda - p1.value) / std::abs(lambda - p1.value);
  const double theta_star = std::arg(dir);
  auto side = [&](const SupportPoint& sp) { return std::imag(std::conj(dir) * (sp.value - p1.value)); };

  SupportPoint lo = support_point(T, theta_star - kPi / 2);
  SupportPoint hi = support_point(T, theta_star + kPi / 2);
  double tlo = theta_star - kPi / 2, thi = theta_star + kPi / 2;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (tlo + thi);
    SupportPoint sp = support_point(T, mid);
    if (side(sp) <= 0.0) {
      lo = std::move(sp);
      tlo = mid;
    } else {
      hi = std::move(sp);
      thi = mid;
    }
  }
  const std::vector<ComplexVector> cand{p1.x, lo.x, hi.x};
  const std::vector<Complex> vals{p1.value, lo.value, hi.value};
  if (auto u = attain_in_hull(T, cand, vals, lambda, tol)) return finish(*u);
  throw NumericalBreakdown("inverse_numrange: boundary refinement stalled");
}

Polygon2D essential_range(const OperatorModel& model) { return Polygon2D::hull(model.limit_points()); }

std::optional<std::vector<double>> convex_weights(std::span<const Complex> points, Complex z, double tol) {
  const std::size_t n = points.size();
  if (n == 0) return std::nullopt;
  const Polygon2D poly = Polygon2D::hull(points);
  if (poly.distance(z) > tol) return std::nullopt;
  std::vector<double> w(n, 0.0);
  const auto& v = poly.vertices();
  if (poly.is_point()) {
    w[static_cast<std::size_t>(nearest_index(points, v[0]))] = 1.0;
    return w;
  }
  if (poly.is_segment()) {
    const Complex a = v[0], b = v[1];
    const double t = std::clamp(std::real((z - a) * std::conj(b - a)) / std::norm(b - a), 0.0, 1.0);
    w[static_cast<std::size_t>(nearest_index(points, a))] += 1.0 - t;
    w[static_cast<std::size_t>(nearest_index(points, b))] += t;
    return w;
  }
  // Fan triangulation from the first hull vertex; keep the triangle whose
  // worst barycentric coordinate is largest.
  double best_min = -std::numeric_limits<double>::infinity();
  std::array<double, 3> best_l{};
  std::size_t best_k = 1;
  for (std::size_t k = 1; k + 1 < v.size(); ++k) {
    auto l = barycentric(v[0], v[k], v[k + 1], z);
    if (!l) continue;
    const double m = std::min({(*l)[0], (*l)[1], (*l)[2]});
    if (m > best_min) {
      best_min = m;
      best_l = *l;
      best_k = k;
    }
  }
  double total = 0.0;
  for (double& l : best_l) {
    l = std::max(l, 0.0);
    total += l;
  }
  const std::array<Complex, 3> tri{v[0], v[best_k], v[best_k + 1]};
  for (int i = 0; i < 3; ++i) w[static_cast<std::size_t>(nearest_index(points, tri[i]))] += best_l[i] / total;
  return w;
}

WeVector we_vector(const OperatorModel& model, Complex target, double tol, const std::set<Index>& forbidden,
                   Index scan_from) {
  const Polygon2D hull = essential_range(model);
  if (hull.distance(target) > tol) {
    std::ostringstream os;
    os << "target " << target << " outside the essential range";
    throw OutsideRange(os.str());
  }
  const auto& lps = model.limit_points();
  const auto weights = convex_weights(lps, target, tol);
  if (!weights) throw OutsideRange("target outside the essential range");
  std::vector<std::size_t> active;
  for (std::size_t i = 0; i < weights->size(); ++i)
    if ((*weights)[i] > 0.0) active.push_back(i);

  const Index h = model.head_dim();
  Index max_index = -1;
  double eta = std::max(tol, 1e-300);
  for (int round = 0; round < 80; ++round, eta *= 0.25) {
    std::vector<Index> chosen;
    std::vector<Complex> entries;
    for (std::size_t a : active) {
      const Complex p = lps[a];
      Index g = std::max(scan_from, h);
      for (;; ++g) {
        if (g - h >= model.tail_capacity()) {
          std::ostringstream os;
          os << "we_vector: no fresh tail coordinate within " << eta << " of " << p << " below index " << g;
          throw ExhaustedTail(os.str());
        }
        max_index = std::max(max_index, g);
        if (forbidden.count(g) || std::find(chosen.begin(), chosen.end(), g) != chosen.end()) continue;
        const Complex d = model.tail_entry(g - h);
        if (std::abs(d - p) <= eta) {
          chosen.push_back(g);
          entries.push_back(d);
          break;
        }
      }
    }
    auto w = convex_weights(entries, target, std::numeric_limits<double>::infinity());
    if (!w) continue;
    Complex value = 0.0;
    for (std::size_t i = 0; i < entries.size(); ++i) value += (*w)[i] * entries[i];
    if (std::abs(value - target) > tol) continue;

    WeVector out;
    out.x = SparseVector(model.truncation_dim());
    std::vector<std::pair<Index, double>> coords;
    for (std::size_t i = 0; i < chosen.size(); ++i)
      if ((*w)[i] > 0.0) coords.emplace_back(chosen[i], std::sqrt((*w)[i]));
    std::sort(coords.begin(), coords.end());
    for (auto [g, c] : coords) {
      out.x.insert(g) = c;
      out.support.push_back(g);
    }
    out.x /= out.x.norm();
    out.value = model.quadratic_form(out.x);
    out.max_index = max_index;
    return out;
  }
  throw ExhaustedTail("we_vector: could not reach the target within tolerance");
}

}  // namespace numrange
