#include <doctest.h>

#include <numbers>

#include "helpers.hpp"
#include "numrange/numrange.hpp"

using namespace numrange;
using namespace testing;

namespace {

ComplexMatrix nilpotent() {
  ComplexMatrix J = ComplexMatrix::Zero(2, 2);
  J(0, 1) = 1.0;
  return J;
}

}  // namespace

TEST_CASE("support_point: diagonal, nilpotent and scalar cases") {
  const SupportPoint sp = support_point(diag({1.0, -1.0}), 0.0);
  CHECK(sp.s == doctest::Approx(1.0));
  CHECK(std::abs(std::abs(sp.x(0)) - 1.0) < 1e-14);

  for (double th : {0.0, 0.3, 1.7, 4.0}) {
    const SupportPoint j = support_point(nilpotent(), th);
    CHECK(j.s == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(std::abs(std::real(std::polar(1.0, -th) * j.value) - j.s) < 1e-13);
  }

  const Complex lambda(0.3, -2.0);
  const ComplexMatrix L = lambda * ComplexMatrix::Identity(3, 3);
  for (double th : {0.0, 1.0, 2.5})
    CHECK(support_point(L, th).s == doctest::Approx(std::real(std::polar(1.0, -th) * lambda)));
}

TEST_CASE("boundary_polygon: normal, nilpotent and 1x1 operators") {
  const Polygon2D seg = boundary_polygon(diag({0.0, 1.0}), 360);
  REQUIRE(seg.is_segment());
  CHECK(seg.distance(0.0) < 1e-12);
  CHECK(seg.distance(1.0) < 1e-12);
  CHECK(seg.distance(Complex(0.5, 0.1)) == doctest::Approx(0.1));

  // Disc of radius 1/2: every vertex lies on the circle, and the polygon's
  // inradius is cos(pi/m)/2.
  const int m = 720;
  const Polygon2D disc = boundary_polygon(nilpotent(), m);
  for (const Point& v : disc.vertices()) CHECK(std::abs(std::abs(v) - 0.5) < 1e-12);
  CHECK(0.5 - 0.5 * std::cos(std::numbers::pi / m) < 1e-4);
  for (double th = 0; th < 6.28; th += 0.1) CHECK(std::abs(disc.support(th) - 0.5) < 1e-4);

  ComplexMatrix one(1, 1);
  one(0, 0) = Complex(2.0, -1.0);
  const Polygon2D pt = boundary_polygon(one, 360);
  REQUIRE(pt.is_point());
  CHECK(std::abs(pt.vertices().front() - Complex(2.0, -1.0)) < 1e-15);
}

TEST_CASE("polygon_membership: closure versus relative interior") {
  const Polygon2D seg = boundary_polygon(diag({0.0, 1.0}), 90);
  CHECK_FALSE(polygon_membership(seg, 0.0, MembershipMode::relint));
  CHECK(polygon_membership(seg, 0.0, MembershipMode::closure));
  CHECK(polygon_membership(seg, 0.5, MembershipMode::relint));

  const std::vector<Point> tri{0.0, 1.0, Complex(0, 1)};
  const Polygon2D T = Polygon2D::hull(tri);
  CHECK(polygon_membership(T, Complex(0.25, 0.25), MembershipMode::closure));
  CHECK(polygon_membership(T, Complex(0.25, 0.25), MembershipMode::relint));
  for (const Point& v : tri) {
    CHECK(polygon_membership(T, v, MembershipMode::closure));
    CHECK_FALSE(polygon_membership(T, v, MembershipMode::relint));
  }
  CHECK_FALSE(polygon_membership(T, Complex(0.6, 0.6), MembershipMode::closure));
}

TEST_CASE("inverse_numrange: hand cases and post-condition") {
  const ComplexVector u = inverse_numrange(diag({0.0, 1.0}), 0.5);
  CHECK(std::abs(u.norm() - 1.0) < 1e-12);
  CHECK(std::abs(std::abs(u(0)) - std::sqrt(0.5)) < 1e-10);
  CHECK(std::abs(quadratic_form(diag({0.0, 1.0}), u) - 0.5) < 1e-10);

  std::mt19937_64 rng(19);
  const ComplexMatrix T = random_matrix(5, rng);
  const ComplexVector w = inverse_numrange(T, T(0, 0));
  CHECK(std::abs(quadratic_form(T, w) - T(0, 0)) < 1e-10);

  const ComplexVector z = inverse_numrange(nilpotent(), 0.2);
  CHECK(std::abs(z.norm() - 1.0) < 1e-12);
  CHECK(std::abs(z(1) * std::conj(z(0)) - 0.2) < 1e-10);

  CHECK_THROWS_AS(inverse_numrange(nilpotent(), 0.6), OutsideRange);
}

TEST_CASE("inverse_numrange: random interior targets of random matrices") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 20; ++trial) {
    const ComplexMatrix T = random_matrix(2 + trial % 7, rng);
    const ComplexVector a = random_unit(T.rows(), rng), b = random_unit(T.rows(), rng);
    const Complex lambda = 0.3 * quadratic_form(T, a) + 0.7 * quadratic_form(T, b);
    const ComplexVector u = inverse_numrange(T, lambda);
    CHECK(std::abs(quadratic_form(T, u) - lambda) <= 1e-10);
    CHECK(std::abs(u.norm() - 1.0) <= 1e-12);
  }
}

TEST_CASE("essential_range ignores the head") {
  const OperatorModel m0(ComplexMatrix::Zero(0, 0), {TailStream::geometric(1.0, Ratio{1, 2})}, {0.0});
  CHECK(essential_range(m0).is_point());

  const std::vector<TailStream> alt{TailStream::constant(-1.0), TailStream::constant(1.0)};
  const OperatorModel a(diag({5.0}), alt, {-1.0, 1.0});
  const OperatorModel b(diag({Complex(0, 7), 2.0}), alt, {-1.0, 1.0});
  const Polygon2D pa = essential_range(a), pb = essential_range(b);
  REQUIRE(pa.is_segment());
  CHECK(pa.vertices() == pb.vertices());
}

TEST_CASE("we_vector: limit point, interior point, outside") {
  const std::vector<TailStream> alt{TailStream::constant(0.0), TailStream::constant(1.0)};
  const OperatorModel m(ComplexMatrix::Zero(0, 0), alt, {0.0, 1.0});

  const WeVector at1 = we_vector(m, 1.0, 1e-10);
  CHECK(at1.support.size() == 1);
  CHECK(std::abs(at1.value - 1.0) < 1e-10);

  const WeVector half = we_vector(m, 0.5, 1e-10);
  CHECK(half.support.size() == 2);
  CHECK(std::abs(half.value - 0.5) < 1e-10);
  CHECK(std::abs(half.x.norm() - 1.0) < 1e-12);
  CHECK(std::abs(m.quadratic_form(half.x) - 0.5) < 1e-10);

  const WeVector fresh = we_vector(m, 0.5, 1e-10, std::set<Index>(half.support.begin(), half.support.end()));
  for (Index g : fresh.support) CHECK(std::find(half.support.begin(), half.support.end(), g) == half.support.end());

  CHECK_THROWS_AS(we_vector(m, 2.0, 1e-10), OutsideRange);
}

TEST_CASE("convex_weights reproduce the point") {
  const std::vector<Complex> pts{0.0, 1.0, Complex(0, 1)};
  const auto w = convex_weights(pts, Complex(0.25, 0.25), 1e-12);
  REQUIRE(w);
  Complex z = 0;
  double s = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) z += (*w)[i] * pts[i], s += (*w)[i];
  CHECK(std::abs(z - Complex(0.25, 0.25)) < 1e-14);
  CHECK(s == doctest::Approx(1.0));
  CHECK_FALSE(convex_weights(pts, Complex(1, 1), 1e-12));
}
