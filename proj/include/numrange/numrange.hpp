#pragma once

#include <optional>
#include <set>
#include <vector>

#include "numrange/linalg.hpp"
#include "numrange/model.hpp"
#include "numrange/polygon.hpp"

namespace numrange {

inline constexpr int kDefaultAngles = 360;
inline constexpr double kMembershipTol = 1e-8;

struct SupportPoint {
  double s = 0.0;       // largest eigenvalue of Re(e^{-i theta} T)
  ComplexVector x;      // unit eigenvector
  Complex value = 0.0;  // <Tx, x>, on the line Re(e^{-i theta} z) = s
};

/// Support of W(T) in direction theta.
SupportPoint support_point(const ComplexMatrix& T, double theta);

/// Numerical range whose closure is a point or a segment: T = c + e^{i psi} A
/// with A Hermitian.
struct DegenerateRange {
  Complex center = 0.0;
  Complex direction = 1.0;  // e^{i psi}
  double lo = 0.0, hi = 0.0;
  ComplexVector x_lo, x_hi;  // attaining unit vectors
  bool is_point() const { return hi - lo <= 0.0; }
};

/// Detects T = c I + e^{i psi} A (A Hermitian, checked to 1e-10).
std::optional<DegenerateRange> degenerate_range(const ComplexMatrix& T);

/// Convex hull of <T x_theta, x_theta> over a uniform grid of `angles` directions.
Polygon2D boundary_polygon(const ComplexMatrix& T, int angles = kDefaultAngles);

bool polygon_membership(const Polygon2D& poly, Complex z, MembershipMode mode, double tol = kMembershipTol);

/// Unit u with |<Tu,u> - lambda| <= tol. Throws OutsideRange when lambda is not
/// in the closure of boundary_polygon(T, angles) within tol.
ComplexVector inverse_numrange(const ComplexMatrix& T, Complex lambda, double tol = 1e-10,
                               int angles = kDefaultAngles);

/// Given unit vectors whose values <T x_j, x_j> are known, returns a unit
/// vector attaining lambda when lambda lies in the convex hull of those
/// values (up to `slack`). Uses at most two 2x2 chord solves.
std::optional<ComplexVector> attain_in_hull(const ComplexMatrix& T, std::span<const ComplexVector> vectors,
                                            std::span<const Complex> values, Complex lambda, double slack = 1e-12);

/// Unit vector in span{x, y} attaining mu, where mu lies on the segment
/// [<Tx,x>, <Ty,y>] (mu is projected onto that segment first).
ComplexVector solve_on_chord(const ComplexMatrix& T, const ComplexVector& x, const ComplexVector& y, Complex mu);

/// Convex hull of the model's limit points; the head plays no role.
Polygon2D essential_range(const OperatorModel& model);

/// Convex weights (one per point, at most three nonzero) reproducing z, or
/// nullopt when z is farther than `tol` from the hull.
std::optional<std::vector<double>> convex_weights(std::span<const Complex> points, Complex z, double tol);

struct WeVector {
  SparseVector x;                // global coordinates, unit norm
  std::vector<Index> support;    // global coordinate indices used
  Complex value = 0.0;           // <Tx, x>
  Index max_index = -1;          // largest global index inspected
};

/// Unit vector on fresh tail coordinates (not in `forbidden`, not below
/// `scan_from`) with |<Tx,x> - target| <= tol.
WeVector we_vector(const OperatorModel& model, Complex target, double tol, const std::set<Index>& forbidden = {},
                   Index scan_from = 0);

}  // namespace numrange
