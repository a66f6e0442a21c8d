#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <span>
#include <vector>

#include "numrange/errors.hpp"

namespace numrange {

using Index = Eigen::Index;
using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using SparseVector = Eigen::SparseVector<Complex>;

inline constexpr double kUnitTol = 1e-12;
inline constexpr double kFrameTol = 1e-10;
inline constexpr double kHermitianTol = 1e-12;

/// <Tx, y> with the inner product linear in the first slot.
template <typename MatT, typename VecX, typename VecY>
inline auto form(const Eigen::MatrixBase<MatT>& T, const Eigen::MatrixBase<VecX>& x,
                 const Eigen::MatrixBase<VecY>& y) {
  return y.dot(T * x);
}

/// <Tx, x>
template <typename MatT, typename VecX>
inline auto quadratic_form(const Eigen::MatrixBase<MatT>& T, const Eigen::MatrixBase<VecX>& x) {
  return x.dot(T * x);
}

template <typename Derived>
inline bool all_finite(const Eigen::MatrixBase<Derived>& m) {
  return m.allFinite();
}

/// Largest entrywise deviation from Hermitian symmetry.
template <typename Derived>
inline typename Eigen::NumTraits<typename Derived::Scalar>::Real hermitian_defect(
    const Eigen::MatrixBase<Derived>& H) {
  using Real = typename Eigen::NumTraits<typename Derived::Scalar>::Real;
  Real worst = 0;
  for (Index j = 0; j < H.cols(); ++j)
    for (Index i = 0; i <= j; ++i)
      worst = std::max<Real>(worst, std::abs(H(i, j) - Eigen::numext::conj(H(j, i))));
  return worst;
}

template <typename Scalar>
struct JacobiEigen {
  using Real = typename Eigen::NumTraits<Scalar>::Real;
  Eigen::Matrix<Real, Eigen::Dynamic, 1> values;                // ascending
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> vectors;  // columns
  int sweeps = 0;
};

/// Cyclic Jacobi eigensolver for dense Hermitian (or real symmetric) matrices.
///
/// Sweeps rotate every off-diagonal pair until the off-diagonal Frobenius norm
/// drops below `threshold * ||H||_F`. Eigenvalues come back ascending; each
/// eigenvector is scaled so its first non-negligible component is real and
/// positive, and ties keep the order of that component's index.
template <typename Derived>
JacobiEigen<typename Derived::Scalar> jacobi_eigen(const Eigen::MatrixBase<Derived>& input,
                                                   double threshold = 1e-13, int max_sweeps = 60) {
  using Scalar = typename Derived::Scalar;
  using Real = typename Eigen::NumTraits<Scalar>::Real;
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  if (input.rows() != input.cols()) throw DimensionMismatch("jacobi_eigen: matrix not square");
  if (!input.allFinite()) throw InvalidInput("jacobi_eigen: non-finite entry");
  const Index n = input.rows();
  const Real scale = std::max<Real>(1, input.cwiseAbs().maxCoeff());
  if (hermitian_defect(input) > kHermitianTol * scale)
    throw NotHermitian("asymmetry exceeds tolerance");

  Mat A = (input + input.adjoint()) / Real(2);
  Mat V = Mat::Identity(n, n);
  const Real fro = A.norm();
  auto off_norm = [&] {
    Real s = 0;
    for (Index j = 0; j < n; ++j)
      for (Index i = 0; i < n; ++i)
        if (i != j) s += std::norm(A(i, j));
    return std::sqrt(s);
  };

  int sweep = 0;
  for (; sweep < max_sweeps; ++sweep) {
    if (fro == 0 || off_norm() <= threshold * fro) break;
    for (Index p = 0; p < n - 1; ++p) {
      for (Index q = p + 1; q < n; ++q) {
        const Scalar apq = A(p, q);
        const Real b = std::abs(apq);
        if (b == 0) continue;
        const Real app = Eigen::numext::real(A(p, p));
        const Real aqq = Eigen::numext::real(A(q, q));
        // Negligible relative to both diagonal entries: annihilate directly.
        const Real g = Real(100) * b;
        if (sweep > 3 && std::abs(app) + g == std::abs(app) && std::abs(aqq) + g == std::abs(aqq)) {
          A(p, q) = A(q, p) = Scalar(0);
          continue;
        }
        const Scalar phase = apq / b;  // e^{i phi}
        const Real zeta = (aqq - app) / (Real(2) * b);
        const Real t = (zeta >= 0 ? Real(1) : Real(-1)) / (std::abs(zeta) + std::sqrt(Real(1) + zeta * zeta));
        const Real c = Real(1) / std::sqrt(Real(1) + t * t);
        const Real s = t * c;
        const Scalar ph_conj = Eigen::numext::conj(phase);
        // A <- A J with J = [[c, s], [-s conj(phase), c conj(phase)]]
        for (Index k = 0; k < n; ++k) {
          const Scalar akp = A(k, p), akq = A(k, q);
          A(k, p) = c * akp - s * ph_conj * akq;
          A(k, q) = s * akp + c * ph_conj * akq;
        }
        // A <- J^* A
        for (Index k = 0; k < n; ++k) {
          const Scalar apk = A(p, k), aqk = A(q, k);
          A(p, k) = c * apk - s * phase * aqk;
          A(q, k) = s * apk + c * phase * aqk;
        }
        A(p, q) = A(q, p) = Scalar(0);
        A(p, p) = Eigen::numext::real(A(p, p));
        A(q, q) = Eigen::numext::real(A(q, q));
        for (Index k = 0; k < n; ++k) {
          const Scalar vkp = V(k, p), vkq = V(k, q);
          V(k, p) = c * vkp - s * ph_conj * vkq;
          V(k, q) = s * vkp + c * ph_conj * vkq;
        }
      }
    }
  }
  if (sweep == max_sweeps && fro != 0 && off_norm() > threshold * fro)
    throw NumericalBreakdown("jacobi_eigen: no convergence within sweep limit");

  // Canonical phase: first component above 1e-12 made real positive.
  std::vector<Index> lead(n, 0);
  for (Index j = 0; j < n; ++j) {
    Index i = 0;
    while (i < n - 1 && std::abs(V(i, j)) <= Real(1e-12)) ++i;
    lead[j] = i;
    const Real mag = std::abs(V(i, j));
    if (mag > 0) V.col(j) *= Eigen::numext::conj(V(i, j)) / mag;
  }

  std::vector<Index> order(n);
  std::iota(order.begin(), order.end(), Index(0));
  const Real tie = Real(1e-12) * std::max<Real>(1, fro);
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
    const Real la = Eigen::numext::real(A(a, a)), lb = Eigen::numext::real(A(b, b));
    if (std::abs(la - lb) > tie) return la < lb;
    return lead[a] < lead[b];
  });

  JacobiEigen<Scalar> out;
  out.values.resize(n);
  out.vectors.resize(n, n);
  for (Index j = 0; j < n; ++j) {
    out.values(j) = Eigen::numext::real(A(order[j], order[j]));
    out.vectors.col(j) = V.col(order[j]);
  }
  out.sweeps = sweep;
  return out;
}

/// An ordered list of orthonormal vectors in C^ambient. Vectors are kept
/// sparse: the model constructions produce frames of thousands of vectors
/// supported on a handful of coordinates each.
class OrthonormalFrame {
 public:
  OrthonormalFrame() = default;
  explicit OrthonormalFrame(Index ambient_dim) : ambient_(ambient_dim) {}

  /// Validated construction; throws RankDeficient when the orthonormality
  /// invariant fails by more than `tol`.
  OrthonormalFrame(Index ambient_dim, std::vector<SparseVector> vectors, double tol = kFrameTol);

  static OrthonormalFrame from_dense(const ComplexMatrix& columns, double tol = kFrameTol);
  static OrthonormalFrame standard_basis(Index dim);

  Index ambient_dim() const noexcept { return ambient_; }
  Index size() const noexcept { return static_cast<Index>(vectors_.size()); }
  bool empty() const noexcept { return vectors_.empty(); }
  const SparseVector& operator[](Index i) const { return vectors_[static_cast<std::size_t>(i)]; }
  const std::vector<SparseVector>& vectors() const noexcept { return vectors_; }

  ComplexVector dense_vector(Index i) const;
  ComplexMatrix dense() const;

  /// Zero-pads (or trims zero rows) to a new ambient dimension.
  OrthonormalFrame with_ambient(Index ambient_dim) const;

  /// Appends `v` after checking it against the overlapping members.
  void append(SparseVector v, double tol = kFrameTol);

  /// Frame made of this frame's vectors followed by `other`'s.
  OrthonormalFrame concat(const OrthonormalFrame& other, double tol = kFrameTol) const;

  /// max_{i,j} |<v_i, v_j> - delta_ij|
  double orthonormality_residual() const;

  /// Largest coordinate index touched by any vector, or -1 for an empty frame.
  Index max_support_index() const;

 private:
  Index ambient_ = 0;
  std::vector<SparseVector> vectors_;
};

SparseVector to_sparse(const ComplexVector& v, double drop = 0.0);

struct HermEig {
  Eigen::VectorXd eigenvalues;  // ascending
  OrthonormalFrame eigenvectors;
};

/// Hermitian eigendecomposition through `jacobi_eigen`.
HermEig herm_eig(const ComplexMatrix& H);

/// Twice-run modified Gram-Schmidt. Throws RankDeficient when the Gram matrix
/// of the normalized inputs has smallest eigenvalue <= `tol`.
OrthonormalFrame gram_schmidt(std::span<const ComplexVector> vectors, double tol = 1e-10);

/// B(i,j) = <T f_j, f_i>.
ComplexMatrix compress(const ComplexMatrix& T, const OrthonormalFrame& frame);

/// sum_j <T f_j, f_j>, accumulated in frame order.
Complex compressed_trace(const ComplexMatrix& T, const OrthonormalFrame& frame);

/// Householder unitary Q (n x n) with Q e_1 = u for a unit vector u.
ComplexMatrix householder_completion(const ComplexVector& u);

}  // namespace numrange
