#include "numrange/linalg.hpp"

#include <algorithm>
#include <sstream>

namespace numrange {

SparseVector to_sparse(const ComplexVector& v, double drop) {
  SparseVector s(v.size());
  for (Index i = 0; i < v.size(); ++i)
    if (std::abs(v(i)) > drop) s.insert(i) = v(i);
  return s;
}

OrthonormalFrame::OrthonormalFrame(Index ambient_dim, std::vector<SparseVector> vectors, double tol)
    : ambient_(ambient_dim), vectors_(std::move(vectors)) {
  if (size() > ambient_) throw RankDeficient("frame longer than ambient dimension");
  for (auto& v : vectors_) {
    if (v.size() != ambient_) throw DimensionMismatch("frame vector has wrong ambient size");
  }
  const double r = orthonormality_residual();
  if (!(r <= tol)) {
    std::ostringstream os;
    os << "orthonormality residual " << r << " exceeds " << tol;
    throw RankDeficient(os.str());
  }
}

OrthonormalFrame OrthonormalFrame::from_dense(const ComplexMatrix& columns, double tol) {
  std::vector<SparseVector> vs;
  vs.reserve(static_cast<std::size_t>(columns.cols()));
  for (Index j = 0; j < columns.cols(); ++j) vs.push_back(to_sparse(columns.col(j)));
  return OrthonormalFrame(columns.rows(), std::move(vs), tol);
}

OrthonormalFrame OrthonormalFrame::standard_basis(Index dim) {
  std::vector<SparseVector> vs;
  for (Index j = 0; j < dim; ++j) {
    SparseVector e(dim);
    e.insert(j) = 1.0;
    vs.push_back(std::move(e));
  }
  return OrthonormalFrame(dim, std::move(vs));
}

ComplexVector OrthonormalFrame::dense_vector(Index i) const { return ComplexVector(vectors_[static_cast<std::size_t>(i)]); }

ComplexMatrix OrthonormalFrame::dense() const {
  ComplexMatrix m = ComplexMatrix::Zero(ambient_, size());
  for (Index j = 0; j < size(); ++j)
    for (SparseVector::InnerIterator it((*this)[j]); it; ++it) m(it.index(), j) = it.value();
  return m;
}

OrthonormalFrame OrthonormalFrame::with_ambient(Index ambient_dim) const {
  if (ambient_dim < max_support_index() + 1)
    throw DimensionMismatch("with_ambient: would truncate frame support");
  OrthonormalFrame out(ambient_dim);
  for (const auto& v : vectors_) {
    SparseVector w(ambient_dim);
    for (SparseVector::InnerIterator it(v); it; ++it) w.insert(it.index()) = it.value();
    out.vectors_.push_back(std::move(w));
  }
  return out;
}

void OrthonormalFrame::append(SparseVector v, double tol) {
  if (v.size() != ambient_) throw DimensionMismatch("append: wrong ambient size");
  if (size() + 1 > ambient_) throw RankDeficient("append: frame would exceed ambient dimension");
  if (std::abs(v.norm() - 1.0) > tol) throw RankDeficient("append: vector not unit");
  for (const auto& u : vectors_) {
    if (std::abs(u.dot(v)) > tol) throw RankDeficient("append: vector not orthogonal to frame");
  }
  vectors_.push_back(std::move(v));
}

OrthonormalFrame OrthonormalFrame::concat(const OrthonormalFrame& other, double tol) const {
  if (other.ambient_ != ambient_) throw DimensionMismatch("concat: ambient mismatch");
  std::vector<SparseVector> vs = vectors_;
  vs.insert(vs.end(), other.vectors_.begin(), other.vectors_.end());
  return OrthonormalFrame(ambient_, std::move(vs), tol);
}

double OrthonormalFrame::orthonormality_residual() const {
  if (vectors_.empty()) return 0.0;
  // Rows renumbered onto the union of supports; the ambient may be huge.
  std::vector<Index> rows;
  for (const auto& v : vectors_)
    for (SparseVector::InnerIterator it(v); it; ++it) rows.push_back(it.index());
  std::sort(rows.begin(), rows.end());
  rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
  auto row_of = [&](Index g) { return static_cast<Index>(std::lower_bound(rows.begin(), rows.end(), g) - rows.begin()); };
  Eigen::SparseMatrix<Complex> S(std::max<Index>(1, static_cast<Index>(rows.size())), size());
  std::vector<Eigen::Triplet<Complex>> trip;
  for (Index j = 0; j < size(); ++j)
    for (SparseVector::InnerIterator it((*this)[j]); it; ++it) trip.emplace_back(row_of(it.index()), j, it.value());
  S.setFromTriplets(trip.begin(), trip.end());
  const Eigen::SparseMatrix<Complex> G = Eigen::SparseMatrix<Complex>(S.adjoint()) * S;
  double worst = 0.0;
  std::vector<char> diag_seen(static_cast<std::size_t>(size()), 0);
  for (Index k = 0; k < G.outerSize(); ++k) {
    for (Eigen::SparseMatrix<Complex>::InnerIterator it(G, k); it; ++it) {
      const bool on_diag = it.row() == it.col();
      if (on_diag) diag_seen[static_cast<std::size_t>(it.row())] = 1;
      worst = std::max(worst, std::abs(it.value() - (on_diag ? Complex(1.0) : Complex(0.0))));
    }
  }
  for (char seen : diag_seen)
    if (!seen) worst = std::max(worst, 1.0);
  return worst;
}

Index OrthonormalFrame::max_support_index() const {
  Index m = -1;
  for (const auto& v : vectors_)
    for (SparseVector::InnerIterator it(v); it; ++it) m = std::max<Index>(m, it.index());
  return m;
}

HermEig herm_eig(const ComplexMatrix& H) {
  auto je = jacobi_eigen(H);
  return HermEig{std::move(je.values), OrthonormalFrame::from_dense(je.vectors)};
}

OrthonormalFrame gram_schmidt(std::span<const ComplexVector> vectors, double tol) {
  if (vectors.empty()) return OrthonormalFrame(0);
  const Index n = vectors.front().size();
  const Index k = static_cast<Index>(vectors.size());
  ComplexMatrix V(n, k);
  for (Index j = 0; j < k; ++j) {
    const auto& v = vectors[static_cast<std::size_t>(j)];
    if (v.size() != n) throw DimensionMismatch("gram_schmidt: vectors of unequal length");
    if (!v.allFinite()) throw InvalidInput("gram_schmidt: non-finite entry");
    const double nv = v.norm();
    if (nv == 0.0) throw RankDeficient("gram_schmidt: zero vector");
    V.col(j) = v / nv;
  }
  if (k > n) throw RankDeficient("gram_schmidt: more vectors than dimension");
  const ComplexMatrix gram = V.adjoint() * V;
  const auto ge = jacobi_eigen(gram);
  if (ge.values(0) <= tol) {
    std::ostringstream os;
    os << "smallest Gram eigenvalue " << ge.values(0) << " <= " << tol;
    throw RankDeficient(os.str());
  }

  ComplexMatrix Q = V;
  for (Index j = 0; j < k; ++j) {
    for (int pass = 0; pass < 2; ++pass) {
      for (Index i = 0; i < j; ++i) Q.col(j) -= Q.col(i).dot(Q.col(j)) * Q.col(i);
    }
    Q.col(j).normalize();
  }
  return OrthonormalFrame::from_dense(Q);
}

ComplexMatrix compress(const ComplexMatrix& T, const OrthonormalFrame& frame) {
  if (T.rows() != T.cols() || frame.ambient_dim() != T.rows())
    throw DimensionMismatch("compress: frame ambient dimension differs from matrix size");
  const ComplexMatrix F = frame.dense();
  return F.adjoint() * T * F;
}

Complex compressed_trace(const ComplexMatrix& T, const OrthonormalFrame& frame) {
  if (T.rows() != T.cols() || frame.ambient_dim() != T.rows())
    throw DimensionMismatch("compressed_trace: frame ambient dimension differs from matrix size");
  Complex s = 0.0;
  for (Index j = 0; j < frame.size(); ++j) {
    const ComplexVector f = frame.dense_vector(j);
    s += quadratic_form(T, f);
  }
  return s;
}

ComplexMatrix householder_completion(const ComplexVector& u) {
  const Index n = u.size();
  const double mag = std::abs(u(0));
  const Complex omega = mag > 0 ? u(0) / mag : Complex(1.0);
  ComplexVector target = std::conj(omega) * u;  // first entry real, >= 0
  ComplexVector v = -target;
  v(0) += 1.0;
  ComplexMatrix H = ComplexMatrix::Identity(n, n);
  const double vv = v.squaredNorm();
  if (vv > 1e-300) H -= (2.0 / vv) * v * v.adjoint();
  return omega * H;
}

}  // namespace numrange
