#include <doctest.h>

#include "helpers.hpp"
#include "numrange/linalg.hpp"

using namespace numrange;
using namespace testing;

TEST_CASE("herm_eig: diagonal input keeps the standard basis") {
  const HermEig h = herm_eig(diag({-1.0, 1.0}));
  CHECK(h.eigenvalues(0) == doctest::Approx(-1.0));
  CHECK(h.eigenvalues(1) == doctest::Approx(1.0));
  CHECK((h.eigenvectors.dense() - ComplexMatrix::Identity(2, 2)).norm() < 1e-14);
}

TEST_CASE("herm_eig: swap matrix has eigenvalues -1 and 1") {
  ComplexMatrix X(2, 2);
  X << 0.0, 1.0, 1.0, 0.0;
  const HermEig h = herm_eig(X);
  CHECK(h.eigenvalues(0) == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(h.eigenvalues(1) == doctest::Approx(1.0).epsilon(1e-14));
  const ComplexMatrix V = h.eigenvectors.dense();
  CHECK((X * V - V * h.eigenvalues.cast<Complex>().asDiagonal()).norm() < 1e-13);
}

TEST_CASE("herm_eig: zero matrix") {
  const HermEig h = herm_eig(ComplexMatrix::Zero(3, 3));
  CHECK(h.eigenvalues.cwiseAbs().maxCoeff() == 0.0);
  CHECK(h.eigenvectors.orthonormality_residual() < 1e-14);
}

TEST_CASE("herm_eig: rejects non-Hermitian input") {
  ComplexMatrix N(2, 2);
  N << 0.0, 1.0, 0.0, 0.0;
  CHECK_THROWS_AS(herm_eig(N), NotHermitian);
}

TEST_CASE("jacobi_eigen: random Hermitian reconstruction and determinism") {
  std::mt19937_64 rng(7);
  for (Index n : {1, 2, 5, 17, 40}) {
    const ComplexMatrix A = random_matrix(n, rng);
    const ComplexMatrix H = (A + A.adjoint()) / 2.0;
    const auto e1 = jacobi_eigen(H);
    const auto e2 = jacobi_eigen(H);
    CHECK((e1.vectors - e2.vectors).norm() == 0.0);
    const ComplexMatrix R = e1.vectors * e1.values.cast<Complex>().asDiagonal() * e1.vectors.adjoint();
    CHECK((R - H).norm() <= 1e-11 * std::max(1.0, H.norm()));
    for (Index i = 1; i < n; ++i) CHECK(e1.values(i - 1) <= e1.values(i) + 1e-12 * H.norm());
  }
}

TEST_CASE("gram_schmidt: hand cases") {
  const ComplexVector e1 = e(2, 0), e2 = e(2, 1);
  const std::vector<ComplexVector> in{e1, e1 + e2};
  const OrthonormalFrame f = gram_schmidt(in);
  CHECK((f.dense_vector(0) - e1).norm() < 1e-15);
  CHECK((f.dense_vector(1) - e2).norm() < 1e-15);

  std::mt19937_64 rng(3);
  const ComplexMatrix Q = householder_completion(random_unit(6, rng));
  std::vector<ComplexVector> cols;
  for (Index j = 0; j < 6; ++j) cols.push_back(Q.col(j));
  const OrthonormalFrame g = gram_schmidt(cols);
  for (Index j = 0; j < 6; ++j) CHECK((g.dense_vector(j) - Q.col(j)).norm() < 1e-12);

  const std::vector<ComplexVector> dep{e1, e1 * (1.0 + 1e-14)};
  CHECK_THROWS_AS(gram_schmidt(dep), RankDeficient);
}

TEST_CASE("compress: identity frame, coordinate frame, single vector") {
  std::mt19937_64 rng(11);
  const ComplexMatrix T = random_matrix(4, rng);
  CHECK((compress(T, OrthonormalFrame::standard_basis(4)) - T).norm() < 1e-15);

  const std::vector<ComplexVector> e12{e(3, 0), e(3, 1)};
  const ComplexMatrix B = compress(diag({1.0, 2.0, 3.0}), gram_schmidt(e12));
  CHECK((B - diag({1.0, 2.0})).norm() < 1e-15);

  const ComplexVector u = random_unit(4, rng);
  const std::vector<ComplexVector> one{u};
  const ComplexMatrix c = compress(T, gram_schmidt(one));
  REQUIRE(c.rows() == 1);
  CHECK(std::abs(c(0, 0) - quadratic_form(T, u)) < 1e-13);
  CHECK(std::abs(compressed_trace(T, OrthonormalFrame::standard_basis(4)) - T.trace()) < 1e-13);
}

TEST_CASE("householder_completion maps e1 to u and is unitary") {
  std::mt19937_64 rng(5);
  for (Index n : {1, 2, 7}) {
    const ComplexVector u = random_unit(n, rng);
    const ComplexMatrix Q = householder_completion(u);
    CHECK((Q.col(0) - u).norm() < 1e-14);
    CHECK((Q.adjoint() * Q - ComplexMatrix::Identity(n, n)).norm() < 1e-13);
  }
}

TEST_CASE("OrthonormalFrame validates and reports residuals") {
  std::vector<SparseVector> vs{to_sparse(e(3, 0)), to_sparse(e(3, 0))};
  CHECK_THROWS_AS(OrthonormalFrame(3, vs), RankDeficient);
  OrthonormalFrame f(3);
  f.append(to_sparse(e(3, 2)));
  f.append(to_sparse(e(3, 0)));
  CHECK(f.size() == 2);
  CHECK(f.max_support_index() == 2);
  CHECK(f.orthonormality_residual() == 0.0);
  CHECK_THROWS(f.append(to_sparse(e(3, 0))));
}
