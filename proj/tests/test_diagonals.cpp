#include <doctest.h>

#include "helpers.hpp"
#include "numrange/diagonals.hpp"
#include "numrange/jointrange.hpp"
#include "numrange/verify.hpp"

using namespace numrange;
using namespace testing;

namespace {

const ComplexMatrix kEmpty = ComplexMatrix::Zero(0, 0);

OperatorModel alternating(Complex p, Complex q, Index capacity = OperatorModel::kDefaultCapacity) {
  return OperatorModel(kEmpty, {TailStream::constant(p), TailStream::constant(q)}, {p, q}, capacity);
}

OperatorModel three_points() {
  return OperatorModel(kEmpty,
                       {TailStream::geometric(0.5, Ratio{1, 2}, 0.0), TailStream::geometric(-0.25, Ratio{1, 3}, 1.0),
                        TailStream::geometric(0.125, Ratio{1, 2}, Complex(0, 1))},
                       {0.0, 1.0, Complex(0, 1)});
}

SparseVector coord(Index g) {
  SparseVector v(kModelAmbient);
  v.insert(g) = 1.0;
  return v;
}

}  // namespace

TEST_CASE("constant_diag_value") {
  CHECK(constant_diag_value(diag({0.0, 1.0})) == Complex(0.5));
  std::mt19937_64 rng(41);
  const ComplexMatrix T = random_matrix(5, rng);
  const Complex c(0.7, -1.2);
  CHECK(std::abs(constant_diag_value(T + c * ComplexMatrix::Identity(5, 5)) - constant_diag_value(T) - c) < 1e-14);
  const auto ops = paper_operators();
  for (const auto& M : ops.at("pair").members) CHECK(constant_diag_value(M) == Complex(0.0));
}

TEST_CASE("parker_basis: hand cases") {
  const DiagonalReport r = parker_basis(diag({0.0, 1.0}));
  for (const Complex& v : r.values) CHECK(std::abs(v - 0.5) < 1e-12);

  const Complex lambda(2.0, 1.0);
  const DiagonalReport s = parker_basis(lambda * ComplexMatrix::Identity(3, 3));
  CHECK((s.frame.dense() - ComplexMatrix::Identity(3, 3)).norm() == 0.0);
  for (const Complex& v : s.values) CHECK(v == lambda);
}

TEST_CASE("parker_basis: random matrices") {
  std::mt19937_64 rng(43);
  for (Index n : {2, 3, 8, 16, 33}) {
    const ComplexMatrix T = random_matrix(n, rng);
    const DiagonalReport r = parker_basis(T, 1e-8);
    const Complex mean = T.trace() / double(n);
    CHECK(r.frame.size() == n);
    CHECK(r.max_deviation <= 1e-8);
    CHECK(r.frame.orthonormality_residual() <= 1e-10);
    CHECK(r.max_trace_drift <= 1e-9);
    const ComplexMatrix B = compress(T, r.frame);
    for (Index i = 0; i < n; ++i) CHECK(std::abs(B(i, i) - mean) <= 1e-8);
    CHECK(std::abs(r.partial_sums.back() - T.trace()) <= 1e-9 * std::max(1.0, T.norm()));
    CHECK(dconst_in_relint_check(T, r));
  }
}

TEST_CASE("dconst_in_relint_check: segment and point cases") {
  CHECK(dconst_in_relint_check(diag({0.0, 1.0}), parker_basis(diag({0.0, 1.0}))));
  const ComplexMatrix L = Complex(1, 1) * ComplexMatrix::Identity(2, 2);
  CHECK(dconst_in_relint_check(L, parker_basis(L)));
}

TEST_CASE("chunk_selector: exact averages on an alternating tail") {
  const OperatorModel m = alternating(0.0, 1.0);
  const ChunkPlan plan = chunk_selector(m, 0.5, 1e-10, 5);
  REQUIRE(plan.chunks.size() >= 5);
  std::set<Index> seen;
  for (const Chunk& c : plan.chunks) {
    CHECK(std::abs(c.achieved_average - 0.5) <= 1e-10);
    Index ones = 0;
    for (Index g : c.coords) {
      CHECK(seen.insert(g).second);
      ones += m.tail_entry(g - m.head_dim()) == Complex(1.0);
    }
    CHECK(2 * ones == Index(c.coords.size()));
  }
}

TEST_CASE("chunk_selector: three limit points") {
  const OperatorModel m = three_points();
  const Complex lambda(0.25, 0.25);
  const ChunkPlan plan = chunk_selector(m, lambda, 1e-6, 4);
  for (const Chunk& c : plan.chunks) {
    Complex avg = 0.0;
    for (Index g : c.coords) avg += m.tail_entry(g - m.head_dim());
    avg /= double(c.coords.size());
    CHECK(std::abs(avg - lambda) <= 1e-6);
    CHECK(std::abs(avg - c.achieved_average) <= 1e-14);
  }
  CHECK_THROWS_AS(chunk_selector(m, 1.0, 1e-6, 1), OutsideRange);
}

TEST_CASE("constant_diag_basis") {
  const OperatorModel c(kEmpty, {TailStream::constant(0.3), TailStream::constant(-1.0)}, {0.3, -1.0});
  const DiagonalReport raw = constant_diag_basis(c, 0.3, 5, 1e-12);
  for (const Complex& v : raw.values) CHECK(v == Complex(0.3));

  const DiagonalReport rot = constant_diag_basis(alternating(-1.0, 1.0), 0.0, 50, 1e-10);
  CHECK(rot.frame.size() == 50);
  CHECK(rot.max_deviation <= 1e-10);
  CHECK(rot.frame.orthonormality_residual() <= 1e-12);

  const DiagonalReport tri = constant_diag_basis(three_points(), Complex(0.25, 0.25), 1000, 1e-6);
  CHECK(tri.max_deviation <= 1e-6);
  CHECK(tri.frame.orthonormality_residual() <= 1e-10);
}

TEST_CASE("constant_diag_basis: exhausted tail, then success after enlarging") {
  OperatorModel m = alternating(-1.0, 1.0, 256);
  CHECK_THROWS_AS(constant_diag_basis(m, 0.0, 400, 1e-10), ExhaustedTail);
  m.enlarge(4);
  CHECK(constant_diag_basis(m, 0.0, 400, 1e-10).frame.size() == 400);
}

TEST_CASE("subspace_extension: empty M and a single tail vector") {
  const OperatorModel m = alternating(-1.0, 1.0);
  {
    ConstantDiagonalStream s(m, -1.0, 1e-12, false);
    const ExtensionReport r = subspace_extension(m, s, OrthonormalFrame(kModelAmbient), -1.0, 1.0, 0.1);
    CHECK(std::abs(r.trace) <= 0.1);
  }
  {
    ConstantDiagonalStream s(m, -1.0, 1e-12, false);
    OrthonormalFrame M(kModelAmbient);
    M.append(coord(m.head_dim()));
    const ExtensionReport r = subspace_extension(m, s, M, -1.0, 1.0, 0.05);
    CHECK(std::abs(r.trace) <= 0.05);
    CHECK(std::abs(m.compressed_trace(r.frame) - r.trace) <= 1e-12);
    CHECK(r.gamma >= 0.0);
    CHECK(r.gamma < 1.0);
    // M' contains M.
    double captured = 0.0;
    for (const auto& v : r.frame.vectors()) captured += std::norm(v.coeff(m.head_dim()));
    CHECK(captured == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(r.frame.orthonormality_residual() <= 1e-10);
  }
  CHECK_THROWS_AS(ConstantDiagonalStream(m, -1.0, 1e-12, true), OutsideRange);
  ConstantDiagonalStream s(m, -1.0, 1e-12, false);
  CHECK_THROWS_AS(subspace_extension(m, s, OrthonormalFrame(kModelAmbient), 0.5, 1.0, 0.1), BadSignConfiguration);
}

TEST_CASE("affine_normalize") {
  const AffinePair p = affine_normalize(-1.0, 1.0, 0.5);
  CHECK(std::abs(p.a - 0.5) < 1e-15);
  CHECK(std::abs(p.b) < 1e-15);
  const AffinePair q = affine_normalize(0.0, 1.0, 0.25);
  CHECK(std::abs(q.a - 1.0) < 1e-15);
  CHECK(std::abs(q.b + 0.75) < 1e-15);
  CHECK(std::abs(q.a * (0.25 * 0.0 + 0.75 * 1.0) + q.b) < 1e-15);
  CHECK_THROWS_AS(affine_normalize(1.0, 1.0, 0.5), DegeneratePair);
  CHECK_THROWS_AS(affine_normalize(0.0, 1.0, 0.0), InvalidInput);
  CHECK_THROWS_AS(affine_normalize(0.0, 1.0, 1.0), InvalidInput);
}

TEST_CASE("fan_construct: one level and sign rule") {
  const OperatorModel m = fan_demo_model();
  const FanReport f = fan_construct(m, -1.0, 1.0, 1);
  REQUIRE(f.levels.size() == 1);
  CHECK(std::abs(f.levels[0].trace) < 1.0);
  CHECK_THROWS_AS(fan_construct(m, 1.0, 2.0, 3), BadSignConfiguration);
}

TEST_CASE("fan_construct: nested frames with vanishing partial traces") {
  const OperatorModel m = fan_demo_model();
  const FanReport f = fan_construct(m, -1.0, 1.0, 6);
  REQUIRE(f.levels.size() == 6);
  const FanCheck fc = fan_check(f.report, Index(f.report.values.size()));
  REQUIRE(fc.checkpoints.size() == 6);
  for (std::size_t k = 0; k < 6; ++k) {
    CHECK(fc.checkpoints[k] == f.levels[k].dim);
    CHECK(fc.magnitudes[k] < 1.0 / double(k + 1));
    // e_k lies in M_k.
    double captured = 0.0;
    for (Index j = 0; j < f.levels[k].dim; ++j) captured += std::norm(f.report.frame[j].coeff(Index(k)));
    CHECK(captured == doctest::Approx(1.0).epsilon(1e-10));
  }
  CHECK(f.report.frame.orthonormality_residual() <= 1e-10);
}

TEST_CASE("fan_check: constant reports and the pair on the standard basis") {
  const ComplexMatrix Z = ComplexMatrix::Zero(4, 4);
  const DiagonalReport zero = make_report(Z, OrthonormalFrame::standard_basis(4), 0.0);
  CHECK(fan_check(zero, 4).min_abs == 0.0);
  const DiagonalReport ones = make_report(ComplexMatrix::Identity(4, 4), OrthonormalFrame::standard_basis(4), 1.0);
  const FanCheck fc = fan_check(ones, 4);
  CHECK(fc.min_abs == 1.0);
  for (std::size_t k = 0; k < fc.magnitudes.size(); ++k) CHECK(fc.magnitudes[k] == double(k + 1));

  const OperatorTuple S = paper_operators().at("pair_embedded");
  std::vector<DiagonalReport> rs;
  for (const auto& M : S.members) rs.push_back(make_report(M, OrthonormalFrame::standard_basis(S.dim()), 0.0));
  for (const auto& r : rs)
    for (std::size_t k = 1; k < r.partial_sums.size(); ++k) CHECK(std::abs(r.partial_sums[k]) < 1e-15);
}

TEST_CASE("convex_comb_diag") {
  const OperatorModel m = fan_demo_model();
  CHECK_THROWS_AS(convex_comb_diag(m, 1.0, 1.0, 0.5, 2), DegeneratePair);
  CHECK_THROWS_AS(convex_comb_diag(m, -1.0, 1.0, 0.0, 2), InvalidInput);
  CHECK_THROWS_AS(convex_comb_diag(m, -1.0, 1.0, 1.0, 2), InvalidInput);

  const ConvexCombReport r = convex_comb_diag(m, -1.0, 1.0, 0.5, 10);
  CHECK(std::abs(r.affine.a * -1.0 + r.affine.b + 0.5) < 1e-15);
  CHECK(std::abs(r.affine.a * 1.0 + r.affine.b - 0.5) < 1e-15);
  REQUIRE(r.fan.levels.size() == 10);
  for (std::size_t k = 0; k < 10; ++k) CHECK(std::abs(r.fan.levels[k].trace) < 1.0 / double(k + 1));
}

TEST_CASE("empty case: positive diagonal with essential range {0}") {
  const OperatorModel m(kEmpty, {TailStream::geometric(1.0, Ratio{1, 2})}, {0.0});
  CHECK(essential_range(m).is_point());
  for (Index n : {1, 5, 20, 60}) {
    ComplexMatrix D = ComplexMatrix::Zero(n, n);
    for (Index j = 0; j < n; ++j) D(j, j) = m.tail_entry(j);
    CHECK(herm_eig(D).eigenvalues.minCoeff() > 0.0);
  }
}
