#include <doctest.h>

#include "helpers.hpp"
#include "numrange/jointrange.hpp"

using namespace numrange;
using namespace testing;

namespace {

const double r2 = std::sqrt(0.5);

// Frozen oracle values: independent random search (1e6 samples plus local
// descent) over the unit sphere and over pairs of unit-ball vectors.
constexpr double kJointMidpointOracle = 0.121630;
constexpr double kApMidpointOracle = 0.062385;

ProbeConfig quick(int restarts, std::uint64_t seed = 20240229) {
  ProbeConfig c;
  c.restarts = restarts;
  c.seed = seed;
  return c;
}

JointPoint pt(std::initializer_list<Complex> z) { return vec(z); }

OperatorTuple op(const std::string& name) { return paper_operators().at(name); }

}  // namespace

TEST_CASE("catalog operators are exact and the triple commutes") {
  const auto ops = paper_operators();
  const OperatorTuple& T = ops.at("triple");
  CHECK(T.arity() == 3);
  CHECK(T.dim() == 4);
  for (double c : T.commutator_norms()) CHECK(c == 0.0);
  for (const auto& M : T.members) CHECK(M.imag().cwiseAbs().maxCoeff() == 0.0);

  const OperatorTuple& E = ops.at("triple_embedded");
  CHECK(E.dim() == 8);
  CHECK((E.members[1].topLeftCorner(4, 4) - T.members[1]).norm() == 0.0);
  CHECK(E.members[1].bottomRightCorner(4, 4).norm() == 0.0);

  const OperatorTuple& P = ops.at("pair");
  CHECK(P.dim() == 2);
  CHECK(std::abs(P.members[0].trace()) == 0.0);
  CHECK(std::abs(P.members[1].trace()) == 0.0);
}

TEST_CASE("joint_point at the attaining vectors") {
  const OperatorTuple T = op("triple");
  const JointPoint a = joint_point(T, vec({0.0, r2, r2, 0.0}));
  const JointPoint b = joint_point(T, vec({r2, 0.0, 0.0, r2}));
  CHECK((a - pt({0.0, 0.0, 0.5})).norm() <= 1e-12);
  CHECK((b - pt({0.0, 0.5, 0.0})).norm() <= 1e-12);
  const JointPoint c = joint_point(T, e(4, 0));
  for (Index k = 0; k < 3; ++k) CHECK(c(k) == T.members[std::size_t(k)](0, 0));
}

TEST_CASE("ap_point: diagonal pairs reproduce joint points, zero gives zero") {
  const OperatorTuple T = op("triple");
  std::mt19937_64 rng(29);
  for (int i = 0; i < 10; ++i) {
    const ComplexVector x = random_unit(4, rng);
    CHECK((ap_point(T, x, x) - joint_point(T, x)).norm() < 1e-14);
  }
  CHECK(ap_point(T, ComplexVector::Zero(4), random_unit(4, rng)).norm() == 0.0);
  const ComplexVector x = vec({0.0, r2, r2, 0.0});
  CHECK((ap_point(T, x, x) - pt({0.0, 0.0, 0.5})).norm() < 1e-12);
}

TEST_CASE("min_distance: example pair equals the one-dimensional oracle") {
  // <T1x,x>, <T2x,x> at u = |x1|^2 reduce to minimizing 3u^2 - 3u + 1 on [0,1].
  double oracle = 1e9;
  for (int i = 0; i <= 1000000; ++i) {
    const double u = i / 1e6;
    oracle = std::min(oracle, 3 * u * u - 3 * u + 1);
  }
  CHECK(oracle == doctest::Approx(0.25).epsilon(1e-12));
  const ProbeReport r = min_distance(op("pair"), pt({0.0, 0.0}), ProbeMode::joint, quick(20));
  CHECK(std::abs(r.best_distance - std::sqrt(oracle)) <= 1e-6);
}

TEST_CASE("min_distance: attained triple points are reached") {
  const OperatorTuple T = op("triple");
  for (const JointPoint& p : {pt({0.0, 0.0, 0.5}), pt({0.0, 0.5, 0.0})}) {
    CHECK(min_distance(T, p, ProbeMode::joint, quick(20)).best_distance <= 1e-8);
    CHECK(min_distance(T, p, ProbeMode::ap, quick(20)).best_distance <= 1e-8);
  }
}

TEST_CASE("min_distance: triple midpoint matches the frozen oracles") {
  const OperatorTuple T = op("triple");
  const JointPoint mid = pt({0.0, 0.25, 0.25});
  const ProbeReport j = min_distance(T, mid, ProbeMode::joint, quick(200));
  CHECK(j.best_distance >= 0.05);
  CHECK(j.best_distance == doctest::Approx(kJointMidpointOracle).epsilon(1e-5));
  CHECK(std::abs((joint_point(T, j.best_x) - mid).norm() - j.best_distance) <= 1e-10);

  const ProbeReport a = min_distance(T, mid, ProbeMode::ap, quick(200));
  CHECK(a.best_distance >= 0.05);
  // The oracle is an upper bound from sampling; the optimizer may only improve on it.
  CHECK(a.best_distance <= kApMidpointOracle + 1e-6);
  CHECK(a.best_distance >= kApMidpointOracle - 1e-4);
  CHECK(a.best_x.norm() <= 1.0 + 1e-12);
  CHECK(a.best_y.norm() <= 1.0 + 1e-12);
  CHECK(std::abs((ap_point(T, a.best_x, a.best_y) - mid).norm() - a.best_distance) <= 1e-10);
  // W is contained in W_AP.
  CHECK(a.best_distance <= j.best_distance + 1e-12);
}

TEST_CASE("min_distance is deterministic in the seed and independent of threads") {
  const OperatorTuple T = op("triple");
  const JointPoint mid = pt({0.0, 0.25, 0.25});
  ProbeConfig c1 = quick(16, 99), c2 = quick(16, 99);
  c1.threads = 1;
  c2.threads = 4;
  const ProbeReport a = min_distance(T, mid, ProbeMode::joint, c1);
  const ProbeReport b = min_distance(T, mid, ProbeMode::joint, c2);
  CHECK(a.best_distance == b.best_distance);
  CHECK(a.distances == b.distances);
  CHECK(a.seeds == b.seeds);
  CHECK((a.best_x - b.best_x).norm() == 0.0);
}

TEST_CASE("padding with zeros can only bring the midpoint closer") {
  // T (+) 0 can reach convex combinations with 0, but the midpoint stays far.
  const auto ops = paper_operators();
  const JointPoint mid = pt({0.0, 0.25, 0.25});
  const double d = min_distance(ops.at("triple"), mid, ProbeMode::joint, quick(60)).best_distance;
  const double de = min_distance(ops.at("triple_embedded"), mid, ProbeMode::joint, quick(60)).best_distance;
  CHECK(de <= d + 1e-9);
  CHECK(de > 0.0);
}

TEST_CASE("scaling the tuple scales distances") {
  const OperatorTuple P = op("pair");
  OperatorTuple S = P;
  for (auto& M : S.members) M *= 3.0;
  const double d = min_distance(P, pt({0.0, 0.0}), ProbeMode::joint, quick(20)).best_distance;
  const double ds = min_distance(S, pt({0.0, 0.0}), ProbeMode::joint, quick(20)).best_distance;
  CHECK(ds == doctest::Approx(3.0 * d).epsilon(1e-6));
}

TEST_CASE("convexity_probe flags the triple midpoint only") {
  const OperatorTuple T = op("triple");
  const SegmentProbe sp =
      convexity_probe(T, pt({0.0, 0.0, 0.5}), pt({0.0, 0.5, 0.0}), 9, ProbeMode::joint, quick(40), 0.05);
  CHECK(sp.nonconvex);
  REQUIRE(sp.ts.size() == 9);
  bool mid_flagged = false;
  for (std::size_t i = 0; i < sp.ts.size(); ++i)
    if (std::abs(sp.ts[i] - 0.5) < 1e-12) mid_flagged = sp.flags[i] && sp.distances[i] >= 0.05;
  CHECK(mid_flagged);
}

TEST_CASE("convexity_probe: commuting diagonal pair and single operators are convex") {
  const OperatorTuple D({diag({0.0, 1.0, 2.0}), diag({1.0, -1.0, 0.5})});
  const SegmentProbe sp = convexity_probe(D, joint_point(D, e(3, 0)), joint_point(D, e(3, 2)), 7,
                                          ProbeMode::joint, quick(20), 1e-6);
  CHECK_FALSE(sp.nonconvex);

  std::mt19937_64 rng(31);
  for (int i = 0; i < 3; ++i) {
    const OperatorTuple one({random_matrix(4, rng)});
    const JointPoint p = joint_point(one, random_unit(4, rng));
    const JointPoint q = joint_point(one, random_unit(4, rng));
    CHECK_FALSE(convexity_probe(one, p, q, 5, ProbeMode::joint, quick(20), 1e-6).nonconvex);
  }
}

TEST_CASE("convexity_probe rejects unattained endpoints") {
  const OperatorTuple P = op("pair");
  CHECK_THROWS_AS(convexity_probe(P, pt({0.0, 0.0}), joint_point(P, e(2, 0)), 3, ProbeMode::joint, quick(10), 1e-6),
                  EndpointNotAttained);
}

TEST_CASE("OperatorTuple validates member shapes") {
  CHECK_THROWS_AS(OperatorTuple({ComplexMatrix::Zero(2, 2), ComplexMatrix::Zero(3, 3)}), DimensionMismatch);
}
