#include "numrange/verify.hpp"

#include <chrono>
#include <functional>
#include <random>

namespace numrange {
namespace {

using io::Json;

struct Check {
  const char* name;
  const char* group;
  std::function<bool(std::uint64_t, CheckResult&)> run;
};

Json cjson(Complex z) { return io::complex_to_json(z); }

ComplexMatrix random_matrix(std::mt19937_64& rng, Index n) {
  std::normal_distribution<double> nd;
  ComplexMatrix m(n, n);
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < n; ++i) {
      const double re = nd(rng);
      const double im = nd(rng);
      m(i, j) = Complex(re, im);
    }
  return m;
}

ComplexVector random_unit(std::mt19937_64& rng, Index n) {
  std::normal_distribution<double> nd;
  ComplexVector v(n);
  for (Index i = 0; i < n; ++i) {
    const double re = nd(rng);
    const double im = nd(rng);
    v(i) = Complex(re, im);
  }
  return v.normalized();
}

JointPoint point(std::initializer_list<double> xs) {
  JointPoint p(static_cast<Index>(xs.size()));
  Index i = 0;
  for (double x : xs) p(i++) = x;
  return p;
}

bool theorem_triple(std::uint64_t seed, CheckResult& r) {
  const OperatorTuple T = paper_operators().at("triple");
  const double s = std::sqrt(2.0) / 2;
  ComplexVector xa(4), xb(4);
  xa << 0, s, s, 0;
  xb << s, 0, 0, s;
  const double ea = (joint_point(T, xa) - point({0, 0, 0.5})).norm();
  const double eb = (joint_point(T, xb) - point({0, 0.5, 0})).norm();
  ProbeConfig cfg;
  cfg.seed = seed;
  const ProbeReport mid = min_distance(T, point({0, 0.25, 0.25}), ProbeMode::joint, cfg);
  bool products_zero = true;
  for (const auto& A : T.members)
    for (const auto& B : T.members) products_zero = products_zero && (A * B).isZero(0.0);
  double comm = 0.0;
  for (double c : T.commutator_norms()) comm = std::max(comm, c);
  r.measured = {{"alpha_error", ea},
                {"beta_error", eb},
                {"midpoint_distance", mid.best_distance},
                {"restarts", mid.restarts},
                {"max_commutator_norm", comm},
                {"all_products_zero", products_zero}};
  r.tolerances = {{"attained", 1e-12}, {"midpoint_distance_min", 0.05}, {"commutator", 0.0}};
  return ea <= 1e-12 && eb <= 1e-12 && mid.best_distance >= 0.05 && products_zero && comm == 0.0;
}

bool asplund_ptak(std::uint64_t seed, CheckResult& r) {
  const OperatorTuple T = paper_operators().at("triple");
  ProbeConfig cfg;
  cfg.seed = seed;
  ProbeConfig hit = cfg;
  hit.stop_below = 1e-10;
  const ProbeReport a = min_distance(T, point({0, 0, 0.5}), ProbeMode::ap, hit);
  const ProbeReport b = min_distance(T, point({0, 0.5, 0}), ProbeMode::ap, hit);
  const ProbeReport mid = min_distance(T, point({0, 0.25, 0.25}), ProbeMode::ap, cfg);
  r.measured = {{"alpha_distance", a.best_distance},
                {"beta_distance", b.best_distance},
                {"midpoint_distance", mid.best_distance},
                {"midpoint_restarts", mid.restarts}};
  r.tolerances = {{"attained", 1e-8}, {"midpoint_distance_min", 0.05}};
  return a.best_distance <= 1e-8 && b.best_distance <= 1e-8 && mid.best_distance >= 0.05;
}

bool example_pair(std::uint64_t seed, CheckResult& r) {
  const OperatorTuple T = paper_operators().at("pair");
  ProbeConfig cfg;
  cfg.seed = seed;
  const ProbeReport p = min_distance(T, point({0, 0}), ProbeMode::joint, cfg);
  // |<T1x,x>|^2 + <T2x,x>^2 = 3u^2 - 3u + 1 with u = |x_1|^2.
  double grid = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= 100000; ++i) {
    const double u = i / 100000.0;
    grid = std::min(grid, std::sqrt(3 * u * u - 3 * u + 1));
  }
  r.measured = {{"distance", p.best_distance}, {"oracle", grid}, {"trace_T1", cjson(T.members[0].trace())},
                {"trace_T2", cjson(T.members[1].trace())}};
  r.tolerances = {{"distance", 1e-6}};
  return std::abs(p.best_distance - 0.5) <= 1e-6 && std::abs(grid - 0.5) <= 1e-12 &&
         T.members[0].trace() == Complex(0.0) && T.members[1].trace() == Complex(0.0);
}

bool parker_suite(std::uint64_t seed, CheckResult& r) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<Index> dim(2, 64);
  double dev = 0.0, ortho = 0.0, drift = 0.0;
  Index largest = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const Index n = trial == 0 ? 64 : dim(rng);
    largest = std::max(largest, n);
    const DiagonalReport rep = parker_basis(random_matrix(rng, n), 1e-8);
    dev = std::max(dev, rep.max_deviation);
    ortho = std::max(ortho, rep.frame.orthonormality_residual());
    drift = std::max(drift, rep.max_trace_drift);
  }
  r.measured = {{"matrices", 100}, {"largest_dim", largest}, {"max_deviation", dev},
                {"max_orthonormality_residual", ortho}, {"max_trace_drift", drift}};
  r.tolerances = {{"deviation", 1e-8}, {"orthonormality", 1e-10}, {"trace_drift", 1e-9}};
  return dev <= 1e-8 && ortho <= 1e-10 && drift <= 1e-9;
}

// Nesting, e_k membership and checkpoint bounds of a Fan construction.
bool fan_levels_ok(const FanReport& fr, double alpha, Json& levels) {
  bool ok = true;
  const OrthonormalFrame* prev = nullptr;
  Index k = 0;
  for (const auto& lvl : fr.levels) {
    ++k;
    const auto& frame = lvl.extension.frame;
    bool nested = true;
    if (prev) {
      nested = prev->size() <= frame.size();
      for (Index j = 0; nested && j < prev->size(); ++j) nested = ((*prev)[j] - frame[j]).norm() == 0.0;
    }
    double ek = 0.0;
    for (Index j = 0; j < frame.size(); ++j) ek += std::norm(frame[j].coeff(k - 1));
    const Complex sk = fr.report.partial_sums[static_cast<std::size_t>(lvl.dim - 1)];
    const bool level_ok = nested && std::abs(ek - 1.0) <= 1e-9 && std::abs(sk) < lvl.bound &&
                          std::abs(lvl.extension.trace) <= lvl.extension.eps &&
                          std::abs(lvl.extension.trace_K - alpha * static_cast<double>(lvl.extension.k)) <=
                              lvl.extension.eps / 2;
    levels.push_back({{"k", k},
                      {"dim", lvl.dim},
                      {"alpha_vectors", lvl.extension.k},
                      {"beta_vectors", lvl.extension.n},
                      {"gamma", lvl.extension.gamma},
                      {"abs_partial_sum", std::abs(sk)},
                      {"bound", lvl.bound},
                      {"abs_trace", std::abs(lvl.extension.trace)},
                      {"abs_trace_K_minus_alpha_k", std::abs(lvl.extension.trace_K - alpha * static_cast<double>(lvl.extension.k))},
                      {"eps", lvl.extension.eps},
                      {"nested", nested},
                      {"e_k_in_span", std::sqrt(ek)}});
    ok = ok && level_ok;
    prev = &frame;
  }
  return ok;
}

bool fan_lemma(std::uint64_t, CheckResult& r) {
  const OperatorModel m = fan_demo_model();
  const FanReport fr = fan_construct(m, -1.0, 1.0, 10);
  Json levels = Json::array();
  bool ok = fan_levels_ok(fr, -1.0, levels);
  // Each level's trace bound, recomputed from the frame it reports.
  for (const auto& lvl : fr.levels) {
    const Complex tr = m.compressed_trace(lvl.extension.frame);
    ok = ok && std::abs(tr - lvl.extension.trace) <= 1e-9 && std::abs(tr) <= lvl.extension.eps;
  }
  r.measured = {{"levels", levels}, {"final_dim", fr.report.frame.size()},
                {"orthonormality_residual", fr.report.frame.orthonormality_residual()}};
  r.tolerances = {{"partial_sum", "< 1/k"}, {"trace", "<= eps_k = 1/(2k)"}};
  return ok && fr.report.frame.orthonormality_residual() <= 1e-10;
}

bool convex_combination(std::uint64_t, CheckResult& r) {
  const OperatorModel m = fan_demo_model();
  bool ok = true;
  Json runs = Json::array();
  for (const auto& [t, levels] : std::vector<std::pair<double, Index>>{{0.25, 6}, {0.5, 10}, {0.75, 10}}) {
    const ConvexCombReport cr = convex_comb_diag(m, -1.0, 1.0, t, levels);
    const Complex a = cr.affine.a, b = cr.affine.b;
    const bool post = a * Complex(-1.0) + b == Complex(-(1.0 - t)) && a * Complex(1.0) + b == Complex(t);
    Json lv = Json::array();
    const bool lv_ok = fan_levels_ok(cr.fan, -(1.0 - t), lv);
    runs.push_back({{"t", t}, {"point", cjson(cr.point)}, {"a", cjson(a)}, {"b", cjson(b)},
                    {"postconditions_exact", post}, {"levels", lv}});
    ok = ok && post && lv_ok;
  }
  r.measured = {{"runs", runs}};
  r.tolerances = {{"affine", 0.0}, {"partial_sum", "< 1/k"}};
  return ok;
}

bool kadison_nonconvexity(std::uint64_t, CheckResult& r) {
  using namespace kadison;
  auto cat = catalog();
  const DiagonalSeq& d1 = cat.at("d1");
  const DiagonalSeq& d2 = cat.at("d2");
  const DiagonalSeq d0 = midpoint(d1, d2);
  bool entrywise = true;
  for (std::size_t i = 0; i < 64; ++i) entrywise = entrywise && d0.at(i) == cat.at("d0").at(i);
  const KadisonSums s0 = sums(d0);
  const bool main = decide(d1) == Decision::Diagonal && decide(d2) == Decision::Diagonal &&
                    same_projection_class(d1, d2) && decide(d0) == Decision::NotDiagonal;
  const bool exact = !s0.a.infinite && !s0.b.infinite && s0.a.value == Rational(1, 2) && s0.b.value == 0;
  bool invariant = true;
  Json conv = Json::object();
  for (const auto& [name, d] : cat) {
    const KadisonSums st = sums(d, Convention::strict), le = sums(d, Convention::le_half);
    bool same = decide(st) == decide(le);
    if (!st.a.infinite && !st.b.infinite && !le.a.infinite && !le.b.infinite)
      same = same && (le.a.value - le.b.value) - (st.a.value - st.b.value) == st.half_count;
    conv[name] = {{"strict", io::sums_to_json(st)}, {"le_half", io::sums_to_json(le)}, {"invariant", same}};
    invariant = invariant && same;
  }
  r.measured = {{"d1", to_string(decide(d1))},
                {"d2", to_string(decide(d2))},
                {"d0", to_string(decide(d0))},
                {"same_class_d1_d2", same_projection_class(d1, d2)},
                {"a_d0", to_string(s0.a)},
                {"b_d0", to_string(s0.b)},
                {"midpoint_matches_d0", entrywise},
                {"conventions", conv}};
  r.tolerances = {{"arithmetic", "exact"}};
  return main && exact && entrywise && invariant;
}

bool inclusion_chain(std::uint64_t, CheckResult& r) {
  const Complex I(0.0, 1.0);
  const OperatorModel m(ComplexMatrix(0, 0),
                        {TailStream::geometric(0.5, Ratio{1, 2}, 0.0), TailStream::geometric(-0.25, Ratio{1, 3}, 1.0),
                         TailStream::geometric(0.125, Ratio{1, 2}, I)},
                        {0.0, 1.0, I});
  const Complex lambda = (1.0 + I) / 4.0;
  const DiagonalReport rep = constant_diag_basis(m, lambda, 1000, 1e-6);
  const bool relint = essential_range(m).contains(lambda, MembershipMode::relint, kMembershipTol);
  const double ortho = rep.frame.orthonormality_residual();

  // diag(1, 1/2, 1/4, ...): sections are positive definite, W_e = {0}.
  const OperatorModel e(ComplexMatrix(0, 0), {TailStream::geometric(1.0, Ratio{1, 2}, 0.0)}, {0.0});
  double min_eig = std::numeric_limits<double>::infinity();
  bool pd = true;
  for (Index n = 1; n <= 64; ++n) {
    ComplexMatrix S = ComplexMatrix::Zero(n, n);
    for (Index j = 0; j < n; ++j) S(j, j) = e.tail_entry(j);
    const double lo = jacobi_eigen(S).values.minCoeff();
    pd = pd && lo > 0.0;
    min_eig = std::min(min_eig, lo);
  }
  const Polygon2D ess = essential_range(e);
  r.measured = {{"vectors", rep.frame.size()},
                {"max_deviation", rep.max_deviation},
                {"orthonormality_residual", ortho},
                {"max_index", rep.max_index},
                {"lambda_in_relint", relint},
                {"empty_case_sections_pd", pd},
                {"empty_case_min_eigenvalue", min_eig},
                {"empty_case_essential_range_is_point_zero", ess.is_point() && ess.vertices()[0] == Complex(0.0)}};
  r.tolerances = {{"deviation", 1e-6}, {"orthonormality", 1e-10}};
  return rep.frame.size() == 1000 && rep.max_deviation <= 1e-6 && ortho <= 1e-10 && relint && pd && ess.is_point() &&
         ess.vertices()[0] == Complex(0.0);
}

bool fan_fails_for_pairs(std::uint64_t seed, CheckResult& r) {
  const Index f = 4;
  const auto cat = paper_operators(f);
  const OperatorTuple& S = cat.at("pair_embedded");
  const OperatorTuple& T = cat.at("pair");
  const Index N = S.dim();
  bool sums_vanish = true;
  for (const auto& Si : S.members) {
    Complex s = 0.0;
    for (Index k = 0; k < N; ++k) {
      s += Si(k, k);
      if (k >= 1) sums_vanish = sums_vanish && s == Complex(0.0);
    }
  }
  ProbeConfig cfg;
  cfg.seed = seed;
  const double dist = min_distance(T, point({0, 0}), ProbeMode::joint, cfg).best_distance;

  std::mt19937_64 rng(seed);
  double scaling = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const ComplexVector h = random_unit(rng, N);
    const ComplexVector x = h.head(2);
    const double w = x.squaredNorm();
    scaling = std::max(scaling, (joint_point(S, h) - w * joint_point(T, x / std::sqrt(w))).norm());
  }
  // Any basis has sum_j |P h_j|^2 = 2, so some h_j carries |P h_j|^2 >= 2/N and
  // its diagonal entry sits at distance >= dist * 2/N from (0,0).
  const double bound = dist * 2.0 / static_cast<double>(N);
  double worst_basis = std::numeric_limits<double>::infinity();
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::HouseholderQR<ComplexMatrix> qr(random_matrix(rng, N));
    const ComplexMatrix Q = qr.householderQ();
    double far = 0.0;
    for (Index j = 0; j < N; ++j) far = std::max(far, joint_point(S, Q.col(j)).norm());
    worst_basis = std::min(worst_basis, far);
  }
  r.measured = {{"partial_sums_vanish_k_ge_2", sums_vanish},
                {"pair_min_distance", dist},
                {"max_scaling_error", scaling},
                {"constant_diagonal_gap_bound", bound},
                {"min_over_random_bases_of_max_entry", worst_basis}};
  r.tolerances = {{"distance", 1e-6}, {"scaling", 1e-12}};
  return sums_vanish && std::abs(dist - 0.5) <= 1e-6 && scaling <= 1e-12 && bound > 0.0 &&
         worst_basis >= bound - 1e-9;
}

bool single_operator_convexity(std::uint64_t seed, CheckResult& r) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<Index> dim(2, 6);
  ProbeConfig cfg;
  cfg.seed = seed;
  cfg.restarts = 20;
  cfg.stop_below = 1e-9;
  int flags = 0;
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const Index n = dim(rng);
    const OperatorTuple T({random_matrix(rng, n)});
    const JointPoint p = joint_point(T, random_unit(rng, n));
    const JointPoint q = joint_point(T, random_unit(rng, n));
    const SegmentProbe sp = convexity_probe(T, p, q, 9, ProbeMode::joint, cfg, 1e-6);
    for (std::size_t i = 0; i < sp.flags.size(); ++i) {
      flags += sp.flags[i] ? 1 : 0;
      worst = std::max(worst, sp.distances[i]);
    }
  }
  r.measured = {{"operators", 20}, {"samples_each", 9}, {"flags", flags}, {"max_interior_distance", worst}};
  r.tolerances = {{"threshold", 1e-6}};
  return flags == 0;
}

const std::vector<Check>& checks() {
  static const std::vector<Check> all = {
      {"theorem_triple", "jointrange", theorem_triple},
      {"asplund_ptak", "jointrange", asplund_ptak},
      {"example_pair", "jointrange", example_pair},
      {"parker_suite", "diagonals", parker_suite},
      {"fan_lemma", "diagonals", fan_lemma},
      {"convex_combination", "diagonals", convex_combination},
      {"kadison_nonconvexity", "kadison", kadison_nonconvexity},
      {"inclusion_chain", "diagonals", inclusion_chain},
      {"fan_fails_for_pairs", "jointrange", fan_fails_for_pairs},
      {"single_operator_convexity", "jointrange", single_operator_convexity},
  };
  return all;
}

}  // namespace

OperatorModel fan_demo_model() {
  ComplexMatrix H(3, 3);
  H << Complex(-2.0, 0.5), 1.0, 0.0,  //
      0.0, Complex(0.5, -0.5), 2.0,   //
      Complex(0.0, 1.0), 0.0, -1.5;
  return OperatorModel(H, {TailStream::periodic({-9.0, 1.0, 1.0, 1.0, 1.0})}, {-9.0, 1.0});
}

bool VerificationReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

io::Json VerificationReport::to_json() const {
  Json cs = Json::array();
  for (const auto& c : checks) {
    Json j{{"name", c.name},
           {"group", c.group},
           {"status", c.passed ? "pass" : "fail"},
           {"measured", c.measured},
           {"tolerances", c.tolerances},
           {"runtime_s", c.seconds}};
    if (!c.detail.empty()) j["detail"] = c.detail;
    cs.push_back(std::move(j));
  }
  return Json{{"seed", seed}, {"all_passed", all_passed()}, {"checks", cs}};
}

std::vector<std::string> check_names() {
  std::vector<std::string> out;
  for (const auto& c : checks()) out.emplace_back(c.name);
  return out;
}

std::string check_group(const std::string& name) {
  for (const auto& c : checks())
    if (name == c.name) return c.group;
  throw InvalidInput("unknown check '" + name + "'");
}

VerificationReport verify_paper(std::uint64_t seed, const std::vector<std::string>& only) {
  for (const auto& f : only) {
    const bool known = std::any_of(checks().begin(), checks().end(),
                                   [&](const Check& c) { return f == c.name || f == c.group; });
    if (!known) throw InvalidInput("unknown check or group '" + f + "'");
  }
  VerificationReport rep;
  rep.seed = seed;
  for (const auto& c : checks()) {
    if (!only.empty() && std::none_of(only.begin(), only.end(), [&](const std::string& f) {
          return f == c.name || f == c.group;
        }))
      continue;
    CheckResult res;
    res.name = c.name;
    res.group = c.group;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      res.passed = c.run(seed, res);
    } catch (const std::exception& e) {
      res.passed = false;
      res.detail = e.what();
    }
    res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    rep.checks.push_back(std::move(res));
  }
  return rep;
}

}  // namespace numrange
