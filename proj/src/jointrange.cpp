#include "numrange/jointrange.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <thread>

namespace numrange {
namespace {

void check_tuple(const OperatorTuple& Ts, Index n) {
  if (Ts.members.empty()) throw InvalidInput("empty operator tuple");
  if (Ts.dim() != n) {
    std::ostringstream os;
    os << "vector of length " << n << " for operators of size " << Ts.dim();
    throw DimensionMismatch(os.str());
  }
}

ComplexVector gaussian(std::mt19937_64& rng, Index n) {
  std::normal_distribution<double> nd;
  ComplexVector v(n);
  for (Index i = 0; i < n; ++i) {
    const double re = nd(rng);
    const double im = nd(rng);
    v(i) = Complex(re, im);
  }
  return v;
}

void project_ball(ComplexVector& v) {
  const double n = v.norm();
  if (n > 1.0) v /= n;
}

struct Outcome {
  double distance = std::numeric_limits<double>::infinity();
  ComplexVector x, y;
};

class Objective {
 public:
  Objective(const OperatorTuple& Ts, const JointPoint& target) : Ts_(Ts), target_(target) {
    for (const auto& T : Ts.members) adj_.push_back(T.adjoint());
  }

  double joint(const ComplexVector& x, ComplexVector* grad) const {
    double f = 0.0;
    if (grad) grad->setZero(x.size());
    for (std::size_t k = 0; k < Ts_.members.size(); ++k) {
      const ComplexVector Tx = Ts_.members[k] * x;
      const Complex r = x.dot(Tx) - target_(static_cast<Index>(k));
      f += std::norm(r);
      if (grad) *grad += 2.0 * (std::conj(r) * Tx + r * (adj_[k] * x));
    }
    return f;
  }

  const OperatorTuple& tuple() const noexcept { return Ts_; }
  const JointPoint& target() const noexcept { return target_; }

  double ap(const ComplexVector& x, const ComplexVector& y, ComplexVector* gx, ComplexVector* gy) const {
    double f = 0.0;
    if (gx) gx->setZero(x.size());
    if (gy) gy->setZero(y.size());
    for (std::size_t k = 0; k < Ts_.members.size(); ++k) {
      const ComplexVector Tx = Ts_.members[k] * x;
      const Complex r = y.dot(Tx) - target_(static_cast<Index>(k));
      f += std::norm(r);
      if (gx) *gx += 2.0 * r * (adj_[k] * y);
      if (gy) *gy += 2.0 * std::conj(r) * Tx;
    }
    return f;
  }

 private:
  const OperatorTuple& Ts_;
  const JointPoint& target_;
  std::vector<ComplexMatrix> adj_;
};

// Real Jacobian of the residuals mu_k - target_k (rows: Re, Im per k) with
// respect to (Re z, Im z) for the stacked unknown z.
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

RealVector stack(const ComplexVector& r) {
  RealVector v(2 * r.size());
  v << r.real(), r.imag();
  return v;
}

ComplexVector unstack(const RealVector& v) {
  const Index n = v.size() / 2;
  ComplexVector z(n);
  for (Index i = 0; i < n; ++i) z(i) = Complex(v(i), v(n + i));
  return z;
}

// Removes from J the directions radial to the unit-norm blocks of z (block
// size N), so steps stay tangent to the spheres the retraction returns to.
RealMatrix tangent_jacobian(RealMatrix J, const ComplexVector& z, Index N) {
  const Index blocks = z.size() / N;
  const Index cols = J.cols();
  for (Index b = 0; b < blocks; ++b) {
    const ComplexVector u = z.segment(b * N, N);
    if (u.norm() < 1.0 - 1e-12) continue;
    RealVector radial = RealVector::Zero(cols);
    for (Index j = 0; j < N; ++j) {
      radial(b * N + j) = u(j).real();
      radial(cols / 2 + b * N + j) = u(j).imag();
    }
    radial.normalize();
    J -= (J * radial) * radial.transpose();
  }
  return J;
}

// Levenberg-Marquardt on the residual map; `retract` maps a raw step back to
// the feasible set. Gradient descent stalls where the range is thin, this
// finishes the job quadratically near zero-residual targets.
template <typename Residual, typename Jacobian, typename Retract>
ComplexVector lm_polish(ComplexVector z, Index block, Residual&& residual, Jacobian&& jacobian, Retract&& retract,
                        int iters) {
  ComplexVector r = residual(z);
  double f = r.squaredNorm();
  double nu = 1e-3;
  for (int it = 0; it < iters && f > 1e-32; ++it) {
    const RealMatrix J = tangent_jacobian(jacobian(z), z, block);
    const RealVector rr = stack(r);
    const RealMatrix JtJ = J.transpose() * J;
    const RealVector g = J.transpose() * rr;
    bool moved = false;
    for (int tries = 0; tries < 30; ++tries) {
      const RealMatrix A = JtJ + nu * std::max(1.0, JtJ.diagonal().maxCoeff()) * RealMatrix::Identity(JtJ.rows(), JtJ.cols());
      const RealVector d = A.ldlt().solve(-g);
      ComplexVector zn = retract(ComplexVector(z + unstack(d)));
      const ComplexVector rn = residual(zn);
      const double fn = rn.squaredNorm();
      if (fn < f) {
        z = std::move(zn);
        r = rn;
        f = fn;
        nu = std::max(nu / 4, 1e-15);
        moved = true;
        break;
      }
      nu *= 4;
    }
    if (!moved) break;
  }
  return z;
}

Outcome descend_joint(const Objective& obj, ComplexVector x, const ProbeConfig& cfg) {
  x.normalize();
  ComplexVector g;
  double f = obj.joint(x, &g);
  double s = 1.0;
  for (int it = 0; it < cfg.max_iters && f > 0.0; ++it) {
    const Complex along = x.dot(g);
    const ComplexVector gt = g - along.real() * x;
    const double gn2 = gt.squaredNorm();
    if (gn2 < 1e-32) break;
    s = std::min(2.0 * s, 1e6);
    bool moved = false;
    while (s > 1e-20) {
      ComplexVector xn = x - s * gt;
      xn.normalize();
      ComplexVector gn;
      const double fn = obj.joint(xn, &gn);
      if (fn <= f - cfg.armijo * s * gn2) {
        x = std::move(xn);
        g = std::move(gn);
        f = fn;
        moved = true;
        break;
      }
      s *= 0.5;
    }
    if (!moved) break;
  }
  if (f > 0.0) {
    const auto& Ts = obj.tuple();
    const auto& t = obj.target();
    const Index N = x.size(), n = Ts.arity();
    auto residual = [&](const ComplexVector& z) {
      ComplexVector r(n);
      for (Index k = 0; k < n; ++k) r(k) = quadratic_form(Ts.members[static_cast<std::size_t>(k)], z) - t(k);
      return r;
    };
    auto jacobian = [&](const ComplexVector& z) {
      RealMatrix J(2 * n, 2 * N);
      for (Index k = 0; k < n; ++k) {
        const auto& T = Ts.members[static_cast<std::size_t>(k)];
        const ComplexVector a = (T.adjoint() * z).conjugate();  // x^H T
        const ComplexVector b = T * z;
        for (Index j = 0; j < N; ++j) {
          const Complex re = a(j) + b(j), im = Complex(0, 1) * (a(j) - b(j));
          J(k, j) = re.real();
          J(n + k, j) = re.imag();
          J(k, N + j) = im.real();
          J(n + k, N + j) = im.imag();
        }
      }
      return J;
    };
    x = lm_polish(x, N, residual, jacobian, [](ComplexVector z) { return ComplexVector(z.normalized()); }, 60);
    f = obj.joint(x, nullptr);
  }
  return {std::sqrt(f), x, {}};
}

Outcome descend_ap(const Objective& obj, ComplexVector x, ComplexVector y, const ProbeConfig& cfg) {
  project_ball(x);
  project_ball(y);
  ComplexVector gx, gy;
  double f = obj.ap(x, y, &gx, &gy);
  double s = 1.0;
  for (int it = 0; it < cfg.max_iters && f > 0.0; ++it) {
    if (gx.squaredNorm() + gy.squaredNorm() < 1e-32) break;
    s = std::min(2.0 * s, 1e6);
    bool moved = false;
    while (s > 1e-20) {
      ComplexVector xn = x - s * gx, yn = y - s * gy;
      project_ball(xn);
      project_ball(yn);
      const double step2 = (xn - x).squaredNorm() + (yn - y).squaredNorm();
      if (step2 == 0.0) break;
      ComplexVector gxn, gyn;
      const double fn = obj.ap(xn, yn, &gxn, &gyn);
      if (fn <= f - cfg.armijo / s * step2) {
        x = std::move(xn);
        y = std::move(yn);
        gx = std::move(gxn);
        gy = std::move(gyn);
        f = fn;
        moved = true;
        break;
      }
      s *= 0.5;
    }
    if (!moved) break;
  }
  if (f > 0.0) {
    const auto& Ts = obj.tuple();
    const auto& t = obj.target();
    const Index N = x.size(), n = Ts.arity();
    auto split = [N](const ComplexVector& z) { return std::pair<ComplexVector, ComplexVector>(z.head(N), z.tail(N)); };
    auto residual = [&](const ComplexVector& z) {
      const auto [u, v] = split(z);
      ComplexVector r(n);
      for (Index k = 0; k < n; ++k) r(k) = form(Ts.members[static_cast<std::size_t>(k)], u, v) - t(k);
      return r;
    };
    auto jacobian = [&](const ComplexVector& z) {
      const auto [u, v] = split(z);
      RealMatrix J(2 * n, 4 * N);
      for (Index k = 0; k < n; ++k) {
        const auto& T = Ts.members[static_cast<std::size_t>(k)];
        const ComplexVector a = (T.adjoint() * v).conjugate();  // d/du: v^H T du
        const ComplexVector b = T * u;                          // d/dv: dv^H T u
        for (Index j = 0; j < N; ++j) {
          const Complex du_re = a(j), du_im = Complex(0, 1) * a(j);
          const Complex dv_re = b(j), dv_im = -Complex(0, 1) * b(j);
          J(k, j) = du_re.real();
          J(n + k, j) = du_re.imag();
          J(k, N + j) = dv_re.real();
          J(n + k, N + j) = dv_re.imag();
          J(k, 2 * N + j) = du_im.real();
          J(n + k, 2 * N + j) = du_im.imag();
          J(k, 3 * N + j) = dv_im.real();
          J(n + k, 3 * N + j) = dv_im.imag();
        }
      }
      return J;
    };
    auto retract = [&](ComplexVector z) {
      auto [u, v] = split(z);
      project_ball(u);
      project_ball(v);
      ComplexVector out(2 * N);
      out << u, v;
      return out;
    };
    ComplexVector z(2 * N);
    z << x, y;
    z = lm_polish(z, N, residual, jacobian, retract, 60);
    x = z.head(N);
    y = z.tail(N);
    f = obj.ap(x, y, nullptr, nullptr);
  }
  return {std::sqrt(f), x, y};
}

}  // namespace

OperatorTuple::OperatorTuple(std::vector<ComplexMatrix> ms) : members(std::move(ms)) {
  if (members.empty()) throw InvalidInput("operator tuple needs at least one member");
  const Index n = members.front().rows();
  for (const auto& T : members) {
    if (T.rows() != n || T.cols() != n) throw DimensionMismatch("tuple members must be square of equal size");
    if (!T.allFinite()) throw InvalidInput("non-finite entry in tuple member");
  }
}

std::vector<double> OperatorTuple::commutator_norms() const {
  std::vector<double> out;
  for (std::size_t j = 0; j < members.size(); ++j)
    for (std::size_t k = j + 1; k < members.size(); ++k)
      out.push_back((members[j] * members[k] - members[k] * members[j]).norm());
  return out;
}

OperatorTuple OperatorTuple::embedded(Index f) const {
  std::vector<ComplexMatrix> ms;
  for (const auto& T : members) {
    ComplexMatrix S = ComplexMatrix::Zero(dim() + f, dim() + f);
    S.topLeftCorner(dim(), dim()) = T;
    ms.push_back(std::move(S));
  }
  return OperatorTuple(std::move(ms));
}

JointPoint joint_point(const OperatorTuple& Ts, const ComplexVector& x) {
  check_tuple(Ts, x.size());
  if (std::abs(x.norm() - 1.0) > 1e-10) throw InvalidInput("joint_point: x is not a unit vector");
  JointPoint p(Ts.arity());
  for (Index k = 0; k < Ts.arity(); ++k) p(k) = quadratic_form(Ts.members[static_cast<std::size_t>(k)], x);
  return p;
}

JointPoint ap_point(const OperatorTuple& Ts, const ComplexVector& x, const ComplexVector& y) {
  check_tuple(Ts, x.size());
  check_tuple(Ts, y.size());
  if (x.norm() > 1.0 + 1e-10 || y.norm() > 1.0 + 1e-10) throw InvalidInput("ap_point: vectors must lie in the unit ball");
  JointPoint p(Ts.arity());
  for (Index k = 0; k < Ts.arity(); ++k) p(k) = form(Ts.members[static_cast<std::size_t>(k)], x, y);
  return p;
}

ProbeReport min_distance(const OperatorTuple& Ts, const JointPoint& target, ProbeMode mode, const ProbeConfig& cfg) {
  if (Ts.members.empty()) throw InvalidInput("empty operator tuple");
  if (target.size() != Ts.arity()) throw DimensionMismatch("target arity differs from tuple arity");
  if (cfg.restarts < 1) throw InvalidInput("restarts must be >= 1");
  const Objective obj(Ts, target);
  const Index n = Ts.dim();

  auto run = [&](int r) {
    std::mt19937_64 rng(cfg.seed + static_cast<std::uint64_t>(r));
    if (mode == ProbeMode::joint) return descend_joint(obj, gaussian(rng, n), cfg);
    std::uniform_real_distribution<double> ud;
    ComplexVector x = gaussian(rng, n), y = gaussian(rng, n);
    x *= std::pow(ud(rng), 0.5 / static_cast<double>(n)) / x.norm();
    y *= std::pow(ud(rng), 0.5 / static_cast<double>(n)) / y.norm();
    return descend_ap(obj, std::move(x), std::move(y), cfg);
  };

  unsigned threads = cfg.threads ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(cfg.restarts));
  std::vector<Outcome> results;
  results.reserve(static_cast<std::size_t>(cfg.restarts));
  int used = 0;
  while (used < cfg.restarts) {
    const int batch = std::min<int>(static_cast<int>(threads), cfg.restarts - used);
    std::vector<Outcome> part(static_cast<std::size_t>(batch));
    if (batch == 1) {
      part[0] = run(used);
    } else {
      std::vector<std::thread> pool;
      for (int b = 0; b < batch; ++b) pool.emplace_back([&, b] { part[static_cast<std::size_t>(b)] = run(used + b); });
      for (auto& th : pool) th.join();
    }
    bool stop = false;
    for (auto& o : part) {
      results.push_back(std::move(o));
      ++used;
      if (cfg.stop_below > 0.0 && results.back().distance <= cfg.stop_below) {
        stop = true;
        break;
      }
    }
    if (stop) break;
  }

  ProbeReport rep;
  rep.target = target;
  rep.mode = mode;
  rep.restarts = used;
  std::size_t best = 0;
  for (std::size_t i = 0; i < results.size(); ++i) {
    rep.seeds.push_back(cfg.seed + i);
    rep.distances.push_back(results[i].distance);
    if (results[i].distance < results[best].distance) best = i;
  }
  rep.best_x = results[best].x;
  rep.best_y = results[best].y;
  // Report the distance of the witness as re-evaluated.
  rep.best_point = mode == ProbeMode::joint ? joint_point(Ts, rep.best_x) : ap_point(Ts, rep.best_x, rep.best_y);
  rep.best_distance = (rep.best_point - target).norm();
  return rep;
}

std::map<std::string, OperatorTuple> paper_operators(Index f) {
  std::map<std::string, OperatorTuple> cat;
  ComplexMatrix T1 = ComplexMatrix::Zero(4, 4), T2 = T1, T3 = T1;
  T1(0, 2) = 1.0;
  T2(0, 3) = 1.0;
  T3(1, 2) = 1.0;
  cat.emplace("triple", OperatorTuple({T1, T2, T3}));
  cat.emplace("triple_embedded", cat.at("triple").embedded(f));

  ComplexMatrix P1 = ComplexMatrix::Zero(2, 2), P2 = P1;
  P1(1, 0) = 1.0;
  P2(0, 0) = 1.0;
  P2(1, 1) = -1.0;
  cat.emplace("pair", OperatorTuple({P1, P2}));
  cat.emplace("pair_embedded", cat.at("pair").embedded(f));
  return cat;
}

SegmentProbe convexity_probe(const OperatorTuple& Ts, const JointPoint& p, const JointPoint& q, int samples,
                             ProbeMode mode, const ProbeConfig& cfg, double threshold) {
  if (samples < 1) throw InvalidInput("samples must be >= 1");
  SegmentProbe out;
  out.p = p;
  out.q = q;
  out.threshold = threshold;
  ProbeConfig ends = cfg;
  ends.stop_below = 1e-10;
  out.p_distance = min_distance(Ts, p, mode, ends).best_distance;
  out.q_distance = min_distance(Ts, q, mode, ends).best_distance;
  if (out.p_distance > 1e-8 || out.q_distance > 1e-8) {
    std::ostringstream os;
    os << "endpoint not attained (distances " << out.p_distance << ", " << out.q_distance << ")";
    throw EndpointNotAttained(os.str());
  }
  for (int i = 1; i <= samples; ++i) {
    const double t = static_cast<double>(i) / (samples + 1);
    const double d = min_distance(Ts, t * p + (1.0 - t) * q, mode, cfg).best_distance;
    out.ts.push_back(t);
    out.distances.push_back(d);
    out.flags.push_back(d > threshold);
    out.nonconvex = out.nonconvex || d > threshold;
  }
  return out;
}

}  // namespace numrange
