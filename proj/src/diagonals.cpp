#include "numrange/diagonals.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>
#include <limits>
#include <set>
#include <unordered_map>

namespace numrange {
namespace {

// Nonnegative y with sum_i y_i q_i = v using at most two generators.
std::optional<std::vector<double>> conic_combination(std::span<const Complex> q, Complex v) {
  const std::size_t n = q.size();
  std::vector<double> y(n, 0.0);
  const double scale = 1.0 + std::abs(v);
  if (std::abs(v) <= 1e-15) return y;
  std::optional<std::vector<double>> best;
  double best_total = std::numeric_limits<double>::infinity();
  auto consider = [&](std::vector<double> cand) {
    Complex r = v;
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (cand[i] < -1e-13) return;
      cand[i] = std::max(cand[i], 0.0);
      r -= cand[i] * q[i];
      total += cand[i];
    }
    if (std::abs(r) > 1e-11 * scale) return;
    if (total < best_total) {
      best_total = total;
      best = std::move(cand);
    }
  };
  for (std::size_t i = 0; i < n; ++i) {
    const double qq = std::norm(q[i]);
    if (qq == 0.0) continue;
    std::vector<double> cand(n, 0.0);
    cand[i] = std::real(v * std::conj(q[i])) / qq;
    consider(std::move(cand));
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double det = q[i].real() * q[j].imag() - q[i].imag() * q[j].real();
      if (std::abs(det) <= 1e-14 * (std::norm(q[i]) + std::norm(q[j]))) continue;
      std::vector<double> cand(n, 0.0);
      cand[i] = (v.real() * q[j].imag() - v.imag() * q[j].real()) / det;
      cand[j] = (q[i].real() * v.imag() - q[i].imag() * v.real()) / det;
      consider(std::move(cand));
    }
  }
  return best;
}

// Restriction of T to a set of global coordinates (head block plus tail diagonal).
ComplexMatrix coordinate_block(const OperatorModel& model, std::span<const Index> coords) {
  const Index s = static_cast<Index>(coords.size());
  const Index h = model.head_dim();
  ComplexMatrix B = ComplexMatrix::Zero(s, s);
  for (Index i = 0; i < s; ++i) {
    const Index gi = coords[static_cast<std::size_t>(i)];
    for (Index j = 0; j < s; ++j) {
      const Index gj = coords[static_cast<std::size_t>(j)];
      if (gi < h && gj < h) B(i, j) = model.head()(gi, gj);
    }
    if (gi >= h) B(i, i) = model.tail_entry(gi - h);
  }
  return B;
}

SparseVector lift(std::span<const Index> coords, const ComplexVector& local) {
  SparseVector v(kModelAmbient);
  std::vector<std::pair<Index, Complex>> entries;
  for (std::size_t i = 0; i < coords.size(); ++i)
    if (local(static_cast<Index>(i)) != Complex(0.0)) entries.emplace_back(coords[i], local(static_cast<Index>(i)));
  std::sort(entries.begin(), entries.end(), [](auto& a, auto& b) { return a.first < b.first; });
  v.reserve(static_cast<Index>(entries.size()));
  for (auto& [g, c] : entries) v.insert(g) = c;
  return v;
}

std::vector<Index> support_of(const SparseVector& v) {
  std::vector<Index> s;
  for (SparseVector::InnerIterator it(v); it; ++it) s.push_back(it.index());
  return s;
}

struct UnionFind {
  std::unordered_map<Index, Index> parent;
  Index find(Index x) {
    auto it = parent.find(x);
    if (it == parent.end()) {
      parent.emplace(x, x);
      return x;
    }
    Index root = x;
    while (parent[root] != root) root = parent[root];
    while (parent[x] != root) {
      const Index next = parent[x];
      parent[x] = root;
      x = next;
    }
    return root;
  }
  void unite(Index a, Index b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

// Gram-Schmidt (two passes) that only visits earlier vectors sharing a
// coordinate; disjointly supported vectors are exactly orthogonal.
std::vector<SparseVector> sparse_gram_schmidt(std::vector<SparseVector> vs, double tol) {
  std::unordered_map<Index, std::vector<std::size_t>> touching;
  for (std::size_t j = 0; j < vs.size(); ++j) {
    const double nv = vs[j].norm();
    if (!(nv > std::sqrt(tol))) throw RankDeficient("sparse_gram_schmidt: vector (nearly) in span of predecessors");
    vs[j] /= nv;
    for (int pass = 0; pass < 2; ++pass) {
      std::vector<std::size_t> near;
      for (SparseVector::InnerIterator it(vs[j]); it; ++it) {
        auto f = touching.find(it.index());
        if (f != touching.end()) near.insert(near.end(), f->second.begin(), f->second.end());
      }
      std::sort(near.begin(), near.end());
      near.erase(std::unique(near.begin(), near.end()), near.end());
      for (std::size_t i : near) {
        const Complex coef = vs[i].dot(vs[j]);
        if (std::abs(coef) > 1e-15) vs[j] -= coef * vs[i];
      }
      const double nj = vs[j].norm();
      if (!(nj > std::sqrt(tol))) throw RankDeficient("sparse_gram_schmidt: vector (nearly) in span of predecessors");
      vs[j] /= nj;
    }
    for (SparseVector::InnerIterator it(vs[j]); it; ++it) touching[it.index()].push_back(j);
  }
  return vs;
}

// Gershgorin lower bound on the smallest eigenvalue of the Gram matrix.
double gram_lower_bound(const std::vector<SparseVector>& vs) {
  std::unordered_map<Index, std::vector<std::size_t>> touching;
  for (std::size_t j = 0; j < vs.size(); ++j)
    for (SparseVector::InnerIterator it(vs[j]); it; ++it) touching[it.index()].push_back(j);
  double bound = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < vs.size(); ++j) {
    std::vector<std::size_t> near;
    for (SparseVector::InnerIterator it(vs[j]); it; ++it) {
      const auto& t = touching[it.index()];
      near.insert(near.end(), t.begin(), t.end());
    }
    std::sort(near.begin(), near.end());
    near.erase(std::unique(near.begin(), near.end()), near.end());
    double off = 0.0;
    for (std::size_t i : near)
      if (i != j) off += std::abs(vs[i].dot(vs[j]));
    bound = std::min(bound, vs[j].squaredNorm() - off);
  }
  return vs.empty() ? 1.0 : bound;
}

}  // namespace

DiagonalReport make_report(const ComplexMatrix& T, OrthonormalFrame frame, Complex target) {
  DiagonalReport r;
  r.target = target;
  Complex s = 0.0;
  for (Index j = 0; j < frame.size(); ++j) {
    const Complex v = quadratic_form(T, frame.dense_vector(j));
    s += v;
    r.values.push_back(v);
    r.partial_sums.push_back(s);
    r.max_deviation = std::max(r.max_deviation, std::abs(v - target));
  }
  r.frame = std::move(frame);
  return r;
}

DiagonalReport make_report(const OperatorModel& model, OrthonormalFrame frame, Complex target) {
  DiagonalReport r;
  r.target = target;
  Complex s = 0.0;
  for (Index j = 0; j < frame.size(); ++j) {
    const Complex v = model.quadratic_form(frame[j]);
    s += v;
    r.values.push_back(v);
    r.partial_sums.push_back(s);
    r.max_deviation = std::max(r.max_deviation, std::abs(v - target));
  }
  r.max_index = frame.max_support_index();
  r.frame = std::move(frame);
  return r;
}

Complex constant_diag_value(const ComplexMatrix& T) {
  if (T.rows() == 0 || T.rows() != T.cols()) throw DimensionMismatch("constant_diag_value: matrix not square");
  return T.trace() / static_cast<double>(T.rows());
}

DiagonalReport parker_basis(const ComplexMatrix& T, double tol) {
  const Index N = T.rows();
  if (N == 0 || T.cols() != N) throw DimensionMismatch("parker_basis: matrix not square");
  if (!T.allFinite()) throw InvalidInput("parker_basis: non-finite entry");
  const Complex lambda = constant_diag_value(T);

  ComplexMatrix U = ComplexMatrix::Identity(N, N);
  ComplexMatrix cur = T;
  double drift = 0.0;
  for (Index level = 0; level + 1 < N; ++level) {
    const Index n = N - level;
    drift = std::max(drift, std::abs(cur.trace() - static_cast<double>(n) * lambda));

    std::vector<ComplexVector> basis;
    std::vector<Complex> diag;
    basis.reserve(static_cast<std::size_t>(n));
    for (Index j = 0; j < n; ++j) {
      basis.push_back(ComplexVector::Unit(n, j));
      diag.push_back(cur(j, j));
    }
    // lambda is the mean of cur's diagonal, so it lies in the hull of values
    // attained by coordinate vectors.
    std::optional<ComplexVector> u = attain_in_hull(cur, basis, diag, lambda, 1e-12);
    if (!u || std::abs(quadratic_form(cur, *u) - lambda) > tol / 10) {
      try {
        u = inverse_numrange(cur, lambda, tol / 10);
      } catch (const OutsideRange& e) {
        throw NumericalBreakdown(std::string("parker_basis: mean value drifted out of range: ") + e.what());
      }
    }
    const ComplexMatrix Q = householder_completion(*u);
    cur = Q.adjoint() * cur * Q;
    U.rightCols(n) = U.rightCols(n) * Q;
    const ComplexMatrix next = cur.bottomRightCorner(n - 1, n - 1);
    cur = next;
  }
  drift = std::max(drift, std::abs(cur.trace() - lambda));

  DiagonalReport r = make_report(T, OrthonormalFrame::from_dense(U), lambda);
  r.max_trace_drift = drift;
  if (r.max_deviation > tol) {
    std::ostringstream os;
    os << "parker_basis: diagonal deviates by " << r.max_deviation << " > " << tol;
    throw NumericalBreakdown(os.str());
  }
  return r;
}

ConstantDiagonalStream::ConstantDiagonalStream(const OperatorModel& model, Complex lambda, double tol, bool complete)
    : model_(&model), lambda_(lambda), tol_(tol), complete_(complete) {
  const Polygon2D ess = essential_range(model);
  const auto& lps = model.limit_points();
  if (ess.contains(lambda, MembershipMode::relint, ess.is_point() ? std::max(tol, 1e-12) : tol)) {
    auto w = convex_weights(lps, lambda, tol);
    if (!w) throw OutsideRange("lambda outside the essential range");
    weights_ = std::move(*w);
  } else {
    // A limit point off the relative interior still yields raw tail coordinates,
    // but the forced coordinates of complete mode could not be balanced.
    const auto at = std::find_if(lps.begin(), lps.end(), [&](Complex p) { return std::abs(p - lambda) <= tol; });
    if (complete || at == lps.end()) {
      std::ostringstream os;
      os << "lambda " << lambda << " not in the relative interior of the essential range";
      throw OutsideRange(os.str());
    }
    weights_.assign(lps.size(), 0.0);
    weights_[static_cast<std::size_t>(at - lps.begin())] = 1.0;
  }
  scan_.assign(model.limit_points().size(), model.head_dim());
}

Index ConstantDiagonalStream::take_candidate(std::size_t point, double eta, std::vector<Index>& taken) {
  const Index h = model_->head_dim();
  const Complex p = model_->limit_points()[point];
  Index g = scan_[point];
  // Advance the persistent scan past coordinates already consumed.
  while (used_.count(g)) ++g;
  scan_[point] = g;
  for (;; ++g) {
    if (g - h >= model_->tail_capacity()) {
      std::ostringstream os;
      os << "no fresh tail coordinate near " << p << " below capacity " << model_->tail_capacity();
      throw ExhaustedTail(os.str());
    }
    max_index_ = std::max(max_index_, g);
    if (used_.count(g) || std::find(taken.begin(), taken.end(), g) != taken.end()) continue;
    if (std::abs(model_->tail_entry(g - h) - p) <= eta) {
      taken.push_back(g);
      return g;
    }
  }
}

void ConstantDiagonalStream::next_chunk() {
  const Index h = model_->head_dim();
  const auto& lps = model_->limit_points();
  std::vector<Index> forced;
  Complex forced_sum = 0.0;
  if (complete_) {
    if (chunks_.empty() && h > 0) {
      for (Index g = 0; g < h; ++g) forced.push_back(g);
      forced_sum = model_->head().trace();
      next_forced_ = h;
    } else {
      next_forced_ = std::max(next_forced_, h);
      while (used_.count(next_forced_)) ++next_forced_;
      if (next_forced_ - h >= model_->tail_capacity())
        throw ExhaustedTail("complete stream reached the tail capacity");
      forced.push_back(next_forced_);
      forced_sum = model_->tail_entry(next_forced_ - h);
      max_index_ = std::max(max_index_, next_forced_);
    }
  }
  const Complex excess = forced_sum - static_cast<double>(forced.size()) * lambda_;
  std::vector<Complex> q;
  for (const Complex& p : lps) q.push_back(p - lambda_);
  const auto y = conic_combination(q, -excess);
  if (!y) throw NumericalBreakdown("chunk excess cannot be balanced by the limit points");

  constexpr Index kMaxScale = 256;
  double eta = std::max(tol_ / 4, 1e-15);
  for (int round = 0; round < 12; ++round, eta /= 16) {
    for (Index s = 0; s <= kMaxScale; ++s) {
      std::vector<Index> counts(lps.size());
      Index total = static_cast<Index>(forced.size());
      for (std::size_t i = 0; i < lps.size(); ++i) {
        counts[i] = std::llround((*y)[i] + static_cast<double>(s) * weights_[i]);
        total += counts[i];
      }
      if (total == 0) continue;
      std::vector<Index> taken;
      Complex sum = forced_sum;
      for (std::size_t i = 0; i < lps.size(); ++i)
        for (Index c = 0; c < counts[i]; ++c) {
          const Index g = take_candidate(i, eta, taken);
          sum += model_->tail_entry(g - h);
        }
      const Complex avg = sum / static_cast<double>(total);
      if (std::abs(avg - lambda_) > tol_) continue;

      Chunk chunk;
      chunk.coords = forced;
      chunk.coords.insert(chunk.coords.end(), taken.begin(), taken.end());
      std::sort(chunk.coords.begin(), chunk.coords.end());
      chunk.target_average = lambda_;
      chunk.achieved_average = avg;
      for (Index g : chunk.coords) used_.insert(g);

      const ComplexMatrix B = coordinate_block(*model_, chunk.coords);
      const DiagonalReport local = parker_basis(B, std::max(tol_, 1e-9));
      const ComplexMatrix V = local.frame.dense();
      for (Index j = 0; j < V.cols(); ++j) {
        SparseVector v = lift(chunk.coords, V.col(j));
        const Complex value = model_->quadratic_form(v);
        if (std::abs(value - lambda_) > tol_ + 1e-12) {
          std::ostringstream os;
          os << "chunk vector value " << value << " misses " << lambda_;
          throw NumericalBreakdown(os.str());
        }
        vectors_.push_back(std::move(v));
        values_.push_back(value);
      }
      max_index_ = std::max(max_index_, chunk.coords.back());
      chunks_.push_back(std::move(chunk));
      return;
    }
  }
  throw NumericalBreakdown("could not assemble a chunk with the requested average");
}

const SparseVector& ConstantDiagonalStream::vector(Index k) {
  while (generated() <= k) next_chunk();
  return vectors_[static_cast<std::size_t>(k)];
}

Complex ConstantDiagonalStream::value(Index k) {
  vector(k);
  return values_[static_cast<std::size_t>(k)];
}

ChunkPlan chunk_selector(const OperatorModel& model, Complex lambda, double tol, Index chunk_budget) {
  const Polygon2D ess = essential_range(model);
  if (!ess.contains(lambda, MembershipMode::relint, ess.is_point() ? std::max(tol, 1e-12) : tol)) {
    std::ostringstream os;
    os << "lambda " << lambda << " not in the relative interior of the essential range";
    throw OutsideRange(os.str());
  }
  ConstantDiagonalStream stream(model, lambda, tol, /*complete=*/false);
  ChunkPlan plan;
  while (static_cast<Index>(stream.chunks().size()) < chunk_budget) stream.vector(stream.generated());
  plan.chunks = stream.chunks();
  plan.max_index = stream.max_index();
  return plan;
}

DiagonalReport constant_diag_basis(const OperatorModel& model, Complex lambda, Index count, double tol) {
  ConstantDiagonalStream stream(model, lambda, tol, /*complete=*/false);
  std::vector<SparseVector> vs;
  vs.reserve(static_cast<std::size_t>(count));
  for (Index k = 0; k < count; ++k) vs.push_back(stream.vector(k));
  DiagonalReport r = make_report(model, OrthonormalFrame(kModelAmbient, std::move(vs)), lambda);
  r.max_index = std::max(r.max_index, stream.max_index());
  return r;
}

ExtensionReport subspace_extension(const OperatorModel& model, ConstantDiagonalStream& alpha_stream,
                                   const OrthonormalFrame& M, double alpha, double beta, double eps) {
  if (!(alpha < 0.0 && beta > 0.0)) throw BadSignConfiguration("need alpha < 0 < beta");
  if (!(eps > 0.0)) throw InvalidInput("eps must be positive");
  if (&alpha_stream.model() != &model) throw InvalidInput("alpha stream belongs to a different model");
  if (std::abs(alpha_stream.lambda() - alpha) > eps / 10)
    throw InvalidInput("alpha stream value differs from alpha by more than eps/10");
  if (essential_range(model).distance(beta) > 1e-12) throw OutsideRange("beta not in the essential range");
  if (M.ambient_dim() != kModelAmbient) throw DimensionMismatch("M must live on model coordinates");

  ExtensionReport rep;
  rep.eps = eps;
  const Index m = M.size();
  if (m == 0) {
    // Base case M = {0}: k = 0, n = 0, gamma = 0 and M' = {0}.
    rep.frame = OrthonormalFrame(kModelAmbient);
    return rep;
  }
  const double norm_t = std::max(1.0, model.norm_bound());
  rep.delta = eps / (16.0 * static_cast<double>(m) * norm_t);

  // Stream chunks covering M's coordinates; L is then spanned by whole
  // chunks, so P_L is the coordinate projection onto them.
  std::unordered_map<Index, Index> chunk_of;  // coordinate -> chunk
  std::vector<Index> chunk_end;               // stream vectors after chunk c
  auto sync_chunks = [&] {
    for (std::size_t c = chunk_end.size(); c < alpha_stream.chunks().size(); ++c) {
      for (Index g : alpha_stream.chunks()[c].coords) chunk_of[g] = static_cast<Index>(c);
      Index before = c == 0 ? 0 : chunk_end.back();
      chunk_end.push_back(before + static_cast<Index>(alpha_stream.chunks()[c].coords.size()));
    }
  };
  sync_chunks();
  std::vector<Index> coords_needed;
  for (Index j = 0; j < m; ++j)
    for (SparseVector::InnerIterator it(M[j]); it; ++it) coords_needed.push_back(it.index());
  std::sort(coords_needed.begin(), coords_needed.end());
  coords_needed.erase(std::unique(coords_needed.begin(), coords_needed.end()), coords_needed.end());

  Index chunks_used = 0;
  std::vector<SparseVector> projected;
  double delta = rep.delta;
  for (int attempt = 0;; ++attempt) {
    for (Index g : coords_needed) {
      while (!chunk_of.count(g)) {
        alpha_stream.vector(alpha_stream.generated());
        sync_chunks();
      }
      chunks_used = std::max(chunks_used, chunk_of[g] + 1);
    }
    auto covered = [&](Index g) {
      auto it = chunk_of.find(g);
      return it != chunk_of.end() && it->second < chunks_used;
    };
    projected.clear();
    bool close = true;
    for (Index j = 0; j < m; ++j) {
      SparseVector p(kModelAmbient);
      double outside = 0.0;
      for (SparseVector::InnerIterator it(M[j]); it; ++it) {
        if (covered(it.index())) p.insert(it.index()) = it.value();
        else outside += std::norm(it.value());
      }
      close = close && std::sqrt(outside) < delta;
      projected.push_back(std::move(p));
    }
    if (close && gram_lower_bound(projected) >= 0.5) break;
    if (attempt > 60) throw NumericalBreakdown("subspace_extension: distance bound not reached");
    delta /= 2;
  }
  rep.delta = delta;
  rep.k = chunk_end[static_cast<std::size_t>(chunks_used - 1)];

  // f_j: Gram-Schmidt of the projections, spanning M~ = P_L M.
  const std::vector<SparseVector> f = sparse_gram_schmidt(projected, 1e-10);

  // L (-) M~ inside the covered coordinates, one connected component of the
  // f-supports at a time.
  std::vector<Index> covered_coords;
  for (Index c = 0; c < chunks_used; ++c)
    for (Index g : alpha_stream.chunks()[static_cast<std::size_t>(c)].coords) covered_coords.push_back(g);
  std::sort(covered_coords.begin(), covered_coords.end());
  UnionFind uf;
  for (Index g : covered_coords) uf.find(g);
  std::vector<Index> f_root(f.size());
  for (std::size_t j = 0; j < f.size(); ++j) {
    const auto s = support_of(f[j]);
    for (std::size_t i = 1; i < s.size(); ++i) uf.unite(s[0], s[i]);
  }
  std::map<Index, std::vector<Index>> comp_coords;
  for (Index g : covered_coords) comp_coords[uf.find(g)].push_back(g);
  std::map<Index, std::vector<std::size_t>> comp_vecs;
  for (std::size_t j = 0; j < f.size(); ++j) comp_vecs[uf.find(support_of(f[j]).front())].push_back(j);

  std::vector<SparseVector> complement;
  for (const auto& [root, coords] : comp_coords) {
    const auto vit = comp_vecs.find(root);
    const std::size_t nv = vit == comp_vecs.end() ? 0 : vit->second.size();
    const Index nc = static_cast<Index>(coords.size());
    if (static_cast<Index>(nv) == nc) continue;
    if (nv == 0) {
      for (Index g : coords) {
        SparseVector e(kModelAmbient);
        e.insert(g) = 1.0;
        complement.push_back(std::move(e));
      }
      continue;
    }
    std::unordered_map<Index, Index> local;
    for (Index i = 0; i < nc; ++i) local[coords[static_cast<std::size_t>(i)]] = i;
    ComplexMatrix F = ComplexMatrix::Zero(nc, static_cast<Index>(nv));
    for (std::size_t c = 0; c < nv; ++c)
      for (SparseVector::InnerIterator it(f[vit->second[c]]); it; ++it)
        F(local.at(it.index()), static_cast<Index>(c)) = it.value();
    const Eigen::HouseholderQR<ComplexMatrix> qr(F);
    const ComplexMatrix Q = qr.householderQ();
    for (Index c = static_cast<Index>(nv); c < nc; ++c) {
      ComplexVector col = Q.col(c);
      for (Index i = 0; i < nc; ++i)
        if (std::abs(col(i)) < 1e-17) col(i) = 0.0;
      complement.push_back(lift(coords, col / col.norm()));
    }
  }

  std::vector<SparseVector> kvecs = M.vectors();
  kvecs.insert(kvecs.end(), complement.begin(), complement.end());
  OrthonormalFrame K(kModelAmbient, std::move(kvecs));
  rep.trace_K = model.compressed_trace(K);
  const double alpha_k = alpha * static_cast<double>(rep.k);
  if (std::abs(rep.trace_K - alpha_k) > eps / 2) {
    std::ostringstream os;
    os << "subspace_extension: |tr(P_K T P_K) - alpha k| = " << std::abs(rep.trace_K - alpha_k) << " > eps/2";
    throw NumericalBreakdown(os.str());
  }

  rep.n = static_cast<Index>(std::floor(std::abs(alpha_k) / beta));
  rep.gamma = std::abs(alpha_k) - static_cast<double>(rep.n) * beta;
  const double each = eps / (2.0 * static_cast<double>(rep.n + 1));

  Index fresh = std::max(K.max_support_index(), model.head_dim() - 1) + 1;
  std::set<Index> forbidden;
  std::vector<SparseVector> xs;
  Index beta_from = fresh;
  for (Index j = 0; j < rep.n; ++j) {
    WeVector w = we_vector(model, beta, each, {}, beta_from);
    beta_from = w.support.back() + 1;
    for (Index g : w.support) forbidden.insert(g);
    rep.max_index = std::max(rep.max_index, w.max_index);
    rep.appended_values.push_back(w.value);
    xs.push_back(std::move(w.x));
  }
  {
    WeVector w = we_vector(model, rep.gamma, each, forbidden, fresh);
    rep.max_index = std::max(rep.max_index, w.max_index);
    rep.appended_values.push_back(w.value);
    xs.push_back(std::move(w.x));
  }
  for (auto& x : xs) x.conservativeResize(kModelAmbient);

  std::vector<SparseVector> all = K.vectors();
  all.insert(all.end(), xs.begin(), xs.end());
  rep.frame = OrthonormalFrame(kModelAmbient, std::move(all));
  rep.trace = model.compressed_trace(rep.frame);
  rep.max_index = std::max({rep.max_index, rep.frame.max_support_index(), alpha_stream.max_index()});
  if (!(std::abs(rep.trace) <= eps)) {
    std::ostringstream os;
    os << "subspace_extension: |trace| = " << std::abs(rep.trace) << " > eps = " << eps;
    throw NumericalBreakdown(os.str());
  }
  return rep;
}

AffinePair affine_normalize(Complex alpha, Complex beta, double t) {
  if (!(t > 0.0 && t < 1.0)) throw InvalidInput("t must lie in (0,1)");
  if (alpha == beta) throw DegeneratePair("alpha equals beta");
  AffinePair p;
  p.a = 1.0 / (beta - alpha);
  p.b = t - p.a * beta;
  return p;
}

FanReport fan_construct(const OperatorModel& model, double alpha, double beta, Index levels) {
  if (!(alpha < 0.0 && beta > 0.0)) throw BadSignConfiguration("need alpha < 0 < beta");
  if (levels < 1) throw InvalidInput("levels must be >= 1");
  ConstantDiagonalStream stream(model, alpha, 1e-10, /*complete=*/true);

  FanReport out;
  OrthonormalFrame current(kModelAmbient);
  for (Index k = 1; k <= levels; ++k) {
    // M_{k-1} v e_k, with e_k the k-th reference coordinate.
    // Earlier vectors are kept verbatim so the frames nest exactly.
    SparseVector r(kModelAmbient);
    r.insert(k - 1) = 1.0;
    for (int pass = 0; pass < 2; ++pass)
      for (Index j = 0; j < current.size(); ++j) {
        const Complex c = current[j].dot(r);
        if (c != Complex(0.0)) r -= c * current[j];
      }
    r.prune(Complex(0.0), 1e-14);
    OrthonormalFrame M = current;
    if (r.norm() > 1e-9) {
      std::vector<SparseVector> vs = current.vectors();
      vs.push_back(r / r.norm());
      M = OrthonormalFrame(kModelAmbient, std::move(vs));
    }
    const double eps = 0.5 / static_cast<double>(k);
    ExtensionReport ext = subspace_extension(model, stream, M, alpha, beta, eps);
    FanLevel lvl;
    lvl.dim = ext.frame.size();
    lvl.trace = ext.trace;
    lvl.bound = 1.0 / static_cast<double>(k);
    current = ext.frame;
    lvl.extension = std::move(ext);
    out.levels.push_back(std::move(lvl));
  }
  out.report = make_report(model, current, 0.0);
  for (const auto& lvl : out.levels) out.report.checkpoints.push_back(lvl.dim);
  out.report.max_index = std::max(out.report.max_index, stream.max_index());
  for (const auto& lvl : out.levels)
    if (!(std::abs(out.report.partial_sums[static_cast<std::size_t>(lvl.dim - 1)]) < lvl.bound))
      throw NumericalBreakdown("fan_construct: checkpoint bound violated");
  return out;
}

FanCheck fan_check(const DiagonalReport& report, Index window) {
  return fan_check(std::span<const DiagonalReport>(&report, 1), window);
}

FanCheck fan_check(std::span<const DiagonalReport> reports, Index window) {
  if (reports.empty()) throw InvalidInput("fan_check: no reports");
  for (const auto& r : reports)
    if (static_cast<Index>(r.values.size()) < window) throw InvalidInput("fan_check: report shorter than window");
  FanCheck fc;
  std::vector<Index> cps = reports.front().checkpoints;
  if (cps.empty()) {
    cps.resize(static_cast<std::size_t>(window));
    std::iota(cps.begin(), cps.end(), Index(1));
  }
  fc.min_abs = std::numeric_limits<double>::infinity();
  for (Index k : cps) {
    if (k < 1 || k > window) continue;
    double mag = 0.0;
    for (const auto& r : reports) mag = std::max(mag, std::abs(r.partial_sums[static_cast<std::size_t>(k - 1)]));
    fc.checkpoints.push_back(k);
    fc.magnitudes.push_back(mag);
    fc.min_abs = std::min(fc.min_abs, mag);
  }
  return fc;
}

ConvexCombReport convex_comb_diag(const OperatorModel& model, Complex alpha, Complex beta, double t, Index levels) {
  ConvexCombReport out;
  out.affine = affine_normalize(alpha, beta, t);
  out.t = t;
  out.point = t * alpha + (1.0 - t) * beta;
  const Complex a = out.affine.a, b = out.affine.b;
  if (std::abs(a * alpha + b + (1.0 - t)) > 1e-12 || std::abs(a * beta + b - t) > 1e-12)
    throw NumericalBreakdown("convex_comb_diag: affine normalization failed its post-condition");
  // alpha must carry a constant-diagonal stream, so it sits inside W_e.
  if (!essential_range(model).contains(alpha, MembershipMode::relint, 1e-10))
    throw OutsideRange("alpha has no constant-diagonal stream (not in the relative interior of W_e)");
  const OperatorModel shifted = model.affine(a, b);
  out.fan = fan_construct(shifted, -(1.0 - t), t, levels);
  return out;
}

bool dconst_in_relint_check(const ComplexMatrix& T, const DiagonalReport& report, double tol) {
  if (report.values.empty()) return false;
  Complex mean = 0.0;
  for (const Complex& v : report.values) mean += v;
  mean /= static_cast<double>(report.values.size());
  return polygon_membership(boundary_polygon(T), mean, MembershipMode::relint, tol);
}

bool dconst_in_relint_check(const OperatorModel& model, const DiagonalReport& report, double tol) {
  if (report.values.empty()) return false;
  Complex mean = 0.0;
  for (const Complex& v : report.values) mean += v;
  mean /= static_cast<double>(report.values.size());
  // W(head (+) tail) is the hull of W(head), the tail entries and their limits.
  std::vector<Point> pts = model.limit_points();
  if (model.head_dim() > 0) {
    const Polygon2D hp = boundary_polygon(model.head());
    pts.insert(pts.end(), hp.vertices().begin(), hp.vertices().end());
  }
  const Index upto = std::min<Index>(model.tail_capacity(), std::max<Index>(report.max_index + 1, 1));
  for (Index j = 0; j < upto; ++j) pts.push_back(model.tail_entry(j));
  return polygon_membership(Polygon2D::hull(pts), mean, MembershipMode::relint, tol);
}

}  // namespace numrange
