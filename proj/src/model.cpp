#include "numrange/model.hpp"

#include <cmath>
#include <sstream>

namespace numrange {

TailStream TailStream::constant(Complex value) {
  TailStream s;
  s.kind = Kind::constant;
  s.values = {value};
  return s;
}

TailStream TailStream::periodic(std::vector<Complex> cycle) {
  if (cycle.empty()) throw InvalidInput("periodic stream needs at least one value");
  TailStream s;
  s.kind = Kind::periodic;
  s.values = std::move(cycle);
  return s;
}

TailStream TailStream::geometric(Complex c, Ratio r, Complex base) {
  if (r.den <= 0 || r.num <= 0 || r.num >= r.den) throw InvalidInput("geometric ratio must lie in (0,1)");
  TailStream s;
  s.kind = Kind::geometric;
  s.c = c;
  s.base = base;
  s.ratio = r;
  return s;
}

Complex TailStream::at(std::int64_t i) const {
  switch (kind) {
    case Kind::constant:
      return values.front();
    case Kind::periodic:
      return values[static_cast<std::size_t>(i % static_cast<std::int64_t>(values.size()))];
    case Kind::geometric:
      return base + c * std::pow(ratio.value(), static_cast<double>(i));
  }
  return 0.0;
}

std::vector<Complex> TailStream::accumulation_points() const {
  if (kind == Kind::geometric) return {base};
  return values;
}

double TailStream::sup_abs() const {
  double m = 0.0;
  if (kind == Kind::geometric) {
    // |base + c r^i| is maximized at i = 0 or in the limit.
    m = std::max(std::abs(base + c), std::abs(base));
    for (int i = 1; i < 64; ++i) m = std::max(m, std::abs(at(i)));
    return m;
  }
  for (const Complex& v : values) m = std::max(m, std::abs(v));
  return m;
}

TailStream TailStream::affine(Complex a, Complex b) const {
  TailStream s = *this;
  if (kind == Kind::geometric) {
    s.c = a * c;
    s.base = a * base + b;
  } else {
    for (Complex& v : s.values) v = a * v + b;
  }
  return s;
}

OperatorModel::OperatorModel(ComplexMatrix head, std::vector<TailStream> tail, std::vector<Complex> limit_points,
                             Index tail_capacity)
    : head_(std::move(head)),
      tail_(std::move(tail)),
      limit_points_(std::move(limit_points)),
      capacity_(tail_capacity),
      cache_(std::make_shared<Cache>()) {
  validate();
}

void OperatorModel::validate() const {
  if (head_.rows() != head_.cols()) throw DimensionMismatch("model head must be square");
  if (!head_.allFinite()) throw InvalidInput("model head has non-finite entries");
  if (tail_.empty()) throw InvalidInput("model needs at least one tail stream");
  if (limit_points_.empty()) throw InvalidInput("model needs at least one limit point");
  if (capacity_ <= 0) throw InvalidInput("tail capacity must be positive");

  std::vector<Complex> acc;
  for (const auto& s : tail_) {
    for (const Complex& v : s.values)
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) throw InvalidInput("tail value not finite");
    for (const Complex& p : s.accumulation_points()) acc.push_back(p);
  }
  for (const Complex& lp : limit_points_) {
    bool genuine = false;
    for (const Complex& p : acc) genuine = genuine || std::abs(p - lp) <= 1e-12;
    if (!genuine) {
      std::ostringstream os;
      os << "declared limit point " << lp << " is not an accumulation point of the tail";
      throw InvalidInput(os.str());
    }
  }
  const Polygon2D declared = Polygon2D::hull(limit_points_);
  for (const Complex& p : acc) {
    if (declared.distance(p) > 1e-9) {
      std::ostringstream os;
      os << "tail accumulation point " << p << " lies outside the hull of the declared limit points";
      throw InvalidInput(os.str());
    }
  }
}

void OperatorModel::enlarge(Index factor) {
  if (factor < 2) throw InvalidInput("enlarge factor must be >= 2");
  capacity_ *= factor;
}

Index OperatorModel::materialized() const {
  std::lock_guard<std::mutex> lock(cache_->mutex);
  return static_cast<Index>(cache_->entries.size());
}

Complex OperatorModel::tail_entry(Index j) const {
  if (j < 0) throw InvalidInput("negative tail index");
  if (j >= capacity_) {
    std::ostringstream os;
    os << "tail index " << j << " beyond materializable capacity " << capacity_;
    throw ExhaustedTail(os.str());
  }
  std::lock_guard<std::mutex> lock(cache_->mutex);
  auto& entries = cache_->entries;
  if (j >= static_cast<Index>(entries.size())) {
    const Index target = ((j / kBlock) + 1) * kBlock;
    const auto streams = static_cast<Index>(tail_.size());
    for (Index k = static_cast<Index>(entries.size()); k < target; ++k)
      entries.push_back(tail_[static_cast<std::size_t>(k % streams)].at(k / streams));
  }
  return entries[static_cast<std::size_t>(j)];
}

SparseVector OperatorModel::apply(const SparseVector& x) const {
  const Index h = head_dim();
  SparseVector y(x.size());
  ComplexVector head_part = ComplexVector::Zero(h);
  bool touches_head = false;
  for (SparseVector::InnerIterator it(x); it; ++it) {
    if (it.index() < h) {
      head_part(it.index()) = it.value();
      touches_head = true;
    }
  }
  if (touches_head) {
    const ComplexVector hy = head_ * head_part;
    for (Index i = 0; i < h; ++i)
      if (hy(i) != Complex(0.0)) y.insert(i) = hy(i);
  }
  for (SparseVector::InnerIterator it(x); it; ++it) {
    if (it.index() >= h) y.insert(it.index()) = tail_entry(it.index() - h) * it.value();
  }
  return y;
}

Complex OperatorModel::quadratic_form(const SparseVector& x) const { return x.dot(apply(x)); }

ComplexMatrix OperatorModel::compress(const OrthonormalFrame& frame) const {
  const Index k = frame.size();
  std::vector<SparseVector> images;
  images.reserve(static_cast<std::size_t>(k));
  for (Index j = 0; j < k; ++j) images.push_back(apply(frame[j]));
  ComplexMatrix B(k, k);
  for (Index j = 0; j < k; ++j)
    for (Index i = 0; i < k; ++i) B(i, j) = frame[i].dot(images[static_cast<std::size_t>(j)]);
  return B;
}

Complex OperatorModel::compressed_trace(const OrthonormalFrame& frame) const {
  Complex s = 0.0;
  for (Index j = 0; j < frame.size(); ++j) s += quadratic_form(frame[j]);
  return s;
}

double OperatorModel::norm_bound() const {
  double head_norm = 0.0;
  if (head_dim() > 0) {
    const ComplexMatrix g = head_.adjoint() * head_;
    head_norm = std::sqrt(std::max(0.0, jacobi_eigen(g).values.maxCoeff()));
  }
  double tail_sup = 0.0;
  for (const auto& s : tail_) tail_sup = std::max(tail_sup, s.sup_abs());
  return std::max(head_norm, tail_sup);
}

OperatorModel OperatorModel::affine(Complex a, Complex b) const {
  std::vector<TailStream> t;
  for (const auto& s : tail_) t.push_back(s.affine(a, b));
  std::vector<Complex> lps;
  for (const Complex& p : limit_points_) lps.push_back(a * p + b);
  ComplexMatrix h = a * head_;
  h.diagonal().array() += b;
  return OperatorModel(std::move(h), std::move(t), std::move(lps), capacity_);
}

OperatorModel OperatorModel::with_head(ComplexMatrix head) const {
  OperatorModel m = *this;
  m.head_ = std::move(head);
  m.validate();
  return m;
}

}  // namespace numrange
