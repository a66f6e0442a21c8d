#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <vector>

#include "numrange/linalg.hpp"
#include "numrange/polygon.hpp"

namespace numrange {

/// Exact ratio p/q used for geometric tails.
struct Ratio {
  std::int64_t num = 1;
  std::int64_t den = 2;
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
};

/// One structured stream of diagonal entries. Geometric streams produce
/// base + c * r^i, which tends to `base`.
struct TailStream {
  enum class Kind { constant, periodic, geometric };

  Kind kind = Kind::constant;
  std::vector<Complex> values;  // constant: {c}; periodic: the cycle
  Complex c = 0.0;              // geometric leading coefficient
  Complex base = 0.0;           // geometric offset
  Ratio ratio{};

  static TailStream constant(Complex value);
  static TailStream periodic(std::vector<Complex> cycle);
  static TailStream geometric(Complex c, Ratio r, Complex base = 0.0);

  Complex at(std::int64_t i) const;
  std::vector<Complex> accumulation_points() const;
  double sup_abs() const;
  TailStream affine(Complex a, Complex b) const;
};

/// Finite head (dim h) direct-summed with a diagonal tail; the tail streams are
/// interleaved round-robin. Global coordinate g < h is a head coordinate, g >= h
/// the tail coordinate g - h. Only the first `tail_capacity()` tail coordinates
/// are available; operations that need more raise ExhaustedTail and the caller
/// enlarges the model.
class OperatorModel {
 public:
  static constexpr Index kBlock = 256;
  static constexpr Index kDefaultCapacity = Index(1) << 16;

  OperatorModel(ComplexMatrix head, std::vector<TailStream> tail, std::vector<Complex> limit_points,
                Index tail_capacity = kDefaultCapacity);

  const ComplexMatrix& head() const noexcept { return head_; }
  Index head_dim() const noexcept { return head_.rows(); }
  const std::vector<TailStream>& tail() const noexcept { return tail_; }
  const std::vector<Complex>& limit_points() const noexcept { return limit_points_; }

  Index tail_capacity() const noexcept { return capacity_; }
  /// Total materializable dimension: head plus tail capacity.
  Index truncation_dim() const noexcept { return head_dim() + capacity_; }
  void enlarge(Index factor = 2);

  /// Diagonal entry of tail coordinate j (0-based).
  Complex tail_entry(Index j) const;
  /// Diagonal of the global coordinate g when g is a tail coordinate.
  bool is_tail(Index g) const noexcept { return g >= head_dim(); }

  /// Number of tail entries memoized so far (multiple of kBlock).
  Index materialized() const;

  SparseVector apply(const SparseVector& x) const;
  Complex quadratic_form(const SparseVector& x) const;
  /// B(i,j) = <T f_j, f_i> over the frame.
  ComplexMatrix compress(const OrthonormalFrame& frame) const;
  Complex compressed_trace(const OrthonormalFrame& frame) const;

  /// Upper bound for the operator norm: max(||head||_2, sup |tail|).
  double norm_bound() const;

  /// a T + b I, applied to head, tail streams and limit points.
  OperatorModel affine(Complex a, Complex b) const;
  OperatorModel with_head(ComplexMatrix head) const;

 private:
  void validate() const;

  struct Cache {
    std::mutex mutex;
    std::vector<Complex> entries;
  };

  ComplexMatrix head_;
  std::vector<TailStream> tail_;
  std::vector<Complex> limit_points_;
  Index capacity_;
  std::shared_ptr<Cache> cache_;
};

}  // namespace numrange
