#pragma once

#include <set>
#include <vector>

#include "numrange/linalg.hpp"
#include "numrange/model.hpp"
#include "numrange/numrange.hpp"

namespace numrange {

/// Logical ambient dimension of vectors living on a model's global
/// coordinates (head first, then tail). Only supports matter.
inline constexpr Index kModelAmbient = Index(1) << 30;

/// A diagonal sequence <T u_j, u_j> read along an orthonormal frame.
struct DiagonalReport {
  OrthonormalFrame frame;
  std::vector<Complex> values;
  std::vector<Complex> partial_sums;  // S_k = sum_{j<=k} values_j
  Complex target = 0.0;
  double max_deviation = 0.0;       // max_j |values_j - target|
  std::vector<Index> checkpoints;   // designated k (1-based) for Fan's criterion
  double max_trace_drift = 0.0;     // Parker only
  Index max_index = -1;             // model constructions: largest global index touched
};

/// Fills values, partial sums and deviation from a frame.
DiagonalReport make_report(const ComplexMatrix& T, OrthonormalFrame frame, Complex target);
DiagonalReport make_report(const OperatorModel& model, OrthonormalFrame frame, Complex target);

/// tr(T) / N
Complex constant_diag_value(const ComplexMatrix& T);

/// Orthonormal basis on which every diagonal entry of T equals tr(T)/N.
DiagonalReport parker_basis(const ComplexMatrix& T, double tol = 1e-8);

struct Chunk {
  std::vector<Index> coords;  // global coordinates
  Complex target_average = 0.0;
  Complex achieved_average = 0.0;
};

struct ChunkPlan {
  std::vector<Chunk> chunks;
  Index max_index = -1;
};

/// `chunk_budget` disjoint chunks of fresh tail coordinates, each with entry
/// average within `tol` of lambda. lambda must sit in the relative interior
/// of the essential range with margin >= tol.
ChunkPlan chunk_selector(const OperatorModel& model, Complex lambda, double tol, Index chunk_budget);

/// Lazily generated orthonormal sequence with <T u_j, u_j> = lambda (within
/// tol), built chunk by chunk with a Parker basis per chunk. In complete mode
/// every chunk starts with the earliest unused coordinate (the whole head for
/// the first chunk), so the sequence eventually spans every coordinate.
/// lambda must lie in the relative interior of the essential range; outside
/// complete mode a limit point is also accepted (chunks are then single
/// coordinates with entries near it).
class ConstantDiagonalStream {
 public:
  ConstantDiagonalStream(const OperatorModel& model, Complex lambda, double tol, bool complete);

  const OperatorModel& model() const noexcept { return *model_; }
  Complex lambda() const noexcept { return lambda_; }

  /// Vector k (0-based); generates chunks as needed.
  const SparseVector& vector(Index k);
  Complex value(Index k);
  Index generated() const noexcept { return static_cast<Index>(vectors_.size()); }
  const std::vector<Chunk>& chunks() const noexcept { return chunks_; }
  Index max_index() const noexcept { return max_index_; }

 private:
  void next_chunk();
  Index take_candidate(std::size_t point, double eta, std::vector<Index>& taken);

  const OperatorModel* model_;
  Complex lambda_;
  double tol_;
  bool complete_;
  std::vector<double> weights_;  // convex weights of lambda over limit points
  std::set<Index> used_;
  Index next_forced_ = 0;  // earliest coordinate not yet used (complete mode)
  std::vector<Index> scan_;  // per limit point scan position
  std::vector<SparseVector> vectors_;
  std::vector<Complex> values_;
  std::vector<Chunk> chunks_;
  Index max_index_ = -1;
};

/// `count` orthonormal vectors on disjoint tail chunks, all with diagonal value
/// within tol of lambda.
DiagonalReport constant_diag_basis(const OperatorModel& model, Complex lambda, Index count, double tol);

struct ExtensionReport {
  OrthonormalFrame frame;        // M'
  Index k = 0;                   // alpha vectors spanning L
  double delta = 0.0;
  Index n = 0;                   // beta vectors appended
  double gamma = 0.0;
  Complex trace_K = 0.0;         // tr(P_K T P_K)
  Complex trace = 0.0;           // tr(P_M' T P_M')
  double eps = 0.0;
  std::vector<Complex> appended_values;
  Index max_index = -1;
};

/// Finite M' containing M with |tr(P_M' T P_M')| <= eps, built from a
/// constant-alpha stream and vectors near beta and gamma = |alpha k| - n beta.
ExtensionReport subspace_extension(const OperatorModel& model, ConstantDiagonalStream& alpha_stream,
                                   const OrthonormalFrame& M, double alpha, double beta, double eps);

struct AffinePair {
  Complex a = 1.0;
  Complex b = 0.0;
};

/// a, b with a alpha + b = -(1-t) and a beta + b = t.
AffinePair affine_normalize(Complex alpha, Complex beta, double t);

struct FanLevel {
  Index dim = 0;
  Complex trace = 0.0;
  double bound = 0.0;  // 1/k
  ExtensionReport extension;
};

struct FanReport {
  DiagonalReport report;  // nested basis prefix
  std::vector<FanLevel> levels;
};

/// Nested frames M_1 c M_2 c ... with e_k in M_k and |tr(P_{M_k} T P_{M_k})| < 1/k.
FanReport fan_construct(const OperatorModel& model, double alpha, double beta, Index levels);

struct FanCheck {
  double min_abs = 0.0;
  std::vector<Index> checkpoints;
  std::vector<double> magnitudes;
};

/// Partial-sum magnitudes at the report's checkpoints (all k when none are
/// designated) within the first `window` values.
FanCheck fan_check(const DiagonalReport& report, Index window);
/// Tuple version: at each checkpoint the largest magnitude over the members.
FanCheck fan_check(std::span<const DiagonalReport> reports, Index window);

struct ConvexCombReport {
  AffinePair affine;
  Complex point = 0.0;  // t alpha + (1-t) beta
  double t = 0.0;
  FanReport fan;        // on a T + b I
};

/// Witness that t alpha + (1-t) beta is (approximately) a constant diagonal of
/// the model: the Fan construction for a T + b I.
ConvexCombReport convex_comb_diag(const OperatorModel& model, Complex alpha, Complex beta, double t, Index levels);

/// The report's constant value lies in the relative interior of W(T).
bool dconst_in_relint_check(const ComplexMatrix& T, const DiagonalReport& report, double tol = kMembershipTol);
bool dconst_in_relint_check(const OperatorModel& model, const DiagonalReport& report, double tol = kMembershipTol);

}  // namespace numrange
