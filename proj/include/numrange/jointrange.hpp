#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "numrange/linalg.hpp"

namespace numrange {

/// (T_1, ..., T_n) of equal size; commutativity is not required.
struct OperatorTuple {
  std::vector<ComplexMatrix> members;

  OperatorTuple() = default;
  explicit OperatorTuple(std::vector<ComplexMatrix> ms);

  Index arity() const noexcept { return static_cast<Index>(members.size()); }
  Index dim() const noexcept { return members.empty() ? 0 : members.front().rows(); }
  /// ||T_j T_k - T_k T_j||_F for j < k, row-major over pairs.
  std::vector<double> commutator_norms() const;
  /// T_k (+) 0 of size dim() + f.
  OperatorTuple embedded(Index f) const;
};

using JointPoint = ComplexVector;

/// (<T_1 x, x>, ..., <T_n x, x>) for unit x.
JointPoint joint_point(const OperatorTuple& Ts, const ComplexVector& x);
/// (<T_1 x, y>, ..., <T_n x, y>) for ||x||, ||y|| <= 1.
JointPoint ap_point(const OperatorTuple& Ts, const ComplexVector& x, const ComplexVector& y);

enum class ProbeMode { joint, ap };

struct ProbeConfig {
  int restarts = 200;
  std::uint64_t seed = 20240229;
  int max_iters = 500;
  double armijo = 1e-4;
  /// Restarts after the first one reaching this distance are skipped (0: run all).
  double stop_below = 0.0;
  unsigned threads = 0;  // 0: hardware concurrency
};

struct ProbeReport {
  JointPoint target;
  ProbeMode mode = ProbeMode::joint;
  double best_distance = 0.0;
  ComplexVector best_x, best_y;  // best_y empty in joint mode
  JointPoint best_point;
  int restarts = 0;  // restarts used
  std::vector<std::uint64_t> seeds;
  std::vector<double> distances;  // per restart
};

/// Smallest ||mu - target|| found by projected gradient with restarts; mu is
/// the joint point over the unit sphere (joint) or the AP point over pairs of
/// unit-ball vectors (ap). Deterministic in cfg.seed regardless of threads.
ProbeReport min_distance(const OperatorTuple& Ts, const JointPoint& target, ProbeMode mode,
                         const ProbeConfig& cfg = {});

/// Exact integer matrices: "triple" (4x4), "triple_embedded" (T_k (+) 0_f),
/// "pair" (2x2), "pair_embedded" (S_i = T_i (+) 0_f).
std::map<std::string, OperatorTuple> paper_operators(Index f = 4);

struct SegmentProbe {
  JointPoint p, q;
  double p_distance = 0.0, q_distance = 0.0;
  std::vector<double> ts;  // sample points t p + (1-t) q
  std::vector<double> distances;
  std::vector<bool> flags;  // distance > threshold
  double threshold = 0.0;
  bool nonconvex = false;
};

/// Scans `samples` interior points of [q, p]. Both endpoints must be attained
/// within 1e-8.
SegmentProbe convexity_probe(const OperatorTuple& Ts, const JointPoint& p, const JointPoint& q, int samples,
                             ProbeMode mode, const ProbeConfig& cfg, double threshold);

}  // namespace numrange
