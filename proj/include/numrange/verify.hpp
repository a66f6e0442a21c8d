#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "numrange/io.hpp"

namespace numrange {

struct CheckResult {
  std::string name;
  std::string group;  // jointrange | diagonals | kadison
  bool passed = false;
  io::Json measured = io::Json::object();
  io::Json tolerances = io::Json::object();
  double seconds = 0.0;
  std::string detail;  // failure message, if any
};

struct VerificationReport {
  std::uint64_t seed = 0;
  std::vector<CheckResult> checks;

  bool all_passed() const;
  io::Json to_json() const;
};

inline constexpr std::uint64_t kDefaultSeed = 20240229;

/// Names of the acceptance checks, in order.
std::vector<std::string> check_names();
/// Group a check belongs to.
std::string check_group(const std::string& name);

/// Runs the acceptance checks whose name or group appears in `only` (all when
/// empty). Throws InvalidInput for an unknown filter entry.
VerificationReport verify_paper(std::uint64_t seed, const std::vector<std::string>& only = {});

/// The model used by the Fan and convex-combination checks: a 3x3 head with
/// trace -3 plus a periodic tail (-9, 1, 1, 1, 1), essential range [-9, 1].
OperatorModel fan_demo_model();

}  // namespace numrange
