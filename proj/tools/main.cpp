#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "numrange/diagonals.hpp"
#include "numrange/io.hpp"
#include "numrange/jointrange.hpp"
#include "numrange/kadison.hpp"
#include "numrange/numrange.hpp"
#include "numrange/verify.hpp"

using namespace numrange;

namespace {

enum Exit : int { kOk = 0, kCheckFailed = 1, kIo = 2, kNumeric = 3, kInput = 4 };

// Input-validation failures; every other library error is numeric.
int exit_code(const Error& e) {
  const std::string& c = e.code();
  if (c == "IoError") return kIo;
  if (c == "InvalidInput" || c == "NotHermitian" || c == "DimensionMismatch" || c == "OutOfRangeEntry" ||
      c == "BadSignConfiguration" || c == "DegeneratePair" || c == "IncompatibleStreams")
    return kInput;
  return kNumeric;
}

std::uint64_t default_seed() {
  if (const char* s = std::getenv("NUMRANGE_SEED")) {
    try {
      std::size_t used = 0;
      const auto v = std::stoull(s, &used);
      if (used == std::string(s).size()) return v;
    } catch (const std::exception&) {
    }
    throw InvalidInput("NUMRANGE_SEED is not an unsigned integer: " + std::string(s));
  }
  return kDefaultSeed;
}

// JSON to `path`, or stdout when empty.
void emit(const io::Json& j, const std::string& path) {
  const std::string text = j.dump(2) + "\n";
  if (path.empty())
    std::cout << text;
  else
    io::write_file(path, text);
}

struct Options {
  std::string matrix, tuple, model, seq, out, csv, target, mode = "joint", name;
  int angles = kDefaultAngles;
  int restarts = 200;
  int max_iters = 500;
  unsigned threads = 0;
  std::uint64_t seed = 0;
  double tol = 1e-8;
  double alpha = -1.0, beta = 1.0;
  long levels = 10;
  bool le_half = false;
  std::vector<std::string> only;
};

int run_boundary(const Options& o) {
  const ComplexMatrix T = io::matrix_from_json(io::read_json(o.matrix));
  const Polygon2D poly = boundary_polygon(T, o.angles);
  std::ostringstream os;
  poly.write_csv(os);
  if (o.csv.empty())
    std::cout << os.str();
  else
    io::write_file(o.csv, os.str());
  return kOk;
}

int run_probe(const Options& o, bool seed_given) {
  const OperatorTuple Ts = io::tuple_from_json(io::read_json(o.tuple));
  const JointPoint target = io::point_from_string(o.target);
  if (target.size() != Ts.arity())
    throw DimensionMismatch("target has " + std::to_string(target.size()) + " coordinates, tuple has " +
                            std::to_string(Ts.arity()) + " members");
  if (o.mode != "joint" && o.mode != "ap") throw InvalidInput("--mode must be joint or ap");
  ProbeConfig cfg;
  cfg.restarts = o.restarts;
  cfg.seed = seed_given ? o.seed : default_seed();
  cfg.max_iters = o.max_iters;
  cfg.threads = o.threads;
  const ProbeReport r = min_distance(Ts, target, o.mode == "ap" ? ProbeMode::ap : ProbeMode::joint, cfg);
  emit(io::probe_to_json(r), o.out);
  return kOk;
}

int run_parker(const Options& o) {
  const ComplexMatrix T = io::matrix_from_json(io::read_json(o.matrix));
  emit(io::report_to_json(parker_basis(T, o.tol)), o.out);
  return kOk;
}

int run_fan(const Options& o) {
  const OperatorModel model = io::model_from_json(io::read_json(o.model));
  if (o.levels < 1) throw InvalidInput("--levels must be positive");
  const FanReport fr = fan_construct(model, o.alpha, o.beta, o.levels);
  io::Json j = io::report_to_json(fr.report);
  io::Json levels = io::Json::array();
  for (const FanLevel& l : fr.levels)
    levels.push_back({{"dim", l.dim},
                      {"trace", io::complex_to_json(l.trace)},
                      {"bound", l.bound},
                      {"k", l.extension.k},
                      {"n", l.extension.n},
                      {"eps", l.extension.eps}});
  j["levels"] = levels;
  emit(j, o.out);
  return kOk;
}

int run_kadison(const Options& o) {
  const kadison::DiagonalSeq d = io::seq_from_json(io::read_json(o.seq));
  const auto conv = o.le_half ? kadison::Convention::le_half : kadison::Convention::strict;
  const kadison::KadisonSums s = kadison::sums(d, conv);
  const kadison::Decision dec = kadison::decide(s);
  io::Json j = io::sums_to_json(s);
  j["decision"] = kadison::to_string(dec);
  emit(j, o.out);
  return dec == kadison::Decision::Diagonal ? kOk : kNumeric;
}

int run_verify(const Options& o, bool seed_given) {
  const std::uint64_t seed = seed_given ? o.seed : default_seed();
  const VerificationReport rep = verify_paper(seed, o.only);
  for (const CheckResult& c : rep.checks)
    std::cerr << (c.passed ? "PASS " : "FAIL ") << c.name << " (" << c.seconds << " s)"
              << (c.detail.empty() ? "" : ": " + c.detail) << "\n";
  emit(rep.to_json(), o.out);
  return rep.all_passed() ? kOk : kCheckFailed;
}

// Writes one of the built-in operators or sequences as an input file.
int run_export(const Options& o) {
  const auto ops = paper_operators();
  if (auto it = ops.find(o.name); it != ops.end()) {
    emit(io::tuple_to_json(it->second), o.out);
    return kOk;
  }
  const auto cat = kadison::catalog();
  if (auto it = cat.find(o.name); it != cat.end()) {
    emit(io::seq_to_json(it->second), o.out);
    return kOk;
  }
  if (o.name == "fan_model") {
    emit(io::model_to_json(fan_demo_model()), o.out);
    return kOk;
  }
  std::string known = "fan_model";
  for (const auto& [k, v] : ops) known += ", " + k;
  for (const auto& [k, v] : cat) known += ", " + k;
  throw InvalidInput("unknown name '" + o.name + "' (known: " + known + ")");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical ranges, joint ranges and constant diagonals"};
  app.require_subcommand(1);
  Options o;

  auto* boundary = app.add_subcommand("boundary", "Polygonal approximation of W(T) as CSV");
  boundary->add_option("--matrix", o.matrix, "matrix JSON")->required();
  boundary->add_option("--angles", o.angles, "support directions")->check(CLI::PositiveNumber);
  boundary->add_option("--csv", o.csv, "output CSV (stdout when omitted)");

  auto* probe = app.add_subcommand("probe", "Distance from a point to the joint or AP range");
  probe->add_option("--tuple", o.tuple, "tuple JSON")->required();
  probe->add_option("--target", o.target, "comma-separated point, e.g. 0,0.25,0.25")->required();
  probe->add_option("--restarts", o.restarts)->check(CLI::PositiveNumber);
  auto* probe_seed = probe->add_option("--seed", o.seed);
  probe->add_option("--mode", o.mode)->check(CLI::IsMember({"joint", "ap"}));
  probe->add_option("--max-iters", o.max_iters)->check(CLI::PositiveNumber);
  probe->add_option("--threads", o.threads, "0: hardware concurrency");
  probe->add_option("--out", o.out, "output JSON (stdout when omitted)");

  auto* diag = app.add_subcommand("diag", "Constant-diagonal constructions");
  diag->require_subcommand(1);
  auto* parker = diag->add_subcommand("parker", "Basis with constant diagonal tr(T)/N");
  parker->add_option("--matrix", o.matrix, "matrix JSON")->required();
  parker->add_option("--tol", o.tol)->check(CLI::PositiveNumber);
  parker->add_option("--out", o.out, "output JSON (stdout when omitted)");
  auto* fan = diag->add_subcommand("fan", "Nested frames with vanishing partial traces");
  fan->add_option("--model", o.model, "model JSON")->required();
  fan->add_option("--alpha", o.alpha);
  fan->add_option("--beta", o.beta);
  fan->add_option("--levels", o.levels)->check(CLI::PositiveNumber);
  fan->add_option("--out", o.out, "output JSON (stdout when omitted)");

  auto* kad = app.add_subcommand("kadison", "Projection-diagonal decisions");
  kad->require_subcommand(1);
  auto* check = kad->add_subcommand("check", "Decide whether a sequence is a projection diagonal");
  check->add_option("--seq", o.seq, "sequence JSON")->required();
  check->add_flag("--le-half", o.le_half, "put entries equal to 1/2 in the small bucket");
  check->add_option("--out", o.out, "output JSON (stdout when omitted)");

  auto* verify = app.add_subcommand("verify", "Run the acceptance checks");
  auto* verify_seed = verify->add_option("--seed", o.seed);
  verify->add_option("--only", o.only, "check names or groups");
  verify->add_option("--out", o.out, "output JSON (stdout when omitted)");

  auto* exp = app.add_subcommand("export", "Write a built-in operator tuple, model or sequence");
  exp->add_option("--name", o.name)->required();
  exp->add_option("--out", o.out, "output JSON (stdout when omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kInput;
  }

  try {
    if (*boundary) return run_boundary(o);
    if (*probe) return run_probe(o, probe_seed->count() > 0);
    if (*parker) return run_parker(o);
    if (*fan) return run_fan(o);
    if (*check) return run_kadison(o);
    if (*verify) return run_verify(o, verify_seed->count() > 0);
    if (*exp) return run_export(o);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code(e);
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: InvalidInput: " << e.what() << "\n";
    return kInput;
  } catch (const std::bad_alloc&) {
    std::cerr << "error: out of memory\n";
    return kNumeric;
  }
  return kInput;
}
