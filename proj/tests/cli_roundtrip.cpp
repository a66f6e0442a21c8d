// Reads back documents written by the CLI and checks their key values.
#include <iostream>

#include "numrange/io.hpp"

using namespace numrange;

int main(int argc, char** argv) {
  if (argc != 6) return 2;
  try {
    const ProbeReport joint = io::probe_from_json(io::read_json(argv[1]));
    const ProbeReport ap = io::probe_from_json(io::read_json(argv[2]));
    const DiagonalReport parker = io::report_from_json(io::read_json(argv[3]));
    const io::Json fan_json = io::read_json(argv[4]);
    const DiagonalReport fan = io::report_from_json(fan_json);
    const io::Json verify = io::read_json(argv[5]);
    bool ok = joint.best_distance >= 0.05 && ap.best_distance >= 0.05 && ap.best_distance <= joint.best_distance;
    ok = ok && parker.max_deviation <= 1e-8 && std::abs(parker.values[0] - 0.5) <= 1e-8;
    ok = ok && fan.checkpoints.size() == 10 && fan_json.at("levels").size() == 10;
    for (std::size_t k = 0; k < fan.checkpoints.size(); ++k)
      ok = ok && std::abs(fan.partial_sums[std::size_t(fan.checkpoints[k] - 1)]) < 1.0 / double(k + 1);
    ok = ok && verify.at("all_passed").get<bool>() && verify.at("checks").size() == 1;
    std::cout << (ok ? "round trip ok" : "round trip values wrong") << "\n";
    return ok ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return 1;
  }
}
