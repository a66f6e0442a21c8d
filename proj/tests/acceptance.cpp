// One line per acceptance criterion; exit status 0 iff every criterion passes.
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>

#include "numrange/verify.hpp"

int main(int argc, char** argv) {
  std::uint64_t seed = numrange::kDefaultSeed;
  if (const char* s = std::getenv("NUMRANGE_SEED")) seed = std::strtoull(s, nullptr, 10);
  const numrange::VerificationReport rep = numrange::verify_paper(seed);
  int n = 0;
  for (const auto& c : rep.checks) {
    std::cout << (c.passed ? "PASS" : "FAIL") << "  criterion " << std::setw(2) << ++n << "  " << std::left
              << std::setw(26) << c.name << std::right << std::fixed << std::setprecision(2) << std::setw(7)
              << c.seconds << " s  " << c.measured.dump() << "\n";
    if (!c.detail.empty()) std::cout << "      " << c.detail << "\n";
  }
  std::cout << (rep.all_passed() ? "all criteria passed" : "some criteria FAILED") << "\n";
  if (argc > 1) {
    std::ofstream out(argv[1]);
    out << rep.to_json().dump(2) << "\n";
  }
  return rep.all_passed() ? 0 : 1;
}
