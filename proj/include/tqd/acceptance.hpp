#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace tqd {

struct AcceptanceResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
};

// Runs criteria 1-8 in order, printing one PASS/FAIL line per criterion to
// `out` as each finishes.
std::vector<AcceptanceResult> run_acceptance(std::ostream& out);

}  // namespace tqd
