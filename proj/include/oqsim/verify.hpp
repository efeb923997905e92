#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace oqsim {

struct CriterionResult {
  std::string id;
  bool passed = false;
  std::string detail;   // key measured numbers and their thresholds
  double seconds = 0.0;
};

// Runs the seven acceptance criteria on the pinned reference scenario,
// logging one line per criterion. Never throws on a failed check; a
// criterion that raises unexpectedly is reported as failed.
std::vector<CriterionResult> run_acceptance(std::ostream& log);

}  // namespace oqsim
