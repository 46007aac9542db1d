#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace sympos::selftest {

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

using Check = std::function<CheckResult()>;

// The ten acceptance checks, in order.
std::vector<std::pair<std::string, Check>> checks();

// Runs all checks, prints one pass/fail line each; returns the number of
// failures.
int run_all(std::ostream& out);

}  // namespace sympos::selftest
