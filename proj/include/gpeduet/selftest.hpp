#pragma once

#include <string>
#include <vector>

namespace gpeduet {

struct SelfTestResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Fast invariant checks over every module (a few seconds in total).
std::vector<SelfTestResult> run_selftest();

}  // namespace gpeduet
