#pragma once

// Acceptance suites: exact identities ("core") and Monte Carlo checks
// ("statistical"). Every criterion yields one TestReport; reports depend
// only on the seed, never on the number of worker threads.

#include <cstdint>
#include <string>
#include <vector>

#include "sinepalm/stats.hpp"

namespace sinepalm {

struct Criterion {
  int id;
  std::string title;
  bool statistical;
};

/// The fourteen acceptance criteria in order.
const std::vector<Criterion>& criteria();

/// Runs one criterion.
TestReport run_criterion(int id, std::uint64_t seed, unsigned jobs = 1);

/// "core", "statistical" or "all". Throws std::invalid_argument otherwise.
std::vector<TestReport> run_suite(const std::string& suite, std::uint64_t seed,
                                  unsigned jobs = 1);

}  // namespace sinepalm
