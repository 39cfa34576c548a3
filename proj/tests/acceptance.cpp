// Runs every acceptance criterion and prints one PASS/FAIL line for each.
// Exit status is 0 only when all of them pass.

#include <CLI11.hpp>

#include <chrono>
#include <cstdint>
#include <iomanip>
#include <iostream>

#include "sinepalm/parallel.hpp"
#include "sinepalm/verify.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria"};
  std::uint64_t seed = 20240607;
  unsigned jobs = sinepalm::default_jobs();
  std::vector<int> only;
  app.add_option("--seed", seed, "Master seed");
  app.add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
  app.add_option("--only", only, "Run only these criteria");
  CLI11_PARSE(app, argc, argv);

  int failed = 0;
  for (const sinepalm::Criterion& c : sinepalm::criteria()) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
    const auto start = std::chrono::steady_clock::now();
    sinepalm::TestReport r;
    try {
      r = sinepalm::run_criterion(c.id, seed, jobs);
    } catch (const std::exception& e) {
      r.name = c.title;
      r.pass = false;
      r.notes = std::string("error: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!r.pass) ++failed;
    std::cout << (r.pass ? "PASS" : "FAIL") << "  [" << std::setw(2) << c.id << "] " << c.title
              << "  statistic=" << r.statistic << " threshold=" << r.threshold << "  ("
              << std::fixed << std::setprecision(1) << secs << " s)" << std::defaultfloat
              << std::setprecision(6) << "\n      " << r.notes << std::endl;
  }
  std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria failed")
            << std::endl;
  return failed == 0 ? 0 : 1;
}
