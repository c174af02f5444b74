// Runs every acceptance criterion and prints one line per criterion.
// Exit status is nonzero if any criterion fails.

#include <cstdio>
#include <cstdlib>
#include <string>

#include "bbeig/acceptance.hpp"

int main() {
  bbeig::AcceptanceOptions options;
  if (const char* w = std::getenv("BBEIG_WORKERS"); w && *w) options.sweep.workers = std::atoi(w);
  options.log = [](const std::string& line) { std::fprintf(stderr, "%s\n", line.c_str()); };
  bbeig::AcceptanceSuite suite(options);
  int failed = 0;
  suite.run_all([&](const bbeig::CriterionResult& r) {
    std::printf("%s\n", bbeig::format_result(r).c_str());
    std::fflush(stdout);
    if (!r.passed) ++failed;
  });
  std::printf("%d of %zu criteria failed\n", failed, bbeig::AcceptanceSuite::criteria().size());
  return failed == 0 ? 0 : 1;
}
