#include <cstdio>
#include <cstdlib>
#include <string>

#include "fracblow/acceptance.hpp"

int main(int argc, char** argv) {
  fracblow::AcceptanceOptions options;
  for (int i = 1; i < argc; ++i) options.only.push_back(std::atoi(argv[i]));
  int failed = 0;
  fracblow::run_acceptance(options, [&](const fracblow::CriterionResult& r) {
    std::printf("%s\n", fracblow::format_result(r).c_str());
    std::fflush(stdout);
    if (!r.passed) ++failed;
  });
  std::printf("%d criteria failed\n", failed);
  return failed == 0 ? 0 : 1;
}
