/// Acceptance suite runner: one stable line per criterion, nonzero exit on
/// any failure. Progress and timings go to stderr.

#include <cstdlib>
#include <iostream>
#include <string>

#include "cmw/selftest.hpp"

int main(int argc, char** argv) {
  cmw::SelftestConfig cfg;
  for (int i = 1; i < argc; ++i) {
    std::string arg = argv[i];
    auto next = [&]() -> std::string {
      if (i + 1 >= argc) {
        std::cerr << "missing value for " << arg << '\n';
        std::exit(2);
      }
      return argv[++i];
    };
    if (arg == "--oracle-max-vars")
      cfg.oracle_max_vars = static_cast<unsigned>(std::stoul(next()));
    else if (arg == "--seed")
      cfg.seed = std::stoull(next());
    else {
      std::cerr << "unknown argument: " << arg << '\n';
      return 2;
    }
  }
  auto results = cmw::run_acceptance(cfg, &std::cerr);
  std::cout << cmw::format_results(results);
  return cmw::all_passed(results) ? 0 : 1;
}
