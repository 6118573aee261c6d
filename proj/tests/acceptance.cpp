#include <iostream>

#include "nbw/acceptance.hpp"

/** Prints one PASS/FAIL line per criterion; exits 1 if any fails. */
int main() {
  nbw::AcceptanceConfig config;
  int failed = 0;
  nbw::run_acceptance(config, [&](const nbw::CriterionResult &r) {
    std::cout << r.line() << " [" << static_cast<long>(r.seconds + 0.5) << " s]" << std::endl;
    failed += !r.pass;
  });
  std::cout << (12 - failed) << "/12 criteria pass" << std::endl;
  return failed == 0 ? 0 : 1;
}
