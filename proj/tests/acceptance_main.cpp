#include <iostream>

#include "qbrown/acceptance.hpp"

int main() {
  const auto results = qbrown::run_acceptance();
  int failed = 0;
  for (const auto& r : results) {
    std::cout << qbrown::format_verdict(r) << '\n';
    if (!r.skipped && !r.pass) ++failed;
  }
  std::cout << results.size() - failed << '/' << results.size() << " criteria passed\n";
  return failed == 0 ? 0 : 1;
}
