#pragma once

// Verification suites for the command line: each suite bundles the
// corresponding acceptance criteria, with ensemble sizes scaled by the
// requested profile ("default" keeps desk-scale sizes, "full" runs the
// acceptance-grade sizes).

#include <kpzlab/acceptance_kernel.hpp>
#include <kpzlab/acceptance_mc.hpp>

#include <iostream>
#include <string>
#include <vector>

namespace kpzlab {

inline McProfile verify_profile(const std::string& name, int workers) {
  McProfile p;
  p.workers = workers;
  if (name == "full") {
    p.replicas = 10000;
  } else if (name == "quick") {
    p.replicas = 1000;
  } else {
    p.replicas = 3000;
  }
  return p;
}

inline std::vector<CheckResult> run_suite(const std::string& suite, const McProfile& prof) {
  std::vector<CheckResult> all;
  auto append = [&](std::vector<CheckResult> v) {
    for (auto& c : v) all.push_back(std::move(c));
  };
  const bool everything = suite == "all";
  if (everything || suite == "kernel") {
    append(criterion_route_agreement(prof.replicas >= 10000 ? 1000 : 250));
    append(criterion_exact_identities());
    append(criterion_cancellation());
    append(criterion_spectrum());
    append(criterion_inequalities());
  }
  if (everything || suite == "asep") {
    append(criterion_asep(prof));
  }
  if (everything || suite == "she") {
    append(criterion_she_moments(prof));
    append(criterion_martingale_problem(prof));
  }
  if (everything || suite == "goe") {
    append(criterion_goe(prof));
  }
  if (all.empty()) throw std::invalid_argument("verify: unknown suite '" + suite + "'");
  return all;
}

inline int print_report(const std::vector<CheckResult>& checks, std::ostream& os) {
  int failures = 0;
  for (const auto& c : checks) {
    os << (c.pass ? "[PASS] " : "[FAIL] ") << c.name << ": " << c.statistic
       << " (tolerance " << c.tolerance << ")";
    if (!c.note.empty()) os << "  [" << c.note << "]";
    os << '\n';
    if (!c.pass) ++failures;
  }
  os << (failures == 0 ? "all checks passed" : "checks FAILED") << " ("
     << checks.size() - failures << "/" << checks.size() << ")\n";
  return failures == 0 ? 0 : 1;
}

}  // namespace kpzlab
