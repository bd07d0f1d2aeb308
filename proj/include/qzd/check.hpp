#ifndef QZD_CHECK_HPP
#define QZD_CHECK_HPP

#include <string>
#include <vector>

namespace qzd {

struct CheckResult {
  std::string name;
  double value;
  double tolerance;
  bool passed;
};

/// Fast numerical invariants on a small grid: unitarity of the split step,
/// Parseval, transform roundtrip, projector idempotence, the product
/// identity for the survival probability, and all-pass equivalence with
/// plain evolution. Runs in well under a second.
std::vector<CheckResult> run_invariant_checks();

}  // namespace qzd

#endif  // QZD_CHECK_HPP
