#pragma once

// Oracle-equivalence and invariant checks run by `vibq verify` and by the
// acceptance test binary.

#include <functional>
#include <string>
#include <vector>

namespace vibq::verification {

struct Profile {
  double tail_tol{1e-12};
  int workers{0};  // 0: environment / hardware default

  /// Factor applied to bounds that are limited by Fock truncation.
  double truncation_scale() const { return tail_tol > 1e-12 ? tail_tol / 1e-12 : 1.0; }
};

struct CheckResult {
  std::string name;
  double measured{0};
  std::string relation;  // "<=", ">=", "<", ">"
  double bound{0};
  bool passed{false};
  std::string detail;
};

std::string format_check(const CheckResult& r);

using Reporter = std::function<void(const CheckResult&)>;

/// Runs every check; each result is passed to `report` as soon as it is known.
std::vector<CheckResult> run_suite(const Profile& profile, const Reporter& report = {});

}  // namespace vibq::verification
