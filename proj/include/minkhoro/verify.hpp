#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "minkhoro/norm.hpp"
#include "minkhoro/schedule.hpp"

namespace mh {

inline constexpr int kCriterionCount = 10;

// Lower bound of Lambda and Theta along the two explicit corner sequences of
// the reference norm for k in [1e2, 1e4]; the sampled minima are 0.7322 and
// 0.7321, both tending to sqrt(3) - 1.
inline constexpr double kCornerLowerBound = 0.73;

enum class CriterionStatus { pass, fail, not_applicable };
const char* to_string(CriterionStatus s);

struct CriterionResult {
  int number = 0;
  std::string title;
  CriterionStatus status = CriterionStatus::fail;
  std::string detail;
  double seconds = 0.0;
};

struct VerifyOptions {
  // Replaces every acceptance threshold when set (guard runs use 1e-30).
  std::optional<double> tolerance;
  std::uint64_t seed = 1;
  double grid_step = 0.5;
  LimitSchedule schedule{};
};

struct VerifyReport {
  std::string norm_name;
  bool reference_norm = false;  // the norm agrees with the singular reference plane norm
  std::vector<CriterionResult> criteria;
  bool passed() const;          // no criterion failed
};

// Criteria tied to the reference plane norm report not_applicable for
// other norms. Library errors inside a criterion turn into a failure whose
// detail carries the message.
CriterionResult run_criterion(int number, const SingularNorm& nm, const VerifyOptions& options = {});
VerifyReport run_verification(const SingularNorm& nm, const VerifyOptions& options = {});

}  // namespace mh
