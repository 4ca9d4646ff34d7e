#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include "minkhoro/errors.hpp"

namespace mh {

// Geometric schedule t_j = 2^j, j = 0 .. max_steps - 1, with Aitken
// extrapolation on the last three terms.
struct LimitSchedule {
  int max_steps = 40;
  double tolerance = 1e-8;
};

struct LimitTrace {
  double value = 0.0;
  int steps = 0;  // index of the term at which convergence was certified
  bool converged = false;
  double last = 0.0;
  double previous = 0.0;
};

// Aitken delta-squared estimate from three consecutive terms. Falls back to
// the newest term when the second difference is at roundoff level or the
// differences do not contract.
inline long double aitken(long double a0, long double a1, long double a2) {
  const long double d1 = a1 - a0;
  const long double d2 = a2 - a1;
  const long double dd = d2 - d1;
  const long double noise = 64.0L * std::numeric_limits<long double>::epsilon() * (1.0L + std::abs(a2));
  if (std::abs(dd) <= noise || std::abs(d2) >= std::abs(d1)) return a2;
  return a2 - d2 * d2 / dd;
}

// Runs the schedule until two successive extrapolated values agree within the
// tolerance. `term(j)` returns the j-th raw term.
template <typename Term>
LimitTrace adaptive_limit(Term&& term, const LimitSchedule& schedule, int first_step = 0) {
  std::vector<long double> raw;
  long double prev_est = 0.0L, est = 0.0L;
  for (int j = first_step; j < schedule.max_steps; ++j) {
    raw.push_back(term(j));
    const std::size_t m = raw.size();
    if (m < 3) continue;
    prev_est = est;
    est = aitken(raw[m - 3], raw[m - 2], raw[m - 1]);
    if (m >= 4 && std::abs(est - prev_est) < schedule.tolerance)
      return {static_cast<double>(est), j, true, static_cast<double>(est), static_cast<double>(prev_est)};
  }
  return {static_cast<double>(est), schedule.max_steps - 1, false, static_cast<double>(est), static_cast<double>(prev_est)};
}

// Aitken estimate from the terms ending at index `depth` (no stopping rule).
template <typename Term>
long double fixed_depth_limit(Term&& term, int depth) {
  if (depth < 2) return term(depth);
  return aitken(term(depth - 2), term(depth - 1), term(depth));
}

}  // namespace mh
