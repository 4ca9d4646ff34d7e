#pragma once

#include <cmath>
#include <functional>
#include <utility>

namespace mh {

template <typename Scalar>
struct ScalarMinimum {
  Scalar argmin;
  Scalar value;
  int iterations;
};

// Golden-section search for a minimum of a unimodal function on [a, b].
// Stops when the bracket is narrower than `tol` or after `max_iter` steps.
template <typename Scalar, typename F>
ScalarMinimum<Scalar> golden_section_minimize(F&& f, Scalar a, Scalar b, Scalar tol, int max_iter = 200) {
  const Scalar inv_phi = (std::sqrt(Scalar(5)) - Scalar(1)) / Scalar(2);
  Scalar c = b - inv_phi * (b - a);
  Scalar d = a + inv_phi * (b - a);
  Scalar fc = f(c);
  Scalar fd = f(d);
  int it = 0;
  for (; it < max_iter && std::abs(b - a) > tol; ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  if (fc < fd) return {c, fc, it};
  return {d, fd, it};
}

template <typename Scalar, typename F>
ScalarMinimum<Scalar> golden_section_maximize(F&& f, Scalar a, Scalar b, Scalar tol, int max_iter = 200) {
  auto r = golden_section_minimize<Scalar>([&](Scalar x) { return -f(x); }, a, b, tol, max_iter);
  r.value = -r.value;
  return r;
}

}  // namespace mh
