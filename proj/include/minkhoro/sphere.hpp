#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "minkhoro/metric.hpp"

namespace mh {

// Point of the Minkowski unit sphere in the Euclidean direction of `angle` (n = 2).
template <typename Scalar>
VectorT<Scalar> unit_sphere_point(const SingularNorm& nm, Scalar angle) {
  using std::cos, std::sin;
  VectorT<Scalar> e(2);
  e << cos(angle), sin(angle);
  return e / nm.evaluate(e);
}

// Deterministic, well spread Euclidean unit vectors in R^n: evenly spaced
// angles for n = 2, a Fibonacci lattice for n = 3, and Halton points mapped
// through the Gaussian quantile for n = 4.
std::vector<Vector> direction_samples(int dimension, int count);

struct SphereMinimumOptions {
  int directions = 4096;          // coarse sampling density
  double uniqueness_margin = 1e-4;
  double uniqueness_distance = 1e-4;  // relative to the radius
};

struct SphereCandidate {
  Point point;
  double value = 0.0;
};

struct SphereMinimum {
  Point point;        // minimizer on the sphere S(center, radius)
  double value = 0.0;
  bool unique = true;
  double second_value = 0.0;   // best separated competitor (inf if none)
  Point second_point;
  std::vector<SphereCandidate> local_minima;  // all refined candidates, best first
};

// Minimizes f over the Minkowski sphere of the given radius around `center`:
// coarse sampling, then local refinement of every discrete local minimum
// (golden section in angle for n = 2, pattern search on the sphere for n > 2).
SphereMinimum minimize_on_sphere(const std::function<double(const Point&)>& f, const SingularNorm& nm,
                                 const Point& center, double radius, const SphereMinimumOptions& options = {});

// Local pattern search on the sphere starting from the Euclidean direction `start`.
SphereCandidate refine_on_sphere(const std::function<double(const Point&)>& f, const SingularNorm& nm,
                                 const Point& center, double radius, const Vector& start);

}  // namespace mh
