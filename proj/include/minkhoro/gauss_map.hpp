#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "minkhoro/metric.hpp"

namespace mh {

struct SupportPoint {
  double value;         // h(nu) = max over the unit sphere of <nu, x>
  Direction maximizer;  // the unique maximizer, inverse Gauss image of nu
};

// Maximizes <nu, .> over the unit sphere: golden section in the angle for
// n = 2, multistart pattern search for n = 3, 4. Extended precision in n = 2.
// Throws ConvexityError when two separated points attain the maximum.
SupportPoint support_point(const SingularNorm& nm, const EuclideanUnitNormal& nu);
double support_value(const SingularNorm& nm, const EuclideanUnitNormal& nu);
Direction inverse_gauss(const SingularNorm& nm, const EuclideanUnitNormal& nu);

enum class Regularity { regular, singular };
const char* to_string(Regularity r);

inline constexpr double kRegularityTolerance = 1e-6;

// Outer unit normals of support hyperplanes of the unit ball at `base`.
// n = 2: the arc from `normals[0]` counterclockwise to `normals[1]`, or one
// normal when the arc is shorter than the tolerance. n > 2: normals sampled
// from one-sided limits of the gradient in tangent directions.
struct GaussImage {
  enum class Kind { singleton, arc, sampled };
  Direction base;
  Kind kind;
  std::vector<EuclideanUnitNormal> normals;
  double angular_width;  // largest angle between two normals of the set
};

GaussImage gauss_image(const SingularNorm& nm, const Direction& v, double tol = kRegularityTolerance);
Regularity classify_direction(const SingularNorm& nm, const Direction& v, double tol = kRegularityTolerance);

// A singular direction on the shorter great-circle arc from a to b, located
// by bisection on the one-sided normals, provided the normals at the two
// ends differ by at least `min_jump` radians and the located point
// classifies as singular.
std::optional<Direction> kink_on_arc(const SingularNorm& nm, const Vector& a, const Vector& b, double min_jump);

// A singular direction within `angular_tol` of v, if one is found: first the
// norm's declared singular directions, then (n = 2) a kink located by
// bisection on the one-sided normals. Busemann functions jump at singular
// directions, so numerically computed directions near one must be snapped.
std::optional<Direction> nearby_singular_direction(const SingularNorm& nm, const Direction& v,
                                                   double angular_tol = 1e-6);

// theta(v, w) = <nu0, v> / <nu0, w>: solves (v - theta w) orthogonal to nu0.
// Direction of a sphere minimizer of f, snapped to a singular direction when
// one lies within 1e-6 rad, or within `window` rad and f there is within
// 1e-8 max(1, radius) of the minimum. The second rule keeps corner minima
// exact for noisy evaluators with a one-sided quadratic contact.
Direction minimizer_direction(const SingularNorm& nm, const std::function<double(const Point&)>& f,
                              const Point& center, double radius, const Point& minimizer, double min_value,
                              double window = 1e-3);

double theta(const EuclideanUnitNormal& nu0, const Direction& v, const Direction& w);
// (1 - theta) / ||v - theta w||, and 0 when v == w.
double big_theta(const SingularNorm& nm, const EuclideanUnitNormal& nu0, const Direction& v, const Direction& w);

// |LHS - RHS| of (1 - theta(v1, v2)) |v2| / |v2 - v1| = cos(nu, v2 - v1) / cos(nu, v2),
// Euclidean lengths and angles.
double cosine_identity_residual(const SingularNorm& nm, const EuclideanUnitNormal& nu0, const Direction& v1,
                                const Direction& v2);

// lambda = <nu, inverse_gauss(nu)> / <nu, v> >= 1.
double lambda(const SingularNorm& nm, const EuclideanUnitNormal& nu, const Direction& v);
// (lambda - 1) / ||inverse_gauss(nu) - v||, and 0 at the touching point.
double big_lambda(const SingularNorm& nm, const EuclideanUnitNormal& nu, const Direction& v);
// nu -> Lambda(nu, v0) for a fixed direction v0.
double fixed_direction_lambda(const SingularNorm& nm, const Direction& v0, const EuclideanUnitNormal& nu);

}  // namespace mh
