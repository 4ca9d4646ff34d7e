#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "minkhoro/norm.hpp"

namespace mh {

// Checked norm evaluation: dimension and finiteness are validated.
double norm(const SingularNorm& nm, const Eigen::Ref<const Vector>& v);
double distance(const SingularNorm& nm, const Eigen::Ref<const Point>& x, const Eigen::Ref<const Point>& y);

void require_dimension(const SingularNorm& nm, const Eigen::Ref<const Vector>& v, const char* what);

// A Minkowski-unit vector. Also stands for the weak ideal point c(+inf) of
// every ray with this direction.
class Direction {
 public:
  // Accepts vectors within 1e-6 of unit length and renormalizes them.
  static Direction from_unit(const SingularNorm& nm, const Eigen::Ref<const Vector>& v);
  // Normalizes any nonzero finite vector.
  static Direction normalize(const SingularNorm& nm, const Eigen::Ref<const Vector>& v);

  const Vector& vector() const { return v_; }
  double euclidean_length() const { return euclidean_length_; }
  Eigen::Index size() const { return v_.size(); }
  // Euclidean unit vector along the direction.
  Vector unit_euclidean() const { return v_ / euclidean_length_; }

 private:
  Direction(Vector v) : v_(std::move(v)), euclidean_length_(v_.norm()) {}
  Vector v_;
  double euclidean_length_;
};

class EuclideanUnitNormal {
 public:
  static EuclideanUnitNormal from_unit(const Eigen::Ref<const Vector>& v);
  static EuclideanUnitNormal normalize(const Eigen::Ref<const Vector>& v);
  static EuclideanUnitNormal from_angle(double angle);

  const Vector& vector() const { return v_; }
  Eigen::Index size() const { return v_.size(); }

 private:
  explicit EuclideanUnitNormal(Vector v) : v_(std::move(v)) {}
  Vector v_;
};

inline double angular_distance(const Direction& a, const Direction& b) {
  return angle_between(a.vector(), b.vector());
}

// c(t) = origin + t * direction, an isometric embedding of [0, inf).
struct Ray {
  Point origin;
  Direction direction;

  Point at(double t) const { return origin + t * direction.vector(); }
};

// d_y(x) = |x y| - |x0 y| for center y and base x0.
struct DistanceFunction {
  Point center;
  Point base;
};

double distance_function_eval(const DistanceFunction& df, const SingularNorm& nm, const Eigen::Ref<const Point>& x);

struct ConvexityCheckReport {
  bool holds = true;
  double max_busemann_violation = 0.0;   // |g1(t)g2(t)| - t |g1(1)g2(1)|, shared origin
  double max_convexity_violation = 0.0;  // discrete convexity of t -> d(g1(t), g2(t))
  double max_detour_gain = 0.0;          // how much a sampled detour shortens a segment
};

// Checks the Busemann convexity inequality for the straight segments
// [a1 b1] and [a2 b2] at `samples` evenly spaced parameters, the convexity
// of t -> d(g1(t), g2(t)), and that both segments are geodesics (sampled
// detours do not shorten them). Slack 1e-9.
ConvexityCheckReport busemann_convexity_report(const SingularNorm& nm, const Eigen::Ref<const Point>& a1,
                                               const Eigen::Ref<const Point>& b1, const Eigen::Ref<const Point>& a2,
                                               const Eigen::Ref<const Point>& b2, int samples);
bool busemann_convexity_check(const SingularNorm& nm, const Eigen::Ref<const Point>& a1,
                              const Eigen::Ref<const Point>& b1, const Eigen::Ref<const Point>& a2,
                              const Eigen::Ref<const Point>& b2, int samples);

struct NormValidationOptions {
  int samples = 10000;
  std::uint64_t seed = 20240917;
};

struct NormValidationReport {
  bool passed = true;
  int samples = 0;
  std::uint64_t seed = 0;
  double symmetry_error = 0.0;        // max |N(-v) - N(v)| / N(v)
  double homogeneity_error = 0.0;     // max |N(tv) - |t| N(v)| / (|t| N(v))
  double triangle_violation = 0.0;    // max (N(a+b) - N(a) - N(b)) / (N(a) + N(b))
  double min_convexity_margin = 1.0;  // min over non-parallel unit pairs of 1 - N((u+v)/2)
  std::vector<std::string> findings;
};

// Sampled invariant battery: symmetry, homogeneity, triangle inequality and
// strict convexity of the unit ball.
NormValidationReport validate_norm(const SingularNorm& nm, const NormValidationOptions& options = {});

// Same dimension and relative agreement within `rel_tol` on a fixed
// deterministic sample of vectors.
bool norms_agree(const SingularNorm& a, const SingularNorm& b, double rel_tol = 1e-12);

}  // namespace mh
