#include "minkhoro/metric.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace mh {

void require_dimension(const SingularNorm& nm, const Eigen::Ref<const Vector>& v, const char* what) {
  if (v.size() != nm.dimension())
    throw ArgumentError(std::string(what) + ": dimension " + std::to_string(v.size()) + " does not match norm dimension " +
                        std::to_string(nm.dimension()));
  if (!v.allFinite()) throw ArgumentError(std::string(what) + ": non-finite coordinates");
}

double norm(const SingularNorm& nm, const Eigen::Ref<const Vector>& v) {
  require_dimension(nm, v, "norm");
  if (v.isZero(0.0)) return 0.0;
  return nm.evaluate(v);
}

double distance(const SingularNorm& nm, const Eigen::Ref<const Point>& x, const Eigen::Ref<const Point>& y) {
  require_dimension(nm, x, "distance");
  require_dimension(nm, y, "distance");
  return norm(nm, y - x);
}

Direction Direction::from_unit(const SingularNorm& nm, const Eigen::Ref<const Vector>& v) {
  const double n = norm(nm, v);
  if (std::abs(n - 1.0) > 1e-6) throw ArgumentError("vector is not a unit vector of the norm (norm " + std::to_string(n) + ")");
  return Direction(Vector(v / n));
}

Direction Direction::normalize(const SingularNorm& nm, const Eigen::Ref<const Vector>& v) {
  const double n = norm(nm, v);
  if (n == 0.0) throw ArgumentError("cannot normalize the zero vector");
  // Second pass absorbs rounding in the first division.
  Vector u = v / n;
  u /= nm.evaluate(u);
  return Direction(std::move(u));
}

EuclideanUnitNormal EuclideanUnitNormal::from_unit(const Eigen::Ref<const Vector>& v) {
  if (!v.allFinite()) throw ArgumentError("normal has non-finite coordinates");
  const double n = v.norm();
  if (std::abs(n - 1.0) > 1e-6) throw ArgumentError("normal is not a Euclidean unit vector");
  return EuclideanUnitNormal(v / n);
}

EuclideanUnitNormal EuclideanUnitNormal::normalize(const Eigen::Ref<const Vector>& v) {
  if (!v.allFinite()) throw ArgumentError("normal has non-finite coordinates");
  const double n = v.norm();
  if (n == 0.0) throw ArgumentError("cannot normalize the zero vector");
  return EuclideanUnitNormal(v / n);
}

EuclideanUnitNormal EuclideanUnitNormal::from_angle(double angle) {
  Vector v(2);
  v << std::cos(angle), std::sin(angle);
  return EuclideanUnitNormal(std::move(v));
}

double distance_function_eval(const DistanceFunction& df, const SingularNorm& nm, const Eigen::Ref<const Point>& x) {
  require_dimension(nm, df.center, "distance function center");
  require_dimension(nm, df.base, "distance function base");
  require_dimension(nm, x, "distance function argument");
  if (x == df.base) return 0.0;
  return norm(nm, x - df.center) - norm(nm, df.base - df.center);
}

namespace {

// Detour candidates around a segment point: +-e_i and +-(e_i +- e_j).
std::vector<Vector> detour_directions(int n) {
  std::vector<Vector> dirs;
  for (int i = 0; i < n; ++i) {
    dirs.push_back(Vector::Unit(n, i));
    dirs.push_back(-Vector::Unit(n, i));
    for (int j = i + 1; j < n; ++j) {
      for (int s : {-1, 1}) {
        Vector d = Vector::Unit(n, i) + s * Vector::Unit(n, j);
        dirs.push_back(d.normalized());
        dirs.push_back(-d.normalized());
      }
    }
  }
  return dirs;
}

double segment_detour_gain(const SingularNorm& nm, const Vector& a, const Vector& b, int samples,
                           const std::vector<Vector>& dirs) {
  const double len = nm.evaluate(Vector(b - a));
  const double scale = (b - a).norm();
  if (scale == 0.0) return 0.0;
  double gain = 0.0;
  for (int i = 1; i < samples - 1; ++i) {
    const double t = static_cast<double>(i) / (samples - 1);
    const Vector m0 = a + t * (b - a);
    for (const Vector& d : dirs) {
      for (double r : {0.05, 0.25, 0.5}) {
        const Vector m = m0 + r * scale * d;
        const double via = nm.evaluate(Vector(m - a)) + nm.evaluate(Vector(b - m));
        gain = std::max(gain, len - via);
      }
    }
  }
  return gain;
}

}  // namespace

ConvexityCheckReport busemann_convexity_report(const SingularNorm& nm, const Eigen::Ref<const Point>& a1,
                                               const Eigen::Ref<const Point>& b1, const Eigen::Ref<const Point>& a2,
                                               const Eigen::Ref<const Point>& b2, int samples) {
  for (const auto* p : {&a1, &b1, &a2, &b2}) require_dimension(nm, *p, "busemann_convexity_check");
  if (samples < 3) throw ArgumentError("busemann_convexity_check needs at least 3 samples");
  constexpr double slack = 1e-9;
  ConvexityCheckReport rep;

  auto d_at = [&](double t) {
    const Vector g1 = a1 + t * (b1 - a1);
    const Vector g2 = a2 + t * (b2 - a2);
    return norm(nm, g2 - g1);
  };
  const double d0 = d_at(0.0);
  const double d1 = d_at(1.0);
  const bool shared_origin = a1 == a2;
  std::vector<double> ts(samples), ds(samples);
  for (int i = 0; i < samples; ++i) {
    ts[i] = static_cast<double>(i) / (samples - 1);
    ds[i] = d_at(ts[i]);
    if (shared_origin) rep.max_busemann_violation = std::max(rep.max_busemann_violation, ds[i] - ts[i] * d1);
    rep.max_convexity_violation = std::max(rep.max_convexity_violation, ds[i] - ((1.0 - ts[i]) * d0 + ts[i] * d1));
  }
  for (int i = 1; i + 1 < samples; ++i) {
    const double chord = 0.5 * (ds[i - 1] + ds[i + 1]);
    rep.max_convexity_violation = std::max(rep.max_convexity_violation, ds[i] - chord);
  }
  const auto dirs = detour_directions(nm.dimension());
  rep.max_detour_gain = std::max(segment_detour_gain(nm, a1, b1, samples, dirs), segment_detour_gain(nm, a2, b2, samples, dirs));
  rep.holds = rep.max_busemann_violation <= slack && rep.max_convexity_violation <= slack && rep.max_detour_gain <= slack;
  return rep;
}

bool busemann_convexity_check(const SingularNorm& nm, const Eigen::Ref<const Point>& a1,
                              const Eigen::Ref<const Point>& b1, const Eigen::Ref<const Point>& a2,
                              const Eigen::Ref<const Point>& b2, int samples) {
  return busemann_convexity_report(nm, a1, b1, a2, b2, samples).holds;
}

NormValidationReport validate_norm(const SingularNorm& nm, const NormValidationOptions& options) {
  NormValidationReport rep;
  rep.samples = options.samples;
  rep.seed = options.seed;
  const int n = nm.dimension();
  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> scale(-10.0, 10.0);
  auto random_vector = [&] {
    Vector v(n);
    for (int i = 0; i < n; ++i) v(i) = gauss(rng);
    return v;
  };

  bool finite = true;
  for (int s = 0; s < options.samples; ++s) {
    const Vector a = random_vector();
    const Vector b = random_vector();
    const double na = nm.evaluate(a);
    const double nb = nm.evaluate(b);
    if (!std::isfinite(na) || !std::isfinite(nb) || na <= 0.0 || nb <= 0.0) {
      finite = false;
      continue;
    }
    rep.symmetry_error = std::max(rep.symmetry_error, std::abs(nm.evaluate(Vector(-a)) - na) / na);
    const double t = scale(rng);
    rep.homogeneity_error =
        std::max(rep.homogeneity_error, std::abs(nm.evaluate(Vector(t * a)) - std::abs(t) * na) / (std::abs(t) * na));
    rep.triangle_violation = std::max(rep.triangle_violation, (nm.evaluate(Vector(a + b)) - na - nb) / (na + nb));

    if (angle_between(a, b) < 1e-3 || angle_between(a, -b) < 1e-3) continue;
    const LVector la = a.cast<long double>(), lb = b.cast<long double>();
    const LVector u = la / nm.evaluate(la);
    const LVector v = lb / nm.evaluate(lb);
    const long double mid = nm.evaluate(LVector((u + v) / 2.0L));
    rep.min_convexity_margin = std::min(rep.min_convexity_margin, static_cast<double>(1.0L - mid));
  }

  if (!finite) rep.findings.push_back("norm is not positive and finite on sampled nonzero vectors");
  if (rep.symmetry_error > 1e-12) rep.findings.push_back("symmetry violated: max relative error " + std::to_string(rep.symmetry_error));
  if (rep.homogeneity_error > 1e-12)
    rep.findings.push_back("absolute homogeneity violated: max relative error " + std::to_string(rep.homogeneity_error));
  if (rep.triangle_violation > 1e-12)
    rep.findings.push_back("triangle inequality violated: max relative excess " + std::to_string(rep.triangle_violation));
  if (rep.min_convexity_margin <= 1e-15)
    rep.findings.push_back("strict convexity violated: min midpoint margin " + std::to_string(rep.min_convexity_margin));
  rep.passed = rep.findings.empty();
  return rep;
}

bool norms_agree(const SingularNorm& a, const SingularNorm& b, double rel_tol) {
  if (a.dimension() != b.dimension()) return false;
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  for (int i = 0; i < 512; ++i) {
    Vector v(a.dimension());
    for (Eigen::Index j = 0; j < v.size(); ++j) v(j) = g(rng);
    const double na = a.evaluate(v), nb = b.evaluate(v);
    if (std::abs(na - nb) > rel_tol * std::max(na, nb)) return false;
  }
  return true;
}

}  // namespace mh
