#include "minkhoro/gauss_map.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "minkhoro/optimize.hpp"
#include "minkhoro/sphere.hpp"

namespace mh {

namespace {

struct Support2D {
  long double value;
  LVector point;
};

Support2D support_2d(const SingularNorm& nm, const Vector& nu_d) {
  const LVector nu = nu_d.cast<long double>();
  auto value_at = [&](long double phi) { return nu.dot(unit_sphere_point<long double>(nm, phi)); };

  constexpr int m = 720;
  const long double step = 2.0L * std::numbers::pi_v<long double> / m;
  std::vector<long double> coarse(m);
  int best = 0;
  for (int i = 0; i < m; ++i) {
    coarse[i] = value_at(step * i);
    if (coarse[i] > coarse[best]) best = i;
  }
  auto r = golden_section_maximize<long double>(value_at, step * (best - 1), step * (best + 1), 1e-17L, 300);
  Support2D out{r.value, unit_sphere_point<long double>(nm, r.argmin)};
  if (coarse[best] >= out.value) out = {coarse[best], unit_sphere_point<long double>(nm, step * best)};

  for (int i = 0; i < m; ++i) {
    if (coarse[i] < out.value - 1e-12L) continue;
    const LVector x = unit_sphere_point<long double>(nm, step * i);
    if ((x - out.point).norm() > 1e-6L)
      throw ConvexityError("support hyperplane touches the unit sphere in more than one point (flat facet)");
  }
  return out;
}

SupportPoint support_nd(const SingularNorm& nm, const Vector& nu) {
  const Point origin = Point::Zero(nm.dimension());
  auto f = [&](const Point& x) { return -nu.dot(x); };
  SphereMinimumOptions opt;
  opt.directions = 2000;
  const auto res = minimize_on_sphere(f, nm, origin, 1.0, opt);
  for (const auto& c : res.local_minima) {
    if (c.value > res.value + 1e-10) continue;
    if ((c.point - res.point).norm() > 1e-6)
      throw ConvexityError("support hyperplane touches the unit sphere in more than one point (flat facet)");
  }
  return {-res.value, Direction::normalize(nm, res.point)};
}

void require_normal_dimension(const SingularNorm& nm, const EuclideanUnitNormal& nu) {
  if (nu.size() != nm.dimension()) throw ArgumentError("normal dimension does not match the norm");
}

// Outer unit normal at v approached from the side d: the ball's normal is the
// norm gradient, and 2 n(eps) - n(2 eps) removes the first-order drift.
LVector one_sided_normal(const SingularNorm& nm, const LVector& v, const LVector& d) {
  const long double eps = 1e-6L * v.norm();
  const LVector g1 = nm.gradient(LVector(v + eps * d)).normalized();
  const LVector g2 = nm.gradient(LVector(v + 2.0L * eps * d)).normalized();
  return (2.0L * g1 - g2).normalized();
}

EuclideanUnitNormal as_normal(const LVector& v) { return EuclideanUnitNormal::normalize(v.cast<double>()); }

}  // namespace

const char* to_string(Regularity r) { return r == Regularity::regular ? "regular" : "singular"; }

SupportPoint support_point(const SingularNorm& nm, const EuclideanUnitNormal& nu) {
  require_normal_dimension(nm, nu);
  if (nm.dimension() == 2) {
    const auto s = support_2d(nm, nu.vector());
    return {static_cast<double>(s.value), Direction::normalize(nm, s.point.cast<double>())};
  }
  return support_nd(nm, nu.vector());
}

double support_value(const SingularNorm& nm, const EuclideanUnitNormal& nu) { return support_point(nm, nu).value; }

Direction inverse_gauss(const SingularNorm& nm, const EuclideanUnitNormal& nu) { return support_point(nm, nu).maximizer; }

GaussImage gauss_image(const SingularNorm& nm, const Direction& v, double tol) {
  if (v.size() != nm.dimension()) throw ArgumentError("direction dimension does not match the norm");
  const LVector x = v.vector().cast<long double>();
  const int n = nm.dimension();

  if (n == 2) {
    LVector t(2);
    t << -x(1), x(0);
    t.normalize();
    const LVector before = one_sided_normal(nm, x, -t);
    const LVector after = one_sided_normal(nm, x, t);
    const long double cross = before(0) * after(1) - before(1) * after(0);
    const double width = static_cast<double>(std::atan2(std::abs(cross), before.dot(after)));
    if (width < tol) return {v, GaussImage::Kind::singleton, {as_normal(before + after)}, width};
    return {v, GaussImage::Kind::arc, {as_normal(before), as_normal(after)}, width};
  }

  // Tangent sampling directions: a circle (n = 3) or sphere (n = 4) of
  // directions in the Euclidean complement of v.
  Matrix q = Matrix::Identity(n, n);
  q.col(0) = v.unit_euclidean();
  Eigen::HouseholderQR<Matrix> qr(q);
  const Matrix basis = Matrix(qr.householderQ()).rightCols(n - 1);
  std::vector<LVector> normals;
  for (const Vector& s : direction_samples(n - 1, 64)) normals.push_back(one_sided_normal(nm, x, (basis * s).cast<long double>()));
  double width = 0.0;
  for (std::size_t i = 0; i < normals.size(); ++i)
    for (std::size_t j = i + 1; j < normals.size(); ++j)
      width = std::max(width, angle_between(normals[i].cast<double>(), normals[j].cast<double>()));
  if (width < tol) {
    LVector mean = LVector::Zero(n);
    for (const auto& m : normals) mean += m;
    return {v, GaussImage::Kind::singleton, {as_normal(mean)}, width};
  }
  GaussImage g{v, GaussImage::Kind::sampled, {}, width};
  for (const auto& m : normals) g.normals.push_back(as_normal(m));
  return g;
}

Regularity classify_direction(const SingularNorm& nm, const Direction& v, double tol) {
  return gauss_image(nm, v, tol).angular_width < tol ? Regularity::regular : Regularity::singular;
}

std::optional<Direction> kink_on_arc(const SingularNorm& nm, const Vector& a, const Vector& b, double min_jump) {
  const int n = nm.dimension();
  if (a.size() != n || b.size() != n) throw ArgumentError("kink_on_arc: dimension mismatch");
  const LVector ua = a.cast<long double>().normalized(), ub = b.cast<long double>().normalized();
  const long double cosw = std::clamp(ua.dot(ub), -1.0L, 1.0L);
  const long double w = std::acos(cosw);
  if (!(w > 0.0L) || w > 3.0L) return std::nullopt;
  // Minkowski-unit point at fraction s of the great-circle arc.
  auto point_at = [&](long double s) {
    const LVector e = (std::sin((1.0L - s) * w) * ua + std::sin(s * w) * ub) / std::sin(w);
    return LVector(e / nm.evaluate(e));
  };
  auto normal_at = [&](long double s) { return LVector(nm.gradient(point_at(s)).normalized()); };
  long double lo = 0.0L, hi = 1.0L;
  LVector nlo = normal_at(lo), nhi = normal_at(hi);
  if (angle_between(nlo.cast<double>(), nhi.cast<double>()) < min_jump) return std::nullopt;
  for (int it = 0; it < 96; ++it) {
    const long double mid = 0.5L * (lo + hi);
    const LVector nmid = normal_at(mid);
    if (angle_between(nmid.cast<double>(), nlo.cast<double>()) < angle_between(nmid.cast<double>(), nhi.cast<double>())) {
      lo = mid;
      nlo = nmid;
    } else {
      hi = mid;
      nhi = nmid;
    }
  }
  const Direction d = Direction::normalize(nm, point_at(0.5L * (lo + hi)).cast<double>());
  if (classify_direction(nm, d) != Regularity::singular) return std::nullopt;
  return d;
}

std::optional<Direction> nearby_singular_direction(const SingularNorm& nm, const Direction& v, double angular_tol) {
  for (const Vector& d : nm.declared_singular_directions())
    if (angle_between(d, v.vector()) <= angular_tol) return Direction::normalize(nm, d);
  if (nm.dimension() != 2) return std::nullopt;
  const double c = std::cos(angular_tol), s = std::sin(angular_tol);
  const Vector& x = v.vector();
  Vector a(2), b(2);
  a << c * x(0) + s * x(1), -s * x(0) + c * x(1);
  b << c * x(0) - s * x(1), s * x(0) + c * x(1);
  return kink_on_arc(nm, a, b, 1e3 * kRegularityTolerance);
}

Direction minimizer_direction(const SingularNorm& nm, const std::function<double(const Point&)>& f,
                              const Point& center, double radius, const Point& minimizer, double min_value,
                              double window) {
  const Direction d = Direction::normalize(nm, minimizer - center);
  if (auto s = nearby_singular_direction(nm, d)) return *s;
  if (auto s = nearby_singular_direction(nm, d, window)) {
    const double gap = f(center + radius * s->vector()) - min_value;
    if (gap <= 1e-8 * std::max(1.0, radius)) return *s;
  }
  return d;
}

double theta(const EuclideanUnitNormal& nu0, const Direction& v, const Direction& w) {
  const double a = nu0.vector().dot(v.vector());
  const double b = nu0.vector().dot(w.vector());
  if (!(a > 0.0) || !(b > 0.0)) throw DomainError("theta requires <nu0, v> > 0 and <nu0, w> > 0");
  return a / b;
}

double big_theta(const SingularNorm& nm, const EuclideanUnitNormal& nu0, const Direction& v, const Direction& w) {
  const double th = theta(nu0, v, w);
  if (v.vector() == w.vector()) return 0.0;
  return (1.0 - th) / norm(nm, v.vector() - th * w.vector());
}

double cosine_identity_residual(const SingularNorm& nm, const EuclideanUnitNormal& nu0, const Direction& v1,
                                const Direction& v2) {
  require_normal_dimension(nm, nu0);
  const double th = theta(nu0, v1, v2);
  const Vector d = v2.vector() - v1.vector();
  const double len2 = v2.vector().norm();
  if (d.norm() < 1e-6 * len2) throw ConditioningError("cosine identity: v1 and v2 are nearly equal");
  const double cos_den = nu0.vector().dot(v2.vector()) / len2;
  if (cos_den < 1e-12) throw ConditioningError("cosine identity: nu is nearly orthogonal to v2");
  const double lhs = (1.0 - th) * len2 / d.norm();
  const double rhs = (nu0.vector().dot(d) / d.norm()) / cos_den;
  return std::abs(lhs - rhs);
}

double lambda(const SingularNorm& nm, const EuclideanUnitNormal& nu, const Direction& v) {
  require_normal_dimension(nm, nu);
  const double c = nu.vector().dot(v.vector());
  if (!(c > 0.0)) throw DomainError("lambda requires <nu, v> > 0");
  return support_value(nm, nu) / c;
}

double big_lambda(const SingularNorm& nm, const EuclideanUnitNormal& nu, const Direction& v) {
  require_normal_dimension(nm, nu);
  const double c = nu.vector().dot(v.vector());
  if (!(c > 0.0)) throw DomainError("Lambda requires <nu, v> > 0");
  const auto sp = support_point(nm, nu);
  if (sp.maximizer.vector() == v.vector()) return 0.0;
  return (sp.value / c - 1.0) / norm(nm, sp.maximizer.vector() - v.vector());
}

double fixed_direction_lambda(const SingularNorm& nm, const Direction& v0, const EuclideanUnitNormal& nu) {
  return big_lambda(nm, nu, v0);
}

}  // namespace mh
