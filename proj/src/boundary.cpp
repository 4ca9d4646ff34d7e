#include "minkhoro/boundary.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <sstream>

#include "minkhoro/errors.hpp"

namespace mh {

namespace {

constexpr double kFiberAngle = 1e-6;
constexpr double kClusterAngle = 1e-4;

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

// Deterministic order: decreasing coordinates, first coordinate first.
bool precedes(const Direction& a, const Direction& b) {
  const Vector u = a.unit_euclidean(), v = b.unit_euclidean();
  for (Eigen::Index i = 0; i < u.size(); ++i)
    if (std::abs(u(i) - v(i)) > 1e-12) return u(i) > v(i);
  return false;
}

// In the plane, the value of a smooth f near its minimum on a weakly curved
// sphere is flat, so the sampled minimizer is ill-conditioned. Refines it to
// the vertex of a quartic least-squares fit over the sublevel arc
// {f <= min + delta}. Kinked minima (near a singular direction, or with
// lopsided sublevel edges) are returned unchanged.
Vector refined_direction(const std::function<double(const Point&)>& f, const SingularNorm& nm, const Point& c,
                         double t, const SphereMinimum& m) {
  const Vector d0 = (m.point - c).normalized();
  if (nm.dimension() != 2) return d0;
  if (nearby_singular_direction(nm, Direction::normalize(nm, d0), 1e-4)) return d0;
  const double a0 = std::atan2(d0(1), d0(0));
  const double delta = 1e-9 * std::max(1.0, t);
  const auto g = [&](double a) { return f(c + t * Vector(unit_sphere_point(nm, a))); };
  const auto edge = [&](double sign) -> std::optional<double> {
    double inner = 0.0, outer = 1e-8;
    while (g(a0 + sign * outer) < m.value + delta) {
      inner = outer;
      outer *= 2.0;
      if (outer > 0.5) return std::nullopt;
    }
    for (int it = 0; it < 40; ++it) {
      const double mid = 0.5 * (inner + outer);
      (g(a0 + sign * mid) < m.value + delta ? inner : outer) = mid;
    }
    return 0.5 * (inner + outer);
  };
  const auto hi = edge(1.0), lo = edge(-1.0);
  if (!hi || !lo || *hi > 4.0 * *lo || *lo > 4.0 * *hi) return d0;
  const double w = std::min(*hi, *lo);
  constexpr int kPoints = 21;
  Eigen::MatrixXd A(kPoints, 5);
  Eigen::VectorXd y(kPoints);
  for (int i = 0; i < kPoints; ++i) {
    const double s = -1.0 + 2.0 * i / (kPoints - 1);
    for (int k = 0; k < 5; ++k) A(i, k) = std::pow(s, k);
    y(i) = g(a0 + w * s) - m.value;
  }
  const Eigen::VectorXd p = A.colPivHouseholderQr().solve(y);
  double s = 0.0;
  for (int it = 0; it < 30; ++it) {
    const double d1 = p(1) + 2 * p(2) * s + 3 * p(3) * s * s + 4 * p(4) * s * s * s;
    const double d2 = 2 * p(2) + 6 * p(3) * s + 12 * p(4) * s * s;
    if (!(d2 > 0.0)) return d0;
    s -= d1 / d2;
    if (std::abs(s) > 1.0) return d0;
  }
  Vector e(2);
  e << std::cos(a0 + w * s), std::sin(a0 + w * s);
  return e;
}

}  // namespace

WeakPoint weak_point_of_ray(const Ray& r) { return WeakPoint{r.direction}; }

ProjectionResult project_coarse_to_weak_detailed(const SingularNorm& nm, const CoarsePoint& phi,
                                                 const ProjectionOptions& options) {
  const Horofunction& f = phi.representative;
  if (f.dimension() != nm.dimension()) throw ArgumentError("projection: horofunction and norm dimensions differ");
  if (options.radii.empty()) throw ArgumentError("projection: no radii");
  for (double t : options.radii)
    if (!(t > 0.0) || !std::isfinite(t)) throw ArgumentError("projection: radii must be positive and finite");

  std::vector<SphereMinimum> minima;
  std::vector<Vector> dirs;
  double max_dev = 0.0, drift = 0.0;
  const auto eval = [&](const Point& y) { return f(y); };
  for (double t : options.radii) {
    SphereMinimum m = minimize_on_sphere(eval, nm, f.base(), t, options.sphere);
    const double dev = std::abs(m.value + t);
    max_dev = std::max(max_dev, dev);
    if (dev > options.min_tolerance)
      throw GeometryError("projection of " + f.id() + ": minimum over the sphere of radius " + fmt(t) + " is " +
                          fmt(m.value) + ", expected " + fmt(-t));
    if (!m.unique)
      throw GeometryError("projection of " + f.id() + ": minimizer on the sphere of radius " + fmt(t) +
                          " is not unique (competitor value " + fmt(m.second_value) + ")");
    dirs.push_back(refined_direction(eval, nm, f.base(), t, m));
    minima.push_back(std::move(m));
  }
  if (dirs.size() >= 2) {
    drift = angle_between(dirs[dirs.size() - 2], dirs.back());
    if (drift > options.drift_tolerance)
      throw GeometryError("projection of " + f.id() + ": minimizers drift by " + fmt(drift) + " rad");
  }
  Direction d = Direction::normalize(nm, dirs.back());
  if (options.snap_to_singular) {
    const SphereMinimum& last = minima.back();
    d = minimizer_direction(nm, eval, f.base(), options.radii.back(), f.base() + options.radii.back() * d.vector(),
                            last.value);
  }
  return ProjectionResult{WeakPoint{d}, dirs.back(), std::move(minima), max_dev, drift};
}

WeakPoint project_coarse_to_weak(const SingularNorm& nm, const CoarsePoint& phi, const std::vector<double>& radii) {
  ProjectionOptions o;
  o.radii = radii;
  return project_coarse_to_weak_detailed(nm, phi, o).point;
}

FiberReport explore_fiber(const SingularNorm& nm, const WeakPoint& xi, const std::vector<CoarsePoint>& candidates,
                          const PointGrid& grid, double tol, double busemann_tol) {
  FiberReport rep;
  rep.xi = xi.direction.vector();
  std::vector<const Horofunction*> reps;
  for (const CoarsePoint& c : candidates) {
    FiberEntry e;
    e.id = c.id();
    try {
      const WeakPoint w = project_coarse_to_weak(nm, c);
      e.projection = w.direction.vector();
      e.included = angular_distance(w.direction, xi.direction) <= kFiberAngle;
    } catch (const GeometryError& err) {
      e.note = err.what();
    }
    if (e.included) {
      for (std::size_t k = 0; k < reps.size() && e.class_id < 0; ++k)
        if (equivalent_up_to_constant(c.representative, *reps[k], grid, tol)) e.class_id = static_cast<int>(k);
      if (e.class_id < 0) {
        e.class_id = static_cast<int>(reps.size());
        reps.push_back(&c.representative);
      }
      try {
        e.verdict = is_busemann_function(nm, c.representative, busemann_tol);
      } catch (const GeometryError& err) {
        e.verdict.note = err.what();
      }
    }
    rep.entries.push_back(std::move(e));
  }
  rep.classes = static_cast<int>(reps.size());
  rep.min_class_separation = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < reps.size(); ++i)
    for (std::size_t j = i + 1; j < reps.size(); ++j)
      rep.min_class_separation = std::min(rep.min_class_separation, difference_spread(*reps[i], *reps[j], grid));
  return rep;
}

ContinuityReport projection_continuity_probe(const SingularNorm& nm, const std::vector<CoarsePoint>& phi_seq,
                                             const CoarsePoint& phi, const PointGrid& grid) {
  ContinuityReport rep;
  const WeakPoint target = project_coarse_to_weak(nm, phi);
  for (const CoarsePoint& c : phi_seq) {
    double sup = 0.0;
    for (const Point& y : grid.points) sup = std::max(sup, std::abs(c.representative(y) - phi.representative(y)));
    rep.sup_distance.push_back(sup);
    rep.angular_distance.push_back(angular_distance(project_coarse_to_weak(nm, c).direction, target.direction));
  }
  const auto& a = rep.angular_distance;
  if (a.empty()) return rep;
  bool tail_ok = true;
  for (std::size_t i = a.size() / 2 + 1; i < a.size(); ++i) tail_ok = tail_ok && a[i] <= a[i - 1] + 1e-12;
  rep.converges = tail_ok && a.back() < 1e-3;
  return rep;
}

RegularityReport classify_space_regularity(const SingularNorm& nm, int angular_resolution) {
  if (angular_resolution < 8) throw ArgumentError("regularity sweep needs at least 8 samples");
  const int n = nm.dimension();
  std::vector<Vector> samples;
  if (n == 2) {
    for (int i = 0; i < angular_resolution; ++i) {
      const long double a = 2.0L * 3.14159265358979323846264338327950288L * i / angular_resolution;
      samples.push_back(Vector(unit_sphere_point(nm, a).cast<double>()));
    }
  } else {
    samples = direction_samples(n, angular_resolution);
  }
  const std::size_t m = samples.size();
  std::vector<Vector> normals(m);
  for (std::size_t i = 0; i < m; ++i) normals[i] = nm.gradient(samples[i]).normalized();

  // Neighbour pairs: consecutive in the planar sweep, nearest neighbour otherwise.
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  if (n == 2) {
    for (std::size_t i = 0; i < m; ++i) pairs.emplace_back(i, (i + 1) % m);
  } else {
    std::vector<Vector> unit(m);
    for (std::size_t i = 0; i < m; ++i) unit[i] = samples[i].normalized();
    for (std::size_t i = 0; i < m; ++i) {
      std::size_t best = i;
      double best_dot = -2.0;
      for (std::size_t j = 0; j < m; ++j) {
        if (j == i) continue;
        const double d = unit[i].dot(unit[j]);
        if (d > best_dot) best_dot = d, best = j;
      }
      pairs.emplace_back(i, best);
    }
  }
  std::vector<double> jumps;
  for (const auto& [i, j] : pairs) jumps.push_back(angle_between(normals[i], normals[j]));
  std::vector<double> sorted = jumps;
  std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2, sorted.end());
  const double threshold = std::max(8.0 * sorted[sorted.size() / 2], 1e3 * kRegularityTolerance);

  std::vector<Direction> found;
  for (const Vector& s : samples) {
    const Direction d = Direction::normalize(nm, s);
    if (classify_direction(nm, d) == Regularity::singular) found.push_back(d);
  }
  for (std::size_t k = 0; k < pairs.size(); ++k)
    if (jumps[k] > threshold)
      if (auto d = kink_on_arc(nm, samples[pairs[k].first], samples[pairs[k].second], 1e3 * kRegularityTolerance))
        found.push_back(*d);

  RegularityReport rep;
  rep.sampled = static_cast<int>(m);
  for (const Direction& d : found) {
    const bool seen = std::any_of(rep.singular.begin(), rep.singular.end(),
                                  [&](const Direction& r) { return angular_distance(r, d) <= kClusterAngle; });
    if (!seen) rep.singular.push_back(d);
  }
  std::sort(rep.singular.begin(), rep.singular.end(), precedes);
  for (const Direction& d : rep.singular) rep.widths.push_back(gauss_image(nm, d).angular_width);
  rep.regular = rep.singular.empty();
  return rep;
}

}  // namespace mh
