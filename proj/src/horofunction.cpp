#include "minkhoro/horofunction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "minkhoro/gauss_map.hpp"
#include "minkhoro/parallel.hpp"
#include "minkhoro/sphere.hpp"

namespace mh {

namespace {

constexpr long double kEpsL = std::numeric_limits<long double>::epsilon();
// Frozen evaluators never use fewer steps than this (t >= 2^16 times the scale).
constexpr int kMinFrozenDepth = 16;

// Last usable step: the difference of two norms of size scale * 2^j loses
// about eps * scale * 2^j, which must stay two orders below the tolerance.
int roundoff_cap(const LimitSchedule& s, long double scale) {
  const long double budget = 1e-2L * s.tolerance / (4.0L * kEpsL * scale);
  const int cap = budget < 1.0L ? -1 : static_cast<int>(std::floor(std::log2(budget)));
  return std::min(cap, s.max_steps - 1);
}

std::string point_text(const Point& p) {
  std::ostringstream os;
  os.precision(17);
  os << "(";
  for (Eigen::Index i = 0; i < p.size(); ++i) os << (i ? ", " : "") << p(i);
  os << ")";
  return os.str();
}

void check_schedule(const LimitSchedule& s) {
  if (s.max_steps < 4) throw ArgumentError("limit schedule needs at least 4 steps");
  if (!(s.tolerance > 0.0)) throw ArgumentError("limit tolerance must be positive");
}

// A double unit vector has norm 1 +- 1e-16, which would add a drift of
// 1e-16 t to ||y - t u|| - t.
LVector unit_in_extended(const SingularNorm& nm, const Direction& d) {
  const LVector u = d.vector().cast<long double>();
  return u / nm.evaluate(u);
}

struct BusemannTerms {
  std::shared_ptr<const SingularNorm> nm;  // owned: evaluators outlive the caller's norm
  LVector y, origin, dir;
  long double unit_defect = 0.0L;  // N(dir) - 1
  long double t(int j) const { return std::ldexp(1.0L, j); }
  // ||y - o - t u|| - t
  long double operator()(int j) const {
    const long double tj = t(j);
    return nm->increment(LVector(-tj * dir), LVector(y - origin)) + tj * unit_defect;
  }
};

BusemannTerms busemann_terms(const SingularNorm& nm, const Ray& r) {
  BusemannTerms terms{std::make_shared<const SingularNorm>(nm), LVector(), r.origin.cast<long double>(), unit_in_extended(nm, r.direction)};
  terms.unit_defect = nm.evaluate(terms.dir) - 1.0L;
  return terms;
}

// Last usable step for the gauge: unbounded for stable increments.
int usable_steps(const SingularNorm& nm, const LimitSchedule& s, long double scale) {
  return nm.stable_increment() ? s.max_steps - 1 : roundoff_cap(s, scale);
}

LimitTrace busemann_trace(const SingularNorm& nm, const Ray& r, const Point& y, const LimitSchedule& schedule,
                          int cap) {
  BusemannTerms terms = busemann_terms(nm, r);
  terms.y = y.cast<long double>();
  long double previous = std::numeric_limits<long double>::infinity();
  const long double scale = 1.0L + (terms.y - terms.origin).norm();
  auto checked = [&](int j) {
    const long double a = terms(j);
    // Triangle inequality: t -> ||y - c(t)|| - t is non-increasing.
    if (a > previous + 64.0L * kEpsL * (scale + terms.t(j)))
      throw GeometryError("Busemann sequence increases at " + point_text(y) + ": the gauge violates the triangle inequality");
    previous = a;
    return a;
  };
  LimitSchedule s = schedule;
  s.max_steps = cap + 1;
  return adaptive_limit(checked, s);
}

// Distance-function terms along the escape schedule.
struct SequenceTerms {
  std::shared_ptr<const SingularNorm> nm;
  LVector x0;
  std::vector<LVector> xs;
  // ||y - x_j|| - ||x0 - x_j||
  long double operator()(const LVector& y, int j) const { return nm->increment(LVector(x0 - xs[j]), LVector(y - x0)); }
};

SequenceTerms escape_schedule(const SingularNorm& nm, const PointSequence& seq, int steps) {
  SequenceTerms st{std::make_shared<const SingularNorm>(nm), seq.base.cast<long double>(), {}};
  for (long double k : escape_indices(nm, seq, steps)) {
    const LVector x = seq.at(k);
    if (!x.allFinite()) throw LimitError("sequence '" + seq.id + "' jumps to non-finite values", 0.0, 0.0);
    st.xs.push_back(x);
  }
  return st;
}

}  // namespace

std::vector<long double> escape_indices(const SingularNorm& nm, const PointSequence& seq, int steps) {
  const LVector x0 = seq.base.cast<long double>();
  auto dist = [&](long double k) {
    const LVector x = seq.at(k);
    if (x.size() != seq.dimension()) throw ArgumentError("sequence '" + seq.id + "' has the wrong dimension");
    if (!x.allFinite()) return std::numeric_limits<long double>::infinity();
    return nm.evaluate(LVector(x - x0));
  };
  const long double d1 = dist(1.0L);
  if (!std::isfinite(d1)) throw ArgumentError("sequence '" + seq.id + "' is not finite at k = 1");
  const long double scale = 1.0L + d1;
  std::vector<long double> ks;
  long double k = 1.0L;
  for (int j = 0; j < steps; ++j) {
    const long double target = scale * std::ldexp(1.0L, j);
    long double lo = k, hi = k;
    while (!(dist(hi) >= target)) {
      lo = hi;
      hi *= 2.0L;
      if (hi > 1e300L)
        throw LimitError("not flag-directed: bounded (sequence '" + seq.id + "' stays within distance " +
                             std::to_string(static_cast<double>(dist(lo))) + " of the base)",
                         static_cast<double>(dist(lo)), static_cast<double>(target));
    }
    if (lo < hi) {
      for (int it = 0; it < 100; ++it) {
        const long double mid = 0.5L * (lo + hi);
        if (dist(mid) >= target) hi = mid; else lo = mid;
      }
    }
    k = hi;
    ks.push_back(k);
  }
  return ks;
}

PointGrid PointGrid::box(int dimension, double lo, double hi, double step) {
  if (dimension < kMinDimension || dimension > kMaxDimension) throw ArgumentError("grid dimension must be 2..4");
  if (!(step > 0.0) || !(hi >= lo)) throw ArgumentError("grid needs lo <= hi and a positive step");
  const int per_axis = static_cast<int>(std::floor((hi - lo) / step + 1e-9)) + 1;
  PointGrid g;
  g.lo = lo;
  g.hi = hi;
  g.step = step;
  std::vector<int> idx(dimension, 0);
  while (true) {
    Point p(dimension);
    for (int i = 0; i < dimension; ++i) p(i) = lo + step * idx[i];
    g.points.push_back(p);
    int axis = 0;
    while (axis < dimension && ++idx[axis] == per_axis) idx[axis++] = 0;
    if (axis == dimension) break;
  }
  return g;
}

const char* to_string(Provenance p) {
  switch (p) {
    case Provenance::busemann_of_ray: return "busemann-of-ray";
    case Provenance::limit_of_sequence: return "limit-of-sequence";
    case Provenance::closed_form: return "closed-form";
  }
  return "?";
}

const char* to_string(BusemannVerdict::Kind k) {
  switch (k) {
    case BusemannVerdict::Kind::busemann: return "busemann";
    case BusemannVerdict::Kind::not_busemann: return "not-busemann";
    case BusemannVerdict::Kind::inconclusive: return "inconclusive";
  }
  return "?";
}

Horofunction Horofunction::closed_form(std::string id, Point base, Evaluator raw) {
  return Horofunction(std::move(id), Provenance::closed_form, std::move(base),
                      std::make_shared<const Evaluator>(std::move(raw)));
}

Horofunction Horofunction::of_ray(std::string id, Ray ray, Point base, Evaluator raw, int depth) {
  Horofunction h(std::move(id), Provenance::busemann_of_ray, std::move(base), std::make_shared<const Evaluator>(std::move(raw)));
  h.ray_ = std::move(ray);
  h.depth_ = depth;
  return h;
}

Horofunction Horofunction::of_sequence(std::string id, Point base, Evaluator raw, int depth) {
  Horofunction h(std::move(id), Provenance::limit_of_sequence, std::move(base), std::make_shared<const Evaluator>(std::move(raw)));
  h.depth_ = depth;
  return h;
}

Horofunction Horofunction::with_flag(FlagMetadata flag) const {
  Horofunction h = *this;
  h.flag_ = std::move(flag);
  return h;
}

Horofunction Horofunction::with_id(std::string id) const {
  Horofunction h = *this;
  h.id_ = std::move(id);
  return h;
}

Horofunction Horofunction::rebased(const Point& new_base) const {
  if (new_base.size() != base_.size()) throw ArgumentError("rebase point has the wrong dimension");
  Horofunction h = *this;
  h.base_ = new_base;
  h.offset_ = (*raw_)(new_base);
  return h;
}

double busemann_eval(const SingularNorm& nm, const Ray& r, const Point& y, const LimitSchedule& schedule) {
  require_dimension(nm, y, "busemann_eval");
  require_dimension(nm, r.origin, "busemann_eval ray origin");
  check_schedule(schedule);
  if (y == r.origin) return 0.0;
  const int cap = usable_steps(nm, schedule, 1.0L);
  if (cap < 3) throw LimitError("busemann_eval: tolerance is below the attainable accuracy", 0.0, 0.0);
  const auto trace = busemann_trace(nm, r, y, schedule, cap);
  if (!trace.converged)
    throw LimitError("busemann_eval did not converge at " + point_text(y), trace.last, trace.previous);
  return trace.value;
}

Horofunction busemann_function(const SingularNorm& nm, const Ray& r, const PointGrid& probe, const LimitSchedule& schedule) {
  require_dimension(nm, r.origin, "busemann_function");
  check_schedule(schedule);
  if (probe.empty()) throw ArgumentError("busemann_function needs a probe grid");
  const int cap = usable_steps(nm, schedule, 1.0L);
  if (cap < 3) throw LimitError("busemann_function: tolerance is below the attainable accuracy", 0.0, 0.0);

  std::vector<int> steps(probe.size(), 0);
  parallel_for(probe.size(), [&](std::size_t i) {
    const Point& y = probe.points[i];
    if (y == r.origin) return;
    const auto trace = busemann_trace(nm, r, y, schedule, cap);
    if (!trace.converged) throw LimitError("Busemann limit did not converge at probe point " + point_text(y), trace.last, trace.previous);
    steps[i] = trace.steps;
  });
  const int certified = *std::max_element(steps.begin(), steps.end());
  const int depth = std::max(std::min(kMinFrozenDepth, cap), std::min(certified + 4, cap));

  const BusemannTerms proto = busemann_terms(nm, r);
  auto raw = [proto, depth](const Point& y) {
    BusemannTerms terms = proto;
    terms.y = y.cast<long double>();
    return static_cast<double>(fixed_depth_limit(terms, depth));
  };
  return Horofunction::of_ray("busemann", r, r.origin, raw, depth);
}

Horofunction horofunction_limit(const SingularNorm& nm, const PointSequence& seq, const PointGrid& probe,
                                const LimitSchedule& schedule) {
  require_dimension(nm, seq.base, "horofunction_limit base");
  check_schedule(schedule);
  if (!seq.at) throw ArgumentError("sequence '" + seq.id + "' has no generator");
  if (probe.empty()) throw ArgumentError("horofunction_limit needs a probe grid");

  const LVector x1 = seq.at(1.0L);
  if (x1.size() != seq.dimension() || !x1.allFinite()) throw ArgumentError("sequence '" + seq.id + "' is invalid at k = 1");
  const long double reach = 1.0L + nm.evaluate(LVector(x1 - seq.base.cast<long double>()));
  const int cap = usable_steps(nm, schedule, reach);
  if (cap < 3) throw LimitError("horofunction_limit: tolerance is below the attainable accuracy", 0.0, 0.0);
  auto terms = std::make_shared<const SequenceTerms>(escape_schedule(nm, seq, cap + 1));

  std::vector<int> steps(probe.size(), 0);
  parallel_for(probe.size(), [&](std::size_t i) {
    const LVector y = probe.points[i].cast<long double>();
    const auto trace = adaptive_limit([&](int j) { return (*terms)(y, j); }, LimitSchedule{cap + 1, schedule.tolerance});
    if (!trace.converged)
      throw LimitError("distance functions of '" + seq.id + "' do not converge at probe point " + point_text(probe.points[i]),
                       trace.last, trace.previous);
    steps[i] = trace.steps;
  });
  const int certified = *std::max_element(steps.begin(), steps.end());
  const int depth = std::max(std::min(kMinFrozenDepth, cap), std::min(certified + 4, cap));

  auto raw = [terms, depth](const Point& y) {
    const LVector ly = y.cast<long double>();
    return static_cast<double>(fixed_depth_limit([&](int j) { return (*terms)(ly, j); }, depth));
  };
  return Horofunction::of_sequence(seq.id, seq.base, raw, depth);
}

double difference_spread(const Horofunction& f, const Horofunction& g, const PointGrid& grid) {
  if (grid.empty()) throw ArgumentError("difference_spread needs a non-empty grid");
  if (f.dimension() != g.dimension()) throw ArgumentError("horofunctions live in different dimensions");
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto& p : grid.points) {
    const double d = f(p) - g(p);
    lo = std::min(lo, d);
    hi = std::max(hi, d);
  }
  return hi - lo;
}

bool equivalent_up_to_constant(const Horofunction& f, const Horofunction& g, const PointGrid& grid, double tol) {
  return difference_spread(f, g, grid) <= tol;
}

double lipschitz_excess(const SingularNorm& nm, const Horofunction& f, int pairs, std::uint64_t seed, double half_width) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-half_width, half_width);
  const int n = f.dimension();
  double worst = -std::numeric_limits<double>::infinity();
  for (int s = 0; s < pairs; ++s) {
    Point x(n), y(n);
    for (int i = 0; i < n; ++i) {
      x(i) = u(rng);
      y(i) = u(rng);
    }
    worst = std::max(worst, std::abs(f(x) - f(y)) - distance(nm, x, y));
  }
  return worst;
}

Horofunction linear_horofunction(std::string id, const Vector& covector, const Point& base) {
  if (covector.size() != base.size()) throw ArgumentError("covector and base dimensions differ");
  return Horofunction::closed_form(std::move(id), base, [covector](const Point& y) { return covector.dot(y); });
}

Horofunction euclidean_busemann(const Vector& u, const Point& base) {
  return linear_horofunction("euclidean-busemann", -u.normalized(), base);
}

Horofunction paper_beta0() {
  return Horofunction::closed_form("beta0", Point::Zero(2), [](const Point& y) { return std::abs(y(1)) - y(0); });
}

Horofunction paper_beta0_shifted(double a) {
  Point base(2);
  base << 0.0, a;
  std::ostringstream id;
  id << "beta0'(a=" << a << ")";
  return Horofunction::closed_form(id.str(), base, [a](const Point& y) { return std::abs(y(1) - a) - y(0); });
}

Horofunction paper_phi_plus() {
  return Horofunction::closed_form("phi+", Point::Zero(2), [](const Point& y) { return y(1) - y(0); });
}

Horofunction paper_phi_minus() {
  return Horofunction::closed_form("phi-", Point::Zero(2), [](const Point& y) { return -y(1) - y(0); });
}

Vector coex_covector(int eps1, int eps2, double sigma) {
  if (std::abs(eps1) != 1 || std::abs(eps2) != 1) throw ArgumentError("coex signs must be +-1");
  if (!(sigma > 0.0) || sigma > std::sqrt(2.0)) throw ArgumentError("coex parameter sigma must lie in (0, sqrt 2]");
  const double lam = std::sqrt(1.0 - 0.5 * sigma * sigma);
  const double mu = eps2 * sigma;
  Vector c(2);
  c << eps1 * lam, eps1 * (mu + eps2);
  return c;
}

Horofunction coex_horofunction(int eps1, int eps2, double sigma) {
  std::ostringstream id;
  id << "coex(" << eps1 << "," << eps2 << ",sigma=" << sigma << ")";
  return linear_horofunction(id.str(), coex_covector(eps1, eps2, sigma), Point::Zero(2));
}

BusemannVerdict is_busemann_function(const SingularNorm& nm, const Horofunction& f, double tol,
                                     const BusemannTestOptions& options) {
  require_dimension(nm, f.base(), "is_busemann_function");
  if (options.radii.empty()) throw ArgumentError("is_busemann_function needs at least one radius");
  const PointGrid probe = options.probe ? *options.probe : PointGrid::default_grid(nm.dimension());
  const Point& x0 = f.base();
  auto fun = [&](const Point& y) { return f(y); };

  Point far_point = x0;
  double far_radius = 0.0, far_value = 0.0;
  for (double t : options.radii) {
    const auto m = minimize_on_sphere(fun, nm, x0, t);
    if (!m.unique)
      throw GeometryError("sphere minimizer of '" + f.id() + "' at radius " + std::to_string(t) + " is not unique");
    if (std::abs(m.value + t) > 1e-5)
      throw GeometryError("minimum of '" + f.id() + "' on the sphere of radius " + std::to_string(t) + " is " +
                          std::to_string(m.value) + ", not -t");
    if (t > far_radius) {
      far_radius = t;
      far_point = m.point;
      far_value = m.value;
    }
  }
  Ray candidate{x0, minimizer_direction(nm, fun, x0, far_radius, far_point, far_value)};

  BusemannVerdict verdict;
  std::optional<Horofunction> beta;
  try {
    beta = busemann_function(nm, candidate, probe, options.schedule);
  } catch (const LimitError& e) {
    verdict.kind = BusemannVerdict::Kind::inconclusive;
    verdict.note = e.what();
    return verdict;
  }

  std::vector<double> fv(probe.size());
  for (std::size_t i = 0; i < probe.size(); ++i) fv[i] = f(probe.points[i]);
  auto spread_for_shift = [&](const Vector& shift) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (std::size_t i = 0; i < probe.size(); ++i) {
      const double d = fv[i] - (*beta)(Point(probe.points[i] - shift));
      lo = std::min(lo, d);
      hi = std::max(hi, d);
    }
    return hi - lo;
  };

  verdict.mismatch = spread_for_shift(Vector::Zero(nm.dimension()));
  verdict.ray = candidate;
  if (verdict.mismatch <= tol) {
    verdict.kind = BusemannVerdict::Kind::busemann;
    verdict.note = "minimal ray from the base point";
    return verdict;
  }

  if (options.scan_transversal && probe.step > 0.0) {
    // Origins on the transversal hyperplane through the base, at grid
    // offsets kept two steps inside the probe box.
    const int n = nm.dimension();
    Matrix q = Matrix::Identity(n, n);
    q.col(0) = candidate.direction.unit_euclidean();
    Eigen::HouseholderQR<Matrix> qr(q);
    const Matrix w = Matrix(qr.householderQ()).rightCols(n - 1);
    const double reach = 0.5 * (probe.hi - probe.lo) - 2.0 * probe.step;
    const int per_axis = std::max(0, static_cast<int>(std::floor(reach / probe.step + 1e-9)));
    std::vector<int> idx(n - 1, -per_axis);
    while (per_axis > 0) {
      Vector s(n - 1);
      for (int i = 0; i < n - 1; ++i) s(i) = probe.step * idx[i];
      const Vector shift = w * s;
      if (shift.norm() > 0.0) {
        const double sp = spread_for_shift(shift);
        if (sp < verdict.mismatch) {
          verdict.mismatch = sp;
          verdict.ray = Ray{Point(x0 + shift), candidate.direction};
        }
      }
      int axis = 0;
      while (axis < n - 1 && ++idx[axis] > per_axis) idx[axis++] = -per_axis;
      if (axis == n - 1) break;
    }
    if (verdict.mismatch <= tol) {
      verdict.kind = BusemannVerdict::Kind::busemann;
      verdict.note = "ray codirected with the minimal ray, origin on the transversal through the base";
      return verdict;
    }
  }
  verdict.kind = BusemannVerdict::Kind::not_busemann;
  verdict.note = "no ray with the minimal direction and origin on the probe transversal matches";
  return verdict;
}

}  // namespace mh
