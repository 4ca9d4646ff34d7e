#include "minkhoro/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>

#include "minkhoro/boundary.hpp"
#include "minkhoro/errors.hpp"
#include "minkhoro/flag.hpp"
#include "minkhoro/gauss_map.hpp"
#include "minkhoro/horofunction.hpp"
#include "minkhoro/sphere.hpp"

namespace mh {

const char* to_string(CriterionStatus s) {
  switch (s) {
    case CriterionStatus::pass: return "pass";
    case CriterionStatus::fail: return "fail";
    case CriterionStatus::not_applicable: return "n/a";
  }
  return "?";
}

bool VerifyReport::passed() const {
  return std::none_of(criteria.begin(), criteria.end(),
                      [](const CriterionResult& c) { return c.status == CriterionStatus::fail; });
}

namespace {

const char* kTitles[kCriterionCount] = {
    "Busemann closed form along the corner ray",
    "non-Busemann horofunctions of parabolic sequences",
    "fiber over the singular direction",
    "regularity sweep",
    "Theta and Lambda limits",
    "cosine identity",
    "ball-minimum law",
    "Busemann convexity",
    "same-flag and rigid-shift equivalences",
    "round trip and continuity of the projection",
};

std::string num(double x) {
  std::ostringstream os;
  os.precision(3);
  os << x;
  return os.str();
}

Vector v2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

// Accumulates the outcome of one criterion: every failed check is named.
struct Outcome {
  bool ok = true;
  bool applicable = true;
  std::vector<std::string> notes;

  void check(bool cond, const std::string& what) {
    if (!cond) ok = false;
    notes.push_back(std::string(cond ? "" : "FAILED ") + what);
  }
  void note(const std::string& what) { notes.push_back(what); }
};

struct Context {
  const SingularNorm& nm;
  const VerifyOptions& opt;
  bool reference;
  PointGrid grid;

  double tol(double nominal) const { return opt.tolerance.value_or(nominal); }
};

double max_error(const Horofunction& f, const std::function<double(const Point&)>& g, const PointGrid& grid) {
  double e = 0.0;
  for (const Point& p : grid.points) e = std::max(e, std::abs(f(p) - g(p)));
  return e;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Horofunction reference_beta0(const Context& c) {
  return busemann_function(c.nm, Ray{Point::Zero(2), Direction::from_unit(c.nm, v2(1, 0))}, c.grid, c.opt.schedule)
      .with_id("beta0");
}

Horofunction parabola_limit(const Context& c, int sign, const std::string& id) {
  const auto s = FlagDirectedSequence::from_coordinates(
      id, Point::Zero(2), {IndexFunction::parse("k^2"), IndexFunction({GrowthTerm{static_cast<double>(sign), 1.0, 0.0}})});
  return project_to_horofunction(c.nm, s, c.grid, c.opt.schedule).with_id(id);
}

// Euclidean unit vectors, seeded and deterministic.
Vector random_unit(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> g;
  Vector v(n);
  do {
    for (int i = 0; i < n; ++i) v(i) = g(rng);
  } while (v.norm() < 1e-3);
  return v.normalized();
}

// 1 -----------------------------------------------------------------------
void busemann_closed_form(const Context& c, Outcome& out) {
  if (!c.reference) {
    out.applicable = false;
    out.note("closed form belongs to the reference plane norm");
    return;
  }
  const auto t0 = std::chrono::steady_clock::now();
  const auto beta = reference_beta0(c);
  const double secs = seconds_since(t0);
  const double err = max_error(beta, [](const Point& y) { return std::abs(y(1)) - y(0); }, c.grid);
  out.check(err <= c.tol(1e-6), "max |beta - (|x2| - x1)| = " + num(err) + " on " + std::to_string(c.grid.size()) +
                                    " grid points (tolerance " + num(c.tol(1e-6)) + ")");
  out.check(secs < 5.0, "runtime " + num(secs) + " s (limit 5 s)");
}

// 2 -----------------------------------------------------------------------
void non_busemann(const Context& c, Outcome& out) {
  if (!c.reference) {
    out.applicable = false;
    out.note("the corner sequences belong to the reference plane norm");
    return;
  }
  const auto plus = parabola_limit(c, -1, "(k^2,-k)");
  const auto minus = parabola_limit(c, 1, "(k^2,k)");
  const double ep = max_error(plus, [](const Point& y) { return y(1) - y(0); }, c.grid);
  const double em = max_error(minus, [](const Point& y) { return -y(1) - y(0); }, c.grid);
  out.check(ep <= c.tol(1e-4), "(k^2,-k) limit vs x2 - x1: " + num(ep));
  out.check(em <= c.tol(1e-4), "(k^2,k) limit vs -x2 - x1: " + num(em));
  const double bt = c.tol(1e-4);
  const auto vp = is_busemann_function(c.nm, plus, bt);
  const auto vm = is_busemann_function(c.nm, minus, bt);
  const auto vb = is_busemann_function(c.nm, reference_beta0(c), bt);
  out.check(vp.kind == BusemannVerdict::Kind::not_busemann, std::string("verdict for phi+: ") + to_string(vp.kind));
  out.check(vm.kind == BusemannVerdict::Kind::not_busemann, std::string("verdict for phi-: ") + to_string(vm.kind));
  out.check(vb.kind == BusemannVerdict::Kind::busemann, std::string("verdict for beta0: ") + to_string(vb.kind));
}

// 3 -----------------------------------------------------------------------
void fiber_structure(const Context& c, Outcome& out) {
  if (!c.reference) {
    out.applicable = false;
    out.note("the singular fiber belongs to the reference plane norm");
    return;
  }
  const std::vector<CoarsePoint> cands{{paper_beta0()}, {paper_beta0_shifted(1.0)}, {paper_beta0_shifted(-2.0)},
                                       {paper_phi_plus()}, {paper_phi_minus()}};
  const WeakPoint xi{Direction::from_unit(c.nm, v2(1, 0))};
  const FiberReport rep = explore_fiber(c.nm, xi, cands, c.grid, c.tol(1e-6), c.tol(1e-4));
  double worst = 0.0;
  bool all = true;
  for (const auto& e : rep.entries) {
    all = all && e.projection.has_value();
    if (e.projection) worst = std::max(worst, angle_between(*e.projection, xi.direction.vector()));
  }
  out.check(all && worst <= c.tol(1e-6), "largest angle of a projection to (1,0): " + num(worst));
  out.check(rep.classes == 5, std::to_string(rep.classes) + " equivalence classes (expected 5)");
  out.check(rep.min_class_separation >= 0.5, "smallest difference spread between classes " + num(rep.min_class_separation));
}

// 4 -----------------------------------------------------------------------
void regularity_sweep(const Context& c, Outcome& out) {
  const int res = c.nm.dimension() == 2 ? 3600 : 2000;
  const auto t0 = std::chrono::steady_clock::now();
  const RegularityReport rep = classify_space_regularity(c.nm, res);
  const double secs = seconds_since(t0);
  std::ostringstream found;
  for (const auto& d : rep.singular) found << " (" << num(d.vector()(0)) << "," << num(d.vector()(1)) << ")";
  out.note(std::to_string(rep.singular.size()) + " singular directions found:" + found.str());
  if (c.reference) {
    bool match = rep.singular.size() == 2;
    if (match) {
      match = angle_between(rep.singular[0].vector(), v2(1, 0)) <= c.tol(1e-6) &&
              angle_between(rep.singular[1].vector(), v2(-1, 0)) <= c.tol(1e-6);
    }
    out.check(match, "singular set equals {(1,0), (-1,0)}");
  } else if (!c.nm.declared_singular_directions().empty()) {
    const auto& decl = c.nm.declared_singular_directions();
    bool match = decl.size() == rep.singular.size();
    for (const auto& d : decl)
      match = match && std::any_of(rep.singular.begin(), rep.singular.end(), [&](const Direction& s) {
                return angle_between(s.vector(), d) <= c.tol(1e-6);
              });
    out.check(match, "singular set equals the declared singular directions");
  } else {
    out.note("no declared singular directions to compare with");
  }
  out.check(secs < 30.0, "sweep runtime " + num(secs) + " s (limit 30 s)");
  for (const char* name : {"euclidean", "p4"}) {
    const auto r = classify_space_regularity(builtin_norm(name), 3600);
    out.check(r.regular, std::string(name) + " norm: " + std::to_string(r.singular.size()) + " singular directions");
  }
}

// 5 -----------------------------------------------------------------------
void theta_lambda(const Context& c, Outcome& out) {
  if (c.nm.dimension() != 2) {
    out.applicable = false;
    out.note("approach sequences are planar");
    return;
  }
  const SingularNorm& nm = c.nm;
  std::mt19937_64 rng(c.opt.seed);
  std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi), coef(0.5, 3.0), sign(-1.0, 1.0);
  const auto point = [&](double a) { return Direction::normalize(nm, Vector(unit_sphere_point(nm, a))); };
  const auto normal_at = [&](double a) {
    return EuclideanUnitNormal::normalize(nm.gradient(Vector(unit_sphere_point(nm, a))));
  };
  double worst_theta = 0.0, worst_lambda = 0.0;
  int sequences = 0;
  while (sequences < 10) {
    const double a0 = angle(rng);
    const double c1 = coef(rng) * (sign(rng) < 0 ? -1 : 1), c2 = coef(rng) * (sign(rng) < 0 ? -1 : 1),
                 c3 = coef(rng) * (sign(rng) < 0 ? -1 : 1);
    if (classify_direction(nm, point(a0)) != Regularity::regular) continue;
    if (nearby_singular_direction(nm, point(a0), 0.05) || std::abs(c1 - c2) < 0.1) continue;
    const auto nu0 = normal_at(a0);
    double tail_theta = 0.0, tail_lambda = 0.0;
    for (int k = 5000; k <= 10000; k += 50) {
      tail_theta = std::max(tail_theta, big_theta(nm, nu0, point(a0 + c1 / k), point(a0 + c2 / k)));
      tail_lambda = std::max(tail_lambda, big_lambda(nm, normal_at(a0 + c3 / k), point(a0 + c1 / k)));
    }
    worst_theta = std::max(worst_theta, tail_theta);
    worst_lambda = std::max(worst_lambda, tail_lambda);
    ++sequences;
  }
  out.check(worst_theta < c.tol(1e-3), "largest Theta tail over k in [5e3, 1e4], 10 sequences: " + num(worst_theta));
  out.check(worst_lambda < c.tol(1e-3), "largest Lambda tail over k in [5e3, 1e4], 10 sequences: " + num(worst_lambda));
  if (!c.reference) {
    out.note("corner sequences not applicable (reference plane norm only)");
    return;
  }
  const double r = std::sqrt(0.5);
  const auto v0 = Direction::from_unit(nm, v2(1, 0));
  double lo_lambda = 1e300, lo_theta = 1e300;
  for (int k = 100; k <= 10000; k += 10) {
    const double t = std::numbers::pi / 4 + 1.0 / k;
    const auto vl = Direction::normalize(nm, v2(std::sqrt(2.0) * std::cos(t), -1 + std::sqrt(2.0) * std::sin(t)));
    const auto vt = Direction::normalize(nm, v2(std::sqrt(2.0) * std::cos(t), 1 - std::sqrt(2.0) * std::sin(t)));
    lo_lambda = std::min(lo_lambda, big_lambda(nm, EuclideanUnitNormal::from_unit(v2(r, -r)), vl));
    lo_theta = std::min(lo_theta, big_theta(nm, EuclideanUnitNormal::from_unit(v2(r, r)), vt, v0));
  }
  out.check(lo_lambda > kCornerLowerBound, "min Lambda along the corner sequence: " + num(lo_lambda) + " (bound " +
                                               num(kCornerLowerBound) + ")");
  out.check(lo_theta > kCornerLowerBound, "min Theta along the corner sequence: " + num(lo_theta) + " (bound " +
                                              num(kCornerLowerBound) + ")");
}

// The configured norm followed by every builtin norm it does not equal.
std::vector<SingularNorm> norm_pool(const SingularNorm& nm) {
  std::vector<SingularNorm> norms{nm};
  for (const auto& name : builtin_norm_names()) {
    SingularNorm b = builtin_norm(name);
    if (b.dimension() == nm.dimension() && norms_agree(b, nm)) continue;
    norms.push_back(std::move(b));
  }
  return norms;
}

// 6 -----------------------------------------------------------------------
void cosine_identity(const Context& c, Outcome& out) {
  const std::vector<SingularNorm> norms = norm_pool(c.nm);
  for (const SingularNorm& nm : norms) {
    std::mt19937_64 rng(c.opt.seed);
    const int n = nm.dimension();
    double worst = 0.0;
    int checked = 0, skipped = 0;
    while (checked < 1000) {
      const auto nu = EuclideanUnitNormal::from_unit(random_unit(rng, n));
      const auto v1 = Direction::normalize(nm, random_unit(rng, n));
      const auto w = Direction::normalize(nm, random_unit(rng, n));
      if (nu.vector().dot(v1.vector()) <= 0.05 || nu.vector().dot(w.vector()) <= 0.05) continue;
      try {
        worst = std::max(worst, cosine_identity_residual(nm, nu, v1, w));
        ++checked;
      } catch (const ConditioningError&) {
        ++skipped;
      }
    }
    out.check(worst <= c.tol(1e-9), nm.name() + ": max residual " + num(worst) + " over 1000 pairs (" +
                                        std::to_string(skipped) + " ill-conditioned skipped)");
  }
}

// 7 -----------------------------------------------------------------------
void ball_minimum(const Context& c, Outcome& out) {
  std::vector<Horofunction> fs;
  if (c.reference) {
    fs = {reference_beta0(c),        parabola_limit(c, -1, "phi+"),  parabola_limit(c, 1, "phi-"),
          paper_beta0_shifted(1.0),  paper_beta0_shifted(-2.0)};
  } else {
    out.note("reference horofunctions not applicable; using Busemann functions of seeded directions");
    std::mt19937_64 rng(c.opt.seed);
    for (int i = 0; i < 3; ++i)
      fs.push_back(busemann_function(c.nm, Ray{Point::Zero(c.nm.dimension()),
                                                Direction::normalize(c.nm, random_unit(rng, c.nm.dimension()))},
                                     c.grid, c.opt.schedule)
                       .with_id("busemann-" + std::to_string(i)));
  }
  for (const Horofunction& f : fs) {
    double worst = 0.0;
    bool unique = true;
    for (double t : {1.0, 2.0, 5.0, 10.0}) {
      const auto m = minimize_on_sphere([&](const Point& y) { return f(y); }, c.nm, f.base(), t);
      worst = std::max(worst, std::abs(m.value + t));
      unique = unique && m.unique;
    }
    out.check(worst <= c.tol(1e-6) && unique,
              f.id() + ": max |min + t| = " + num(worst) + (unique ? ", unique minimizers" : ", minimizer not unique"));
  }
}

// 8 -----------------------------------------------------------------------
void busemann_convexity(const Context& c, Outcome& out) {
  const std::vector<SingularNorm> norms = norm_pool(c.nm);
  const auto pairs_violation = [&](const SingularNorm& nm, int pairs) {
    std::mt19937_64 rng(c.opt.seed);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    const int n = nm.dimension();
    const auto rv = [&] {
      Vector v(n);
      for (int i = 0; i < n; ++i) v(i) = u(rng);
      return v;
    };
    double worst = 0.0;
    for (int s = 0; s < pairs; ++s) {
      const Point a = rv();
      const Point b1 = rv(), b2 = rv();
      const auto rep = busemann_convexity_report(nm, a, b1, a, b2, 5);
      worst = std::max({worst, rep.max_busemann_violation, rep.max_convexity_violation, rep.max_detour_gain});
    }
    return worst;
  };
  for (const SingularNorm& nm : norms) {
    const double w = pairs_violation(nm, 1000);
    out.check(w <= c.tol(1e-9), nm.name() + ": max violation " + num(w) + " over 1000 shared-origin pairs");
  }
  const auto concave = SingularNorm::custom("(sqrt(abs(x1)) + sqrt(abs(x2)))^2", 2);
  const double w = pairs_violation(concave, 200);
  out.check(w > 1e-9, "concave gauge rejected: max violation " + num(w));
}

// 9 -----------------------------------------------------------------------
struct Frame {
  std::vector<Vector> axes;  // orthonormal
};

Frame random_frame(std::mt19937_64& rng, int n) {
  Frame f;
  while (static_cast<int>(f.axes.size()) < n) {
    Vector v = random_unit(rng, n);
    for (const auto& a : f.axes) v -= v.dot(a) * a;
    if (v.norm() > 1e-3) f.axes.push_back(v.normalized());
  }
  return f;
}

// Sum over (axis, terms) in ambient coordinates.
FlagDirectedSequence frame_sequence(const std::string& id, const std::vector<std::pair<Vector, GrowthTerm>>& parts,
                                    int n) {
  std::vector<std::vector<GrowthTerm>> coords(n);
  for (const auto& [axis, term] : parts)
    for (int i = 0; i < n; ++i)
      if (axis(i) != 0.0) coords[i].push_back(GrowthTerm{term.coefficient * axis(i), term.power, term.rate});
  std::vector<IndexFunction> fs;
  for (auto& c : coords) fs.emplace_back(std::move(c));
  return FlagDirectedSequence::from_coordinates(id, Point::Zero(n), fs);
}

void flag_equivalences(const Context& c, Outcome& out) {
  const int n = c.nm.dimension();
  std::mt19937_64 rng(c.opt.seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  int same_ok = 0, shift_ok = 0;
  std::string first_failure;
  for (int i = 0; i < 20; ++i) {
    const Frame f = random_frame(rng, n);
    const int level = 1 + i % 2;
    const double g = 2.0 * u(rng), s = u(rng) < 0 ? -1.0 : 1.0;
    std::vector<std::pair<Vector, GrowthTerm>> base;
    if (level == 1) {
      base = {{f.axes[0], {1.0, 1.0, 0.0}}, {f.axes[1], {g, 0.0, 0.0}}};
    } else {
      base = {{f.axes[0], {1.0, 2.0, 0.0}}, {f.axes[1], {s, 1.0, 0.0}}};
      if (n > 2) base.push_back({f.axes[2], {g, 0.0, 0.0}});
    }
    auto perturbed = base;
    perturbed.push_back({f.axes[0], {u(rng), level == 1 ? 0.5 : 1.0, 0.0}});
    perturbed.push_back({f.axes[std::min(level, n - 1)], {u(rng), -1.0, 0.0}});
    if (level == 2) perturbed.push_back({f.axes[1], {u(rng), 0.5, 0.0}});
    const auto s1 = frame_sequence("s" + std::to_string(i), base, n);
    const auto s2 = frame_sequence("s" + std::to_string(i) + "'", perturbed, n);
    try {
      if (same_horofunction_same_flag_check(c.nm, s1, s2, c.grid, c.tol(1e-4), c.opt.schedule))
        ++same_ok;
      else if (first_failure.empty())
        first_failure = "same-flag pair " + std::to_string(i);
    } catch (const Error& e) {
      if (first_failure.empty()) first_failure = "same-flag pair " + std::to_string(i) + ": " + e.what();
    }
    // Shifts inside the span of the flag directions.
    std::vector<std::vector<IndexFunction>> shifts;
    for (int k = 0; k < 2; ++k) {
      Vector along = u(rng) * 2.0 * f.axes[0];
      if (level == 2) along += u(rng) * 2.0 * f.axes[1];
      const double decay = u(rng);
      const Vector dir = f.axes[0];
      std::vector<IndexFunction> sh;
      for (int j = 0; j < n; ++j)
        sh.emplace_back(std::vector<GrowthTerm>{{along(j), 0.0, 0.0}, {decay * dir(j), -1.0, 0.0}});
      shifts.push_back(std::move(sh));
    }
    try {
      if (rigid_shift_check(c.nm, s1, shifts, c.grid, c.tol(1e-4), c.opt.schedule))
        ++shift_ok;
      else if (first_failure.empty())
        first_failure = "shift battery " + std::to_string(i);
    } catch (const Error& e) {
      if (first_failure.empty()) first_failure = "shift battery " + std::to_string(i) + ": " + e.what();
    }
  }
  out.check(same_ok == 20, std::to_string(same_ok) + "/20 same-flag pairs equivalent");
  out.check(shift_ok == 20, std::to_string(shift_ok) + "/20 rigid-shift batteries equivalent");
  if (!first_failure.empty()) out.note("first failure: " + first_failure);
}

// 10 ----------------------------------------------------------------------
void round_trip(const Context& c, Outcome& out) {
  const int n = c.nm.dimension();
  std::mt19937_64 rng(c.opt.seed);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const Vector d = random_unit(rng, n);
    const auto f = busemann_function(c.nm, Ray{Point::Zero(n), Direction::normalize(c.nm, d)}, c.grid, c.opt.schedule);
    worst = std::max(worst, angle_between(project_coarse_to_weak(c.nm, CoarsePoint{f}).direction.vector(), d));
  }
  out.check(worst <= c.tol(1e-6), "round trip over 100 random directions: max angle " + num(worst));
  if (!c.reference) {
    out.note("corner family not applicable (reference plane norm only)");
    return;
  }
  for (int eps2 : {-1, 1}) {
    std::vector<CoarsePoint> seq;
    for (double s : {0.5, 0.2, 0.1, 0.05, 0.01, 0.001}) seq.push_back({coex_horofunction(-1, eps2, s)});
    const CoarsePoint target{eps2 < 0 ? paper_phi_plus() : paper_phi_minus()};
    const auto rep = projection_continuity_probe(c.nm, seq, target, c.grid);
    const double last = rep.angular_distance.back();
    out.check(rep.converges && last < c.tol(1e-3), std::string("corner family eps2 = ") + (eps2 < 0 ? "-1" : "+1") +
                                                       ": last angle to (1,0) " + num(last));
  }
}

using CriterionFn = void (*)(const Context&, Outcome&);
const CriterionFn kCriteria[kCriterionCount] = {busemann_closed_form, non_busemann,  fiber_structure, regularity_sweep,
                                                theta_lambda,         cosine_identity, ball_minimum,   busemann_convexity,
                                                flag_equivalences,        round_trip};

}  // namespace

CriterionResult run_criterion(int number, const SingularNorm& nm, const VerifyOptions& options) {
  if (number < 1 || number > kCriterionCount) throw ArgumentError("criterion numbers run from 1 to 10");
  const int n = nm.dimension();
  Context ctx{nm, options, norms_agree(nm, paper_norm()),
              n == 2 ? PointGrid::box(2, -5.0, 5.0, options.grid_step) : PointGrid::box(n, -2.0, 2.0, 1.0)};
  CriterionResult r;
  r.number = number;
  r.title = kTitles[number - 1];
  Outcome out;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    kCriteria[number - 1](ctx, out);
  } catch (const Error& e) {
    out.check(false, std::string("error: ") + e.what());
  }
  r.seconds = seconds_since(t0);
  r.status = !out.ok ? CriterionStatus::fail : out.applicable ? CriterionStatus::pass : CriterionStatus::not_applicable;
  for (std::size_t i = 0; i < out.notes.size(); ++i) r.detail += (i ? "; " : "") + out.notes[i];
  return r;
}

VerifyReport run_verification(const SingularNorm& nm, const VerifyOptions& options) {
  VerifyReport rep;
  rep.norm_name = nm.name();
  rep.reference_norm = norms_agree(nm, paper_norm());
  for (int k = 1; k <= kCriterionCount; ++k) rep.criteria.push_back(run_criterion(k, nm, options));
  return rep;
}

}  // namespace mh
