#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "minkhoro/metric.hpp"
#include "minkhoro/schedule.hpp"

namespace mh {

struct PointGrid {
  std::vector<Point> points;
  // Extent of a box grid; step == 0 for arbitrary point lists.
  double lo = 0.0, hi = 0.0, step = 0.0;

  // All points of lo + i * step inside [lo, hi]^n.
  static PointGrid box(int dimension, double lo, double hi, double step);
  // [-5, 5]^n at step 0.5.
  static PointGrid default_grid(int dimension) { return box(dimension, -5.0, 5.0, 0.5); }
  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
};

// Generator form x(k) for real k >= 1; `base` is the marked point x0 of the
// distance functions d_x(y) = |y x| - |x0 x|.
struct PointSequence {
  std::string id;
  Point base;
  std::function<LVector(long double)> at;
  int dimension() const { return static_cast<int>(base.size()); }
};

// Indices k_j, j < steps, with ||x(k_j) - x0|| = 2^j (1 + ||x(1) - x0||),
// found by doubling and bisection. Throws LimitError with the message
// "not flag-directed: bounded ..." when the sequence never gets that far.
std::vector<long double> escape_indices(const SingularNorm& nm, const PointSequence& seq, int steps);

enum class Provenance { busemann_of_ray, limit_of_sequence, closed_form };
const char* to_string(Provenance p);

struct FlagMetadata {
  int level = 0;
  std::vector<Vector> directions;
  Point plane_through;
  bool level_minimality_verified = false;  // no certification procedure exists
};

// A real function on the affine space normalized to vanish at its base point.
class Horofunction {
 public:
  using Evaluator = std::function<double(const Point&)>;

  static Horofunction closed_form(std::string id, Point base, Evaluator raw);
  static Horofunction of_ray(std::string id, Ray ray, Point base, Evaluator raw, int depth);
  static Horofunction of_sequence(std::string id, Point base, Evaluator raw, int depth);

  double operator()(const Point& y) const {
    if (y == base_) return 0.0;
    return (*raw_)(y) - offset_;
  }
  double raw(const Point& y) const { return (*raw_)(y); }

  const Point& base() const { return base_; }
  int dimension() const { return static_cast<int>(base_.size()); }
  Provenance provenance() const { return provenance_; }
  const std::string& id() const { return id_; }
  const std::optional<Ray>& ray() const { return ray_; }
  const std::optional<FlagMetadata>& flag() const { return flag_; }
  // Schedule depth the evaluator was frozen at (0 for closed forms).
  int depth() const { return depth_; }

  Horofunction with_flag(FlagMetadata flag) const;
  Horofunction with_id(std::string id) const;
  // Same function up to a constant, normalized at a new base point.
  Horofunction rebased(const Point& new_base) const;

 private:
  Horofunction(std::string id, Provenance p, Point base, std::shared_ptr<const Evaluator> raw)
      : id_(std::move(id)), provenance_(p), base_(std::move(base)), raw_(std::move(raw)) {
    offset_ = (*raw_)(base_);
  }

  std::string id_;
  Provenance provenance_;
  Point base_;
  std::shared_ptr<const Evaluator> raw_;
  double offset_ = 0.0;
  std::optional<Ray> ray_;
  std::optional<FlagMetadata> flag_;
  int depth_ = 0;
};

// lim ||y - c(t)|| - t along t = 2^j, minus the same limit at the ray origin
// (which is 0). Throws LimitError when the schedule does not converge and
// GeometryError when the raw values increase (the norm is not a norm).
double busemann_eval(const SingularNorm& nm, const Ray& r, const Point& y, const LimitSchedule& schedule = {});

// Busemann function of a ray, normalized at the ray origin. The schedule is
// certified on the probe grid and then frozen (certified depth + 4).
Horofunction busemann_function(const SingularNorm& nm, const Ray& r, const PointGrid& probe,
                               const LimitSchedule& schedule = {});

// Pointwise limit of the distance functions of an escaping sequence. The
// schedule picks indices k_j with ||x(k_j) - x0|| = 2^j (1 + ||x(1) - x0||).
// Throws LimitError for bounded sequences ("not flag-directed: bounded") and
// when some probe point does not converge.
Horofunction horofunction_limit(const SingularNorm& nm, const PointSequence& seq, const PointGrid& probe,
                                const LimitSchedule& schedule = {});

// max - min of f - g over the grid.
double difference_spread(const Horofunction& f, const Horofunction& g, const PointGrid& grid);
bool equivalent_up_to_constant(const Horofunction& f, const Horofunction& g, const PointGrid& grid,
                               double tol = 1e-6);

// Largest sampled |f(x) - f(y)| - d(x, y) over pairs in [-r, r]^n.
double lipschitz_excess(const SingularNorm& nm, const Horofunction& f, int pairs, std::uint64_t seed,
                        double half_width = 5.0);

// Closed forms --------------------------------------------------------------

// y -> <covector, y - base>.
Horofunction linear_horofunction(std::string id, const Vector& covector, const Point& base);
// Euclidean Busemann function of the unit direction u: y -> -<u, y - base>.
Horofunction euclidean_busemann(const Vector& u, const Point& base);

// For the singular plane norm sqrt(y1^2 + 2 y2^2) + |y2|:
Horofunction paper_beta0();                 // |y2| - y1, base (0, 0)
Horofunction paper_beta0_shifted(double a); // |y2 - a| - y1, base (0, a)
Horofunction paper_phi_plus();              // y2 - y1
Horofunction paper_phi_minus();             // -y2 - y1

// The linear horofunctions eps1 (lambda y1 + (mu + eps2) y2) with
// mu = eps2 sigma and lambda = sqrt(1 - sigma^2 / 2), sigma in (0, sqrt 2]:
// Busemann functions of the smooth directions next to the corners. As
// sigma -> 0 they tend to eps1 (y1 + eps2 y2).
Vector coex_covector(int eps1, int eps2, double sigma);
Horofunction coex_horofunction(int eps1, int eps2, double sigma);

// Busemann test -------------------------------------------------------------

struct BusemannVerdict {
  enum class Kind { busemann, not_busemann, inconclusive };
  Kind kind = Kind::inconclusive;
  std::optional<Ray> ray;
  double mismatch = 0.0;  // spread of f - beta for the best candidate ray
  std::string note;
};
const char* to_string(BusemannVerdict::Kind k);

struct BusemannTestOptions {
  std::optional<PointGrid> probe;  // default grid when empty
  std::vector<double> radii{1.0, 2.0, 5.0, 10.0};
  LimitSchedule schedule{};
  bool scan_transversal = true;
};

// Builds the minimal ray of f (unique sphere minimizers from the base), and
// compares its Busemann function with f on the probe grid. If that fails,
// rays with the same direction and origins on the probe hyperplane through
// the base transversal to the ray are tried. Throws GeometryError when a
// sphere minimizer is not unique.
BusemannVerdict is_busemann_function(const SingularNorm& nm, const Horofunction& f, double tol = 1e-4,
                                     const BusemannTestOptions& options = {});

}  // namespace mh
