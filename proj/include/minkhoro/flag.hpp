#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "minkhoro/horofunction.hpp"

namespace mh {

// c * k^power * exp(rate * k)
struct GrowthTerm {
  double coefficient = 0.0;
  double power = 0.0;
  double rate = 0.0;
};

// Growth order of a term; larger orders dominate as k -> inf.
using GrowthOrder = std::pair<double, double>;  // (rate, power)
inline GrowthOrder order_of(const GrowthTerm& t) { return {t.rate, t.power}; }
inline bool diverges(const GrowthOrder& o) { return o.first > 0.0 || (o.first == 0.0 && o.second > 0.0); }

// A scalar function of the index k given by a sum of growth terms, parsed
// from descriptors such as "3", "-2*k^2", "k^2 + 5", "0.5*exp(0.1*k)",
// "3 + 1/k", "k^2 + k^0.5 - 1/k". Terms of equal order are merged.
class IndexFunction {
 public:
  IndexFunction() = default;
  explicit IndexFunction(std::vector<GrowthTerm> terms);
  static IndexFunction constant(double c);
  // Throws ArgumentError naming the 1-based column of the offending token.
  static IndexFunction parse(const std::string& text);

  long double operator()(long double k) const;
  const std::vector<GrowthTerm>& terms() const { return terms_; }
  std::string to_string() const;

  // Finite limit as k -> inf, or nothing when a diverging term is present.
  std::optional<double> limit() const;
  bool divergent() const { return !limit().has_value(); }

  IndexFunction operator+(const IndexFunction& o) const;
  IndexFunction operator*(double s) const;

 private:
  std::vector<GrowthTerm> terms_;  // sorted by decreasing order, nonzero coefficients
};

// Base point plus nested half-plane directions u_1, ..., u_p: u_1 spans the
// ray, u_i is the inward direction of the i-th half-plane.
struct Flag {
  Point base;
  std::vector<Vector> directions;

  // Checks 1 <= p <= n and linear independence (Gram determinant of the
  // normalized directions above 1e-10).
  static Flag make(Point base, std::vector<Vector> directions);
  int level() const { return static_cast<int>(directions.size()); }
  // Gram-Schmidt of the directions: the half-plane data without the choice
  // of representatives.
  std::vector<Vector> orthonormal() const;
};

// Same base within 1e-9 and same half-planes within the angular tolerance.
bool same_flag(const Flag& a, const Flag& b, double angular_tol = 1e-9);

struct AsymptoticPlane {
  Point through;
  std::vector<Vector> span;
};

// Same span and through-points agreeing modulo the span within `tol`.
bool same_plane(const AsymptoticPlane& a, const AsymptoticPlane& b, double tol = 1e-6);

// x(k) = x0' + sum_i f_i(k) u_i + sum_j g_j(k) w_j in the frame adapted to
// its flag: u_i orthonormal flag directions, w_j an orthonormal complement.
class FlagDirectedSequence {
 public:
  // Coordinates in the ambient basis. The flag, frame and asymptotic plane
  // are inferred from the growth orders; `base` is the marked point x0.
  static FlagDirectedSequence from_coordinates(std::string id, Point base, std::vector<IndexFunction> coordinates);
  // Canonical form with explicit (not necessarily orthonormal) flag
  // directions and complementary offset directions.
  static FlagDirectedSequence canonical(std::string id, const Point& origin, const std::vector<Vector>& flag_directions,
                                        const std::vector<IndexFunction>& growth,
                                        const std::vector<Vector>& offset_directions,
                                        const std::vector<IndexFunction>& offsets, Point base);

  const std::string& id() const { return id_; }
  int dimension() const { return static_cast<int>(coordinates_.size()); }
  const Point& base() const { return base_; }
  const std::vector<IndexFunction>& coordinates() const { return coordinates_; }

  // Level 0 means bounded (no diverging coordinate): not flag-directed.
  int level() const { return static_cast<int>(flag_directions_.size()); }
  bool bounded() const { return flag_directions_.empty(); }
  // Throws PreconditionError for bounded sequences.
  Flag flag() const;
  AsymptoticPlane plane() const;
  // Frame coordinates: f_i = <u_i, x - x0>, g_j = <w_j, x - x0>.
  const std::vector<IndexFunction>& growth() const { return growth_; }
  const std::vector<IndexFunction>& offsets() const { return offsets_; }
  const std::vector<Vector>& offset_directions() const { return offset_directions_; }

  LVector at(long double k) const;
  PointSequence as_point_sequence() const;
  // Componentwise sum with a shift sequence of the same dimension.
  FlagDirectedSequence shifted(const std::vector<IndexFunction>& shift, std::string id) const;
  FlagDirectedSequence rebased(Point base) const;

 private:
  void infer();

  std::string id_;
  Point base_;
  std::vector<IndexFunction> coordinates_;
  std::vector<Vector> flag_directions_;    // orthonormal
  std::vector<Vector> offset_directions_;  // orthonormal complement
  std::vector<IndexFunction> growth_, offsets_;
};

struct LevelCheck {
  int level = 0;
  Vector expected;           // Euclidean unit direction expected at this level
  Vector observed;           // direction of the projected terms at the largest sample
  double angular_error = 0;  // angle(observed, expected)
  double ratio = 0;          // |x0 x_{i,k}| / |x_{i,k} x_k| at the largest sample
  bool ratio_decreasing = false;
  bool passed = false;
};

struct ValidationReport {
  std::string sequence_id;
  bool valid = false;
  bool bounded = false;
  int level = 0;
  std::vector<LevelCheck> levels;
  bool offsets_converge = false;
  double offset_increment = 0;  // last change of the extrapolated transversal limit
  Point plane_through;          // numeric estimate
  std::vector<std::string> findings;
};

struct ValidationOptions {
  int samples = 40;  // escape radii 2^j (1 + ||x(1) - x0||), j < samples
  double angular_tol = 1e-2;
  double ratio_tol = 1e-2;
  double offset_tol = 1e-6;
  // Projections run along the flag onto the Euclidean complement, or onto a
  // random transversal drawn from this seed.
  std::optional<std::uint64_t> transversal_seed;
};

// Sampled check of the defining limits (failures are reported, not thrown).
ValidationReport validate_flag_directed(const SingularNorm& nm, const FlagDirectedSequence& seq,
                                        const ValidationOptions& options = {});

// The limiting horofunction with the flag attached. Bounded sequences raise
// LimitError "not flag-directed: bounded"; other validation failures raise
// PreconditionError.
Horofunction project_to_horofunction(const SingularNorm& nm, const FlagDirectedSequence& seq, const PointGrid& probe,
                                     const LimitSchedule& schedule = {});

// Requires equal flags and asymptotic planes (PreconditionError otherwise).
bool same_horofunction_same_flag_check(const SingularNorm& nm, const FlagDirectedSequence& s1,
                                       const FlagDirectedSequence& s2, const PointGrid& grid, double tol = 1e-4,
                                       const LimitSchedule& schedule = {});

// Every shift must lie in the span of the flag directions (residual below
// 1e-10, otherwise PreconditionError). True iff each shifted sequence has
// the horofunction of s1 up to a constant on the grid.
bool rigid_shift_check(const SingularNorm& nm, const FlagDirectedSequence& s1,
                       const std::vector<std::vector<IndexFunction>>& shifts, const PointGrid& grid, double tol = 1e-4,
                       const LimitSchedule& schedule = {});

struct FlagEstimate {
  enum class Verdict { flag_directed, converging };
  Verdict verdict = Verdict::converging;
  std::optional<Flag> flag;
  int level = 0;
  std::optional<AsymptoticPlane> plane;
  std::optional<Point> limit_point;  // converging prefixes
};
const char* to_string(FlagEstimate::Verdict v);

// Best-effort flag of a finite prefix: the level-i direction is the
// extrapolated limit of the normalized transversal projections, using the
// samples at N/4, N/2 and N. Requires at least 32 points.
FlagEstimate estimate_directing_flag(const SingularNorm& nm, const std::vector<Point>& prefix, const Point& base);

}  // namespace mh
