#pragma once

#include <optional>
#include <string>
#include <vector>

#include "minkhoro/gauss_map.hpp"
#include "minkhoro/horofunction.hpp"
#include "minkhoro/sphere.hpp"

namespace mh {

// A point of the weak boundary: the class of all rays with this direction.
struct WeakPoint {
  Direction direction;
};

// A point of the coarse boundary, represented by a normalized horofunction.
struct CoarsePoint {
  Horofunction representative;
  const std::string& id() const { return representative.id(); }
};

WeakPoint weak_point_of_ray(const Ray& r);

struct ProjectionOptions {
  std::vector<double> radii{1.0, 2.0, 5.0, 10.0};
  double min_tolerance = 1e-6;     // |min over S(x0, t) + t|
  double drift_tolerance = 1e-4;   // angle between the last two minimizers
  SphereMinimumOptions sphere{};
  // Replace a direction within 1e-6 rad of a singular direction by it.
  bool snap_to_singular = true;
};

struct ProjectionResult {
  WeakPoint point;
  Vector raw_direction;                 // Euclidean unit, before snapping
  std::vector<SphereMinimum> minima;    // one per radius
  double max_min_deviation = 0.0;       // max_t |min + t|
  double drift = 0.0;                   // radians
};

// Minimizes phi over the spheres S(x0, t) and returns the direction of the
// minimizer at the largest radius. Throws GeometryError when a minimum is
// not -t, a minimizer is not unique, or the minimizers drift between the two
// largest radii.
ProjectionResult project_coarse_to_weak_detailed(const SingularNorm& nm, const CoarsePoint& phi,
                                                 const ProjectionOptions& options = {});
WeakPoint project_coarse_to_weak(const SingularNorm& nm, const CoarsePoint& phi,
                                 const std::vector<double>& radii = {1.0, 2.0, 5.0, 10.0});

struct FiberEntry {
  std::string id;
  std::optional<Vector> projection;  // nothing when the projection failed
  bool included = false;
  int class_id = -1;                 // equivalence class among included entries
  BusemannVerdict verdict;
  std::string note;
};

struct FiberReport {
  Vector xi;
  std::vector<FiberEntry> entries;
  int classes = 0;
  // Smallest difference spread between representatives of distinct classes.
  double min_class_separation = 0.0;
};

// Groups the candidates projecting to xi (angular 1e-6) into classes of
// equivalence up to constants and triages each one for Busemann-ness.
FiberReport explore_fiber(const SingularNorm& nm, const WeakPoint& xi, const std::vector<CoarsePoint>& candidates,
                          const PointGrid& grid, double tol = 1e-6, double busemann_tol = 1e-4);

struct ContinuityReport {
  std::vector<double> sup_distance;       // max over the grid of |phi_k - phi|
  std::vector<double> angular_distance;   // angle(Pr(phi_k), Pr(phi))
  bool converges = false;                 // tail non-increasing and last below 1e-3
};

ContinuityReport projection_continuity_probe(const SingularNorm& nm, const std::vector<CoarsePoint>& phi_seq,
                                             const CoarsePoint& phi, const PointGrid& grid);

struct RegularityReport {
  bool regular = true;
  int sampled = 0;
  std::vector<Direction> singular;   // clustered, one representative per cluster
  std::vector<double> widths;        // Gauss image widths of the representatives
};

// Sweeps directions, classifies each, and searches between neighbouring
// samples whose normals jump for kinks the sweep stepped over.
RegularityReport classify_space_regularity(const SingularNorm& nm, int angular_resolution = 3600);

}  // namespace mh
