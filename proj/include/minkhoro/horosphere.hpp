#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "minkhoro/horofunction.hpp"

namespace mh {

struct BoundingBox {
  Point lo, hi;
  static BoundingBox cube(int dimension, double lo, double hi);
  int dimension() const { return static_cast<int>(lo.size()); }
};

// Level set {f = level} of a horofunction inside a box, extracted on a
// regular grid with `resolution` cells per axis.
struct HoroballSample {
  std::string horofunction_id;
  double level = 0.0;
  BoundingBox box;
  int resolution = 0;
  // Edge crossings refined by bisection; each satisfies |f(p) - level| <= 1e-6.
  std::vector<Point> points;
  // Per grid node, row-major with the first coordinate fastest: f <= level.
  std::vector<bool> inside;
  // n = 2 only: chained marching-squares segments.
  std::vector<std::vector<Point>> polylines;
  // Non-empty when the sample is empty or points were discarded.
  std::string diagnostic;

  bool empty() const { return points.empty(); }
};

inline constexpr double kLevelTolerance = 1e-6;

HoroballSample horosphere_sample(const SingularNorm& nm, const Horofunction& f, double level, const BoundingBox& box,
                                 int resolution);

// Header x1,...,xn,level; 17 significant digits; '\n' line endings.
void write_csv(std::ostream& out, const HoroballSample& sample);
// Polylines in box coordinates (y axis up). Requires n = 2.
void write_svg(std::ostream& out, const HoroballSample& sample);

// Shared 17-digit formatting for tabular outputs.
std::string format_number(double x);

}  // namespace mh
