#include "minkhoro/horosphere.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <optional>
#include <ostream>

#include "minkhoro/parallel.hpp"

namespace mh {

BoundingBox BoundingBox::cube(int dimension, double lo, double hi) {
  return {Point::Constant(dimension, lo), Point::Constant(dimension, hi)};
}

std::string format_number(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace {

// Regular grid with (res + 1)^n nodes, first coordinate fastest.
struct NodeGrid {
  const BoundingBox& box;
  int n, res;

  std::size_t count() const {
    std::size_t c = 1;
    for (int i = 0; i < n; ++i) c *= static_cast<std::size_t>(res + 1);
    return c;
  }
  std::size_t stride(int axis) const {
    std::size_t s = 1;
    for (int i = 0; i < axis; ++i) s *= static_cast<std::size_t>(res + 1);
    return s;
  }
  int coordinate(std::size_t node, int axis) const {
    return static_cast<int>((node / stride(axis)) % static_cast<std::size_t>(res + 1));
  }
  Point point(std::size_t node) const {
    Point p(n);
    for (int a = 0; a < n; ++a) {
      const int i = coordinate(node, a);
      p(a) = i == res ? box.hi(a) : box.lo(a) + (box.hi(a) - box.lo(a)) * i / res;
    }
    return p;
  }
};

// A crossing is identified by the node it sits on or by the grid edge
// (lower node, axis) it splits.
using CrossingKey = std::pair<std::size_t, int>;  // axis -1 marks a node

struct Extractor {
  const Horofunction& f;
  double level;
  const NodeGrid& grid;
  const std::vector<double>& values;
  std::map<CrossingKey, Point> crossings;
  std::map<CrossingKey, std::optional<CrossingKey>> visited;
  std::size_t rejected = 0;

  bool inside(std::size_t node) const { return values[node] <= level; }

  // Crossing on the edge from `node` along `axis`, or nothing.
  std::optional<CrossingKey> edge(std::size_t node, int axis) {
    const auto seen = visited.find({node, axis});
    if (seen != visited.end()) return seen->second;
    return visited[{node, axis}] = locate(node, axis);
  }

  std::optional<CrossingKey> locate(std::size_t node, int axis) {
    const std::size_t other = node + grid.stride(axis);
    if (inside(node) == inside(other)) return std::nullopt;
    const std::size_t in = inside(node) ? node : other;
    if (values[in] == level) return add({in, -1}, grid.point(in));
    Point a = grid.point(in), b = grid.point(in == node ? other : node);
    for (int it = 0; it < 80; ++it) {
      const Point m = 0.5 * (a + b);
      if (m == a || m == b) break;
      (f(m) <= level ? a : b) = m;
    }
    const Point p = std::abs(f(a) - level) <= std::abs(f(b) - level) ? a : b;
    return add({node, axis}, p);
  }

  std::optional<CrossingKey> add(CrossingKey key, const Point& p) {
    if (std::abs(f(p) - level) > kLevelTolerance) {
      ++rejected;
      return std::nullopt;
    }
    crossings.emplace(key, p);
    return key;
  }
};

// Joins segments sharing crossing keys into maximal chains.
std::vector<std::vector<Point>> chain(const std::vector<std::pair<CrossingKey, CrossingKey>>& segments,
                                      const std::map<CrossingKey, Point>& crossings) {
  std::map<CrossingKey, std::vector<std::size_t>> incident;
  for (std::size_t s = 0; s < segments.size(); ++s) {
    incident[segments[s].first].push_back(s);
    incident[segments[s].second].push_back(s);
  }
  std::vector<bool> used(segments.size(), false);
  auto walk = [&](CrossingKey from, std::vector<CrossingKey>& keys) {
    for (;;) {
      std::optional<std::size_t> next;
      for (std::size_t s : incident[from])
        if (!used[s]) {
          next = s;
          break;
        }
      if (!next) return;
      used[*next] = true;
      from = segments[*next].first == from ? segments[*next].second : segments[*next].first;
      keys.push_back(from);
    }
  };
  std::vector<std::vector<Point>> lines;
  auto emit = [&](CrossingKey start) {
    std::vector<CrossingKey> keys{start};
    walk(start, keys);
    std::vector<Point> line;
    for (const auto& k : keys) line.push_back(crossings.at(k));
    lines.push_back(std::move(line));
  };
  // Open chains first (endpoints of odd degree), then closed loops.
  for (const auto& [key, segs] : incident)
    if (segs.size() % 2 == 1 && std::any_of(segs.begin(), segs.end(), [&](std::size_t s) { return !used[s]; }))
      emit(key);
  for (std::size_t s = 0; s < segments.size(); ++s)
    if (!used[s]) emit(segments[s].first);
  return lines;
}

}  // namespace

HoroballSample horosphere_sample(const SingularNorm& nm, const Horofunction& f, double level, const BoundingBox& box,
                                 int resolution) {
  const int n = nm.dimension();
  if (resolution < 8) throw ArgumentError("horosphere_sample: resolution must be at least 8");
  if (f.dimension() != n || box.dimension() != n) throw ArgumentError("horosphere_sample: dimension mismatch");
  if (!((box.hi - box.lo).array() > 0.0).all()) throw ArgumentError("horosphere_sample: degenerate box");
  if (!std::isfinite(level)) throw ArgumentError("horosphere_sample: non-finite level");

  const NodeGrid grid{box, n, resolution};
  std::vector<double> values(grid.count());
  parallel_for(values.size(), [&](std::size_t i) { values[i] = f(grid.point(i)); });

  HoroballSample out;
  out.horofunction_id = f.id();
  out.level = level;
  out.box = box;
  out.resolution = resolution;
  out.inside.resize(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) out.inside[i] = values[i] <= level;

  Extractor ex{f, level, grid, values, {}, {}, 0};
  std::vector<std::pair<CrossingKey, CrossingKey>> segments;

  if (n == 2) {
    const std::size_t sy = grid.stride(1);
    for (int j = 0; j < resolution; ++j)
      for (int i = 0; i < resolution; ++i) {
        const std::size_t c = static_cast<std::size_t>(j) * sy + static_cast<std::size_t>(i);
        // Cell edges counterclockwise: bottom, right, top, left.
        std::vector<CrossingKey> hits;
        for (auto e : {ex.edge(c, 0), ex.edge(c + 1, 1), ex.edge(c + sy, 0), ex.edge(c, 1)})
          if (e && std::find(hits.begin(), hits.end(), *e) == hits.end()) hits.push_back(*e);
        if (hits.size() == 2) {
          segments.emplace_back(hits[0], hits[1]);
        } else if (hits.size() == 4) {
          // Saddle: the cell-center value decides which corners connect.
          const Point center = grid.point(c) + 0.5 * (grid.point(c + sy + 1) - grid.point(c));
          const bool center_in = f(center) <= level;
          if (center_in == ex.inside(c)) {
            segments.emplace_back(hits[0], hits[1]);
            segments.emplace_back(hits[2], hits[3]);
          } else {
            segments.emplace_back(hits[1], hits[2]);
            segments.emplace_back(hits[3], hits[0]);
          }
        }
      }
    out.polylines = chain(segments, ex.crossings);
  } else {
    for (std::size_t node = 0; node < values.size(); ++node)
      for (int a = 0; a < n; ++a)
        if (grid.coordinate(node, a) < resolution) ex.edge(node, a);
  }

  for (const auto& [key, p] : ex.crossings) out.points.push_back(p);
  if (out.points.empty())
    out.diagnostic = "level " + format_number(level) + " does not meet the box (values in [" +
                     format_number(*std::min_element(values.begin(), values.end())) + ", " +
                     format_number(*std::max_element(values.begin(), values.end())) + "])";
  if (ex.rejected > 0)
    out.diagnostic += (out.diagnostic.empty() ? "" : "; ") + std::to_string(ex.rejected) +
                      " crossings discarded above the level tolerance";
  return out;
}

void write_csv(std::ostream& out, const HoroballSample& sample) {
  const int n = sample.box.dimension();
  for (int i = 0; i < n; ++i) out << 'x' << (i + 1) << ',';
  out << "level\n";
  for (const auto& p : sample.points) {
    for (int i = 0; i < n; ++i) out << format_number(p(i)) << ',';
    out << format_number(sample.level) << '\n';
  }
}

void write_svg(std::ostream& out, const HoroballSample& sample) {
  if (sample.box.dimension() != 2) throw ArgumentError("write_svg: rendering needs dimension 2");
  const double size = 600.0;
  const Point& lo = sample.box.lo;
  const Point& hi = sample.box.hi;
  auto sx = [&](double x) { return format_number((x - lo(0)) / (hi(0) - lo(0)) * size); };
  auto sy = [&](double y) { return format_number((hi(1) - y) / (hi(1) - lo(1)) * size); };
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"600\" height=\"600\" viewBox=\"0 0 600 600\">\n";
  out << "<title>" << sample.horofunction_id << " level " << format_number(sample.level) << "</title>\n";
  out << "<rect x=\"0\" y=\"0\" width=\"600\" height=\"600\" fill=\"none\" stroke=\"#999\"/>\n";
  for (const auto& line : sample.polylines) {
    out << "<polyline fill=\"none\" stroke=\"#1f4e9c\" stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i < line.size(); ++i) out << (i ? " " : "") << sx(line[i](0)) << ',' << sy(line[i](1));
    out << "\"/>\n";
  }
  out << "</svg>\n";
}

}  // namespace mh
