#include "minkhoro/sphere.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "minkhoro/optimize.hpp"

namespace mh {

namespace {

double halton(int index, int base) {
  double f = 1.0, r = 0.0;
  for (int i = index; i > 0; i /= base) {
    f /= base;
    r += f * (i % base);
  }
  return r;
}

Point sphere_point(const SingularNorm& nm, const Point& center, double radius, const Vector& dir) {
  return center + radius * (dir / nm.evaluate(dir));
}

// Orthonormal basis of the Euclidean complement of the unit vector u.
Matrix tangent_basis(const Vector& u) {
  const Eigen::Index n = u.size();
  Matrix q = Matrix::Identity(n, n);
  q.col(0) = u;
  Eigen::HouseholderQR<Matrix> qr(q);
  Matrix full = qr.householderQ();
  return full.rightCols(n - 1);
}

std::vector<SphereCandidate> local_minima_2d(const std::function<double(const Point&)>& f, const SingularNorm& nm,
                                             const Point& center, double radius, int m) {
  const double step = 2.0 * std::numbers::pi / m;
  std::vector<double> values(m);
  for (int i = 0; i < m; ++i) values[i] = f(center + radius * unit_sphere_point(nm, step * i));

  std::vector<int> minima;
  for (int i = 0; i < m; ++i) {
    const double prev = values[(i + m - 1) % m];
    const double next = values[(i + 1) % m];
    // Strict on one side so that plateaus contribute a single index.
    if (values[i] < prev && values[i] <= next) minima.push_back(i);
  }
  if (minima.empty()) minima.push_back(static_cast<int>(std::min_element(values.begin(), values.end()) - values.begin()));
  std::sort(minima.begin(), minima.end(), [&](int a, int b) { return values[a] < values[b]; });
  if (minima.size() > 16) minima.resize(16);

  std::vector<SphereCandidate> out;
  for (int i : minima) {
    auto g = [&](double phi) { return f(center + radius * unit_sphere_point(nm, phi)); };
    auto r = golden_section_minimize<double>(g, step * (i - 1), step * (i + 1), 1e-13);
    SphereCandidate c{center + radius * unit_sphere_point(nm, r.argmin), r.value};
    if (values[i] < c.value) c = {center + radius * unit_sphere_point(nm, step * i), values[i]};
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace

std::vector<Vector> direction_samples(int dimension, int count) {
  if (dimension < kMinDimension || dimension > kMaxDimension) throw ArgumentError("direction_samples: dimension must be 2..4");
  if (count < 1) throw ArgumentError("direction_samples: count must be positive");
  std::vector<Vector> out;
  out.reserve(count);
  const double pi = std::numbers::pi;
  for (int i = 0; i < count; ++i) {
    Vector d(dimension);
    if (dimension == 2) {
      const double a = 2.0 * pi * i / count;
      d << std::cos(a), std::sin(a);
    } else if (dimension == 3) {
      const double golden = pi * (3.0 - std::sqrt(5.0));
      const double z = 1.0 - 2.0 * (i + 0.5) / count;
      const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
      d << r * std::cos(golden * i), r * std::sin(golden * i), z;
    } else {
      const double u1 = halton(i + 1, 2), u2 = halton(i + 1, 3), u3 = halton(i + 1, 5);
      const double a = std::sqrt(1.0 - u1), b = std::sqrt(u1);
      d << a * std::sin(2 * pi * u2), a * std::cos(2 * pi * u2), b * std::sin(2 * pi * u3), b * std::cos(2 * pi * u3);
    }
    out.push_back(d.normalized());
  }
  return out;
}

SphereCandidate refine_on_sphere(const std::function<double(const Point&)>& f, const SingularNorm& nm,
                                 const Point& center, double radius, const Vector& start) {
  Vector u = start.normalized();
  double best = f(sphere_point(nm, center, radius, u));
  double step = 0.05;
  Vector last_move = Vector::Zero(u.size());
  while (step > 1e-11) {
    bool improved = false;
    Matrix basis = tangent_basis(u);
    std::vector<Vector> dirs;
    for (Eigen::Index j = 0; j < basis.cols(); ++j) dirs.push_back(basis.col(j));
    if (last_move.norm() > 0) dirs.push_back(last_move.normalized());
    for (const Vector& d : dirs) {
      for (double sign : {1.0, -1.0}) {
        Vector cand = (u + sign * step * d).normalized();
        const double val = f(sphere_point(nm, center, radius, cand));
        if (val < best) {
          last_move = cand - u;
          u = cand;
          best = val;
          improved = true;
          break;
        }
      }
    }
    if (!improved) step *= 0.5;
  }
  return {sphere_point(nm, center, radius, u), best};
}

SphereMinimum minimize_on_sphere(const std::function<double(const Point&)>& f, const SingularNorm& nm,
                                 const Point& center, double radius, const SphereMinimumOptions& options) {
  require_dimension(nm, center, "minimize_on_sphere");
  if (!(radius > 0.0) || !std::isfinite(radius)) throw ArgumentError("minimize_on_sphere: radius must be positive");
  const int n = nm.dimension();
  std::vector<SphereCandidate> cands;
  if (n == 2) {
    cands = local_minima_2d(f, nm, center, radius, options.directions);
  } else {
    auto dirs = direction_samples(n, options.directions);
    std::vector<std::pair<double, int>> vals;
    vals.reserve(dirs.size());
    for (int i = 0; i < static_cast<int>(dirs.size()); ++i)
      vals.emplace_back(f(sphere_point(nm, center, radius, dirs[i])), i);
    std::sort(vals.begin(), vals.end());
    std::vector<int> starts;
    for (const auto& [v, i] : vals) {
      bool separated = true;
      for (int s : starts) separated = separated && angle_between(dirs[s], dirs[i]) > 0.25;
      if (separated) starts.push_back(i);
      if (starts.size() >= 6) break;
    }
    for (int s : starts) cands.push_back(refine_on_sphere(f, nm, center, radius, dirs[s]));
  }
  std::sort(cands.begin(), cands.end(), [](const auto& a, const auto& b) { return a.value < b.value; });

  SphereMinimum out;
  out.point = cands.front().point;
  out.value = cands.front().value;
  out.second_value = std::numeric_limits<double>::infinity();
  out.second_point = out.point;
  for (std::size_t i = 1; i < cands.size(); ++i) {
    if ((cands[i].point - out.point).norm() <= options.uniqueness_distance * radius) continue;
    out.second_value = cands[i].value;
    out.second_point = cands[i].point;
    break;
  }
  out.unique = !(out.second_value - out.value <= options.uniqueness_margin);
  out.local_minima = std::move(cands);
  return out;
}

}  // namespace mh
