#include "minkhoro/norm.hpp"

#include <cmath>

namespace mh {

std::string to_string(NormFamily f) {
  switch (f) {
    case NormFamily::euclidean: return "euclidean";
    case NormFamily::p_norm: return "p-norm";
    case NormFamily::sqrt_quadratic_plus_abs: return "sqrt-quadratic-plus-abs";
    case NormFamily::intersection_of_ellipsoids: return "intersection-of-ellipsoids";
    case NormFamily::custom_formula: return "custom-formula";
    case NormFamily::linear_image: return "linear-image";
  }
  return "unknown";
}

namespace {

void check_dimension(int n) {
  if (n < kMinDimension || n > kMaxDimension)
    throw ArgumentError("dimension " + std::to_string(n) + " outside supported range [2, 4]");
}

}  // namespace

SingularNorm::SingularNorm(int dimension, Gauge g, std::string name, std::vector<Vector> singular_directions)
    : dimension_(dimension), gauge_(std::move(g)), name_(std::move(name)), singular_(std::move(singular_directions)) {
  check_dimension(dimension_);
  for (const Vector& d : singular_)
    if (d.size() != dimension_) throw ArgumentError("singular direction has wrong dimension");
}

NormFamily SingularNorm::family() const { return static_cast<NormFamily>(gauge_.index()); }

SingularNorm SingularNorm::with_name(std::string name) const {
  SingularNorm copy = *this;
  copy.name_ = std::move(name);
  return copy;
}

SingularNorm SingularNorm::with_singular_directions(std::vector<Vector> dirs) const {
  return SingularNorm(dimension_, gauge_, name_, std::move(dirs));
}

SingularNorm SingularNorm::euclidean(int dimension) {
  return SingularNorm(dimension, gauge::Euclidean{}, "euclidean" + std::to_string(dimension));
}

SingularNorm SingularNorm::p_norm(int dimension, double p) {
  if (!(p > 1.0) || !std::isfinite(p)) throw ArgumentError("p-norm requires 1 < p < inf");
  return SingularNorm(dimension, gauge::PNorm{p}, "p-norm");
}

SingularNorm SingularNorm::sqrt_quadratic_plus_abs(const Matrix& quadratic, int abs_index, double weight) {
  const int n = static_cast<int>(quadratic.rows());
  if (quadratic.cols() != n) throw ArgumentError("quadratic form must be square");
  if (!quadratic.isApprox(quadratic.transpose(), 1e-12)) throw ArgumentError("quadratic form must be symmetric");
  Eigen::SelfAdjointEigenSolver<Matrix> es(quadratic);
  if (es.eigenvalues().minCoeff() <= 0.0) throw ArgumentError("quadratic form must be positive definite");
  if (abs_index < 0 || abs_index >= n) throw ArgumentError("abs coordinate index out of range");
  if (!(weight >= 0.0)) throw ArgumentError("abs weight must be nonnegative");
  return SingularNorm(n, gauge::SqrtQuadraticPlusAbs{quadratic, abs_index, weight}, "sqrt-quadratic-plus-abs");
}

SingularNorm SingularNorm::intersection_of_ellipsoids(std::vector<gauge::Ellipsoid> sets) {
  if (sets.empty()) throw ArgumentError("intersection of ellipsoids needs at least one set");
  const int n = static_cast<int>(sets.front().center.size());
  for (const auto& e : sets) {
    if (e.center.size() != n || e.shape.rows() != n || e.shape.cols() != n)
      throw ArgumentError("ellipsoid dimensions disagree");
    Eigen::SelfAdjointEigenSolver<Matrix> es(e.shape);
    if (es.eigenvalues().minCoeff() <= 0.0) throw ArgumentError("ellipsoid shape must be positive definite");
    if (e.center.dot(e.shape * e.center) >= e.radius * e.radius)
      throw ArgumentError("origin must lie inside every ellipsoid");
  }
  return SingularNorm(n, gauge::EllipsoidIntersection{std::move(sets)}, "intersection-of-ellipsoids");
}

SingularNorm SingularNorm::custom(const std::string& formula, int dimension) {
  return SingularNorm(dimension, gauge::Custom{Formula::parse(formula, dimension)}, "custom-formula");
}

SingularNorm SingularNorm::linear_image(const SingularNorm& base, const Matrix& transform) {
  const int n = base.dimension();
  if (transform.rows() != n || transform.cols() != n) throw ArgumentError("transform has wrong shape");
  Eigen::FullPivLU<Matrix> lu(transform);
  if (!lu.isInvertible()) throw ArgumentError("transform must be invertible");
  std::vector<Vector> dirs;
  for (const Vector& d : base.declared_singular_directions()) dirs.push_back(transform * d);
  return SingularNorm(n, gauge::LinearImage{std::make_shared<const SingularNorm>(base), lu.inverse()},
                      "linear-image(" + base.name() + ")", std::move(dirs));
}

bool SingularNorm::stable_increment() const {
  return std::visit(
      [](const auto& g) {
        using G = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<G, gauge::LinearImage>) {
          return g.base->stable_increment();
        } else {
          return !std::is_same_v<G, gauge::PNorm> && !std::is_same_v<G, gauge::Custom>;
        }
      },
      gauge_);
}

SingularNorm paper_norm() {
  Matrix q(2, 2);
  q << 1, 0, 0, 2;
  return SingularNorm::sqrt_quadratic_plus_abs(q, 1, 1.0)
      .with_name("paper")
      .with_singular_directions({Vector::Unit(2, 0), -Vector::Unit(2, 0)});
}

SingularNorm two_disk_norm() {
  const double r = std::sqrt(2.0);
  std::vector<gauge::Ellipsoid> sets = {
      {Vector::Unit(2, 1), Matrix::Identity(2, 2), r},
      {-Vector::Unit(2, 1), Matrix::Identity(2, 2), r},
  };
  return SingularNorm::intersection_of_ellipsoids(std::move(sets))
      .with_name("two-disk")
      .with_singular_directions({Vector::Unit(2, 0), -Vector::Unit(2, 0)});
}

std::vector<std::string> builtin_norm_names() {
  return {"euclidean", "p4", "paper", "two-disk", "euclidean3", "singular3"};
}

SingularNorm builtin_norm(const std::string& name) {
  if (name == "euclidean") return SingularNorm::euclidean(2).with_name("euclidean");
  if (name == "p4") return SingularNorm::p_norm(2, 4.0).with_name("p4");
  if (name == "paper") return paper_norm();
  if (name == "two-disk") return two_disk_norm();
  if (name == "euclidean3") return SingularNorm::euclidean(3).with_name("euclidean3");
  if (name == "singular3") {
    Matrix q = Matrix::Identity(3, 3);
    q(1, 1) = 2.0;
    return SingularNorm::sqrt_quadratic_plus_abs(q, 1, 1.0).with_name("singular3");
  }
  throw ArgumentError("unknown built-in norm '" + name + "'");
}

}  // namespace mh
