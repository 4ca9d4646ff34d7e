#pragma once

#include <cmath>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "minkhoro/errors.hpp"
#include "minkhoro/formula.hpp"
#include "minkhoro/types.hpp"

namespace mh {

enum class NormFamily {
  euclidean,
  p_norm,
  sqrt_quadratic_plus_abs,
  intersection_of_ellipsoids,
  custom_formula,
  linear_image,
};

std::string to_string(NormFamily f);

class SingularNorm;

namespace gauge {

template <typename S>
S sign(S x) {
  return x > S(0) ? S(1) : (x < S(0) ? S(-1) : S(0));
}

// sqrt(q(x + h)) - sqrt(q(x)) for the quadratic form q(v) = v^T A v,
// written without the cancellation of the two roots.
inline long double sqrt_quadratic_increment(const LVector& ax, const LVector& x, const LVector& ah, const LVector& h) {
  const long double qx = x.dot(ax);
  const long double qv = qx + 2.0L * h.dot(ax) + h.dot(ah);
  const long double den = std::sqrt(std::max(0.0L, qv)) + std::sqrt(std::max(0.0L, qx));
  if (den == 0.0L) return 0.0L;
  return (2.0L * h.dot(ax) + h.dot(ah)) / den;
}

// |x + h| - |x|, exact when x and x + h share a sign.
inline long double abs_increment(long double x, long double h) {
  const long double v = x + h;
  if ((x > 0 && v >= 0) || (x < 0 && v <= 0)) return x > 0 ? h : -h;
  return std::abs(v) - std::abs(x);
}

struct Euclidean {
  long double increment(const LVector& x, const LVector& h) const { return sqrt_quadratic_increment(x, x, h, h); }

  template <typename Derived>
  typename Derived::Scalar eval(const Eigen::MatrixBase<Derived>& v) const {
    return v.norm();
  }
  template <typename Derived>
  VectorT<typename Derived::Scalar> grad(const Eigen::MatrixBase<Derived>& v) const {
    return v / v.norm();
  }
};

struct PNorm {
  double p = 2.0;

  template <typename Derived>
  typename Derived::Scalar eval(const Eigen::MatrixBase<Derived>& v) const {
    using S = typename Derived::Scalar;
    using std::abs, std::pow;
    // Scale by the max coordinate so |v_i|^p neither overflows nor underflows.
    const S m = v.cwiseAbs().maxCoeff();
    if (m == S(0)) return S(0);
    S sum(0);
    for (Eigen::Index i = 0; i < v.size(); ++i) sum += pow(abs(v(i)) / m, S(p));
    return m * pow(sum, S(1) / S(p));
  }
  template <typename Derived>
  VectorT<typename Derived::Scalar> grad(const Eigen::MatrixBase<Derived>& v) const {
    using S = typename Derived::Scalar;
    using std::abs, std::pow;
    const S n = eval(v);
    VectorT<S> g(v.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) g(i) = sign(v(i)) * pow(abs(v(i)) / n, S(p - 1));
    return g;
  }
};

// sqrt(v^T Q v) + weight * |v_idx|, Q symmetric positive definite.
struct SqrtQuadraticPlusAbs {
  Matrix quadratic;
  int abs_index = 1;  // zero-based
  double weight = 1.0;

  long double increment(const LVector& x, const LVector& h) const {
    const auto q = quadratic.cast<long double>();
    return sqrt_quadratic_increment(q * x, x, q * h, h) +
           static_cast<long double>(weight) * abs_increment(x(abs_index), h(abs_index));
  }

  template <typename Derived>
  typename Derived::Scalar eval(const Eigen::MatrixBase<Derived>& v) const {
    using S = typename Derived::Scalar;
    using std::abs, std::sqrt;
    const VectorT<S> qv = quadratic.cast<S>() * v;
    return sqrt(std::max(S(0), v.dot(qv))) + S(weight) * abs(v(abs_index));
  }
  template <typename Derived>
  VectorT<typename Derived::Scalar> grad(const Eigen::MatrixBase<Derived>& v) const {
    using S = typename Derived::Scalar;
    using std::sqrt;
    const VectorT<S> qv = quadratic.cast<S>() * v;
    VectorT<S> g = qv / sqrt(v.dot(qv));
    g(abs_index) += S(weight) * sign(v(abs_index));
    return g;
  }
};

// Solid {x : (x - c)^T A (x - c) <= r^2} containing the origin in its interior.
struct Ellipsoid {
  Vector center;
  Matrix shape;
  double radius = 1.0;
};

// Gauge of an intersection of ellipsoids: the max of the individual gauges.
struct EllipsoidIntersection {
  std::vector<Ellipsoid> sets;

  // Gauge s of one ellipsoid solves a s^2 + 2 b s - q = 0 with
  // a = r^2 - c^T A c, b = c^T A v, q = v^T A v.
  template <typename Derived>
  static typename Derived::Scalar gauge_of(const Ellipsoid& e, const Eigen::MatrixBase<Derived>& v) {
    using S = typename Derived::Scalar;
    using std::sqrt;
    const Matrix& A = e.shape;
    const VectorT<S> c = e.center.cast<S>();
    const VectorT<S> Av = A.cast<S>() * v;
    const S a = S(e.radius) * S(e.radius) - c.dot(A.cast<S>() * c);
    const S b = c.dot(Av);
    const S q = v.dot(Av);
    const S root = sqrt(b * b + a * q);
    // Stable form of (-b + root) / a.
    if (b <= S(0)) return (root - b) / a;
    return q / (root + b);
  }

  template <typename Derived>
  typename Derived::Scalar eval(const Eigen::MatrixBase<Derived>& v) const {
    using S = typename Derived::Scalar;
    S best(0);
    for (const Ellipsoid& e : sets) best = std::max(best, gauge_of(e, v));
    return best;
  }

  // s(x + h) - s(x) for one ellipsoid gauge: differences of b, q and of the
  // root are formed from h directly.
  static long double gauge_increment(const Ellipsoid& e, const LVector& x, const LVector& h) {
    const auto A = e.shape.cast<long double>();
    const LVector c = e.center.cast<long double>();
    const LVector ac = A * c;
    const long double a = static_cast<long double>(e.radius) * e.radius - c.dot(ac);
    const LVector v = x + h;
    const long double bx = ac.dot(x), bv = ac.dot(v);
    const long double db = ac.dot(h);
    const long double dq = h.dot(A * LVector(2.0L * x + h));
    const long double rx = std::sqrt(bx * bx + a * x.dot(A * x));
    const long double rv = std::sqrt(bv * bv + a * v.dot(A * v));
    if (rx + rv == 0.0L) return 0.0L;
    const long double dr = (db * (bx + bv) + a * dq) / (rx + rv);
    return (dr - db) / a;
  }

  long double increment(const LVector& x, const LVector& h) const {
    const LVector v = x + h;
    std::size_t ix = 0, iv = 0;
    long double gx = -1.0L, gv = -1.0L;
    for (std::size_t i = 0; i < sets.size(); ++i) {
      const long double a = gauge_of(sets[i], x), b = gauge_of(sets[i], v);
      if (a > gx) gx = a, ix = i;
      if (b > gv) gv = b, iv = i;
    }
    const long double same = gauge_increment(sets[iv], x, h);
    if (ix == iv) return same;
    return same + (gauge_of(sets[iv], x) - gx);
  }
  template <typename Derived>
  VectorT<typename Derived::Scalar> grad(const Eigen::MatrixBase<Derived>& v) const {
    using S = typename Derived::Scalar;
    using std::sqrt;
    std::size_t arg = 0;
    S best(-1);
    for (std::size_t i = 0; i < sets.size(); ++i) {
      const S g = gauge_of(sets[i], v);
      if (g > best) {
        best = g;
        arg = i;
      }
    }
    const Ellipsoid& e = sets[arg];
    const VectorT<S> c = e.center.cast<S>();
    const VectorT<S> Ac = e.shape.cast<S>() * c;
    const VectorT<S> Av = e.shape.cast<S>() * v;
    const S a = S(e.radius) * S(e.radius) - c.dot(Ac);
    const S b = c.dot(Av);
    const S root = sqrt(b * b + a * v.dot(Av));
    return (-Ac + (b * Ac + a * Av) / root) / a;
  }
};

struct Custom {
  Formula formula;

  template <typename Derived>
  typename Derived::Scalar eval(const Eigen::MatrixBase<Derived>& v) const {
    return formula.evaluate(v);
  }
  template <typename Derived>
  VectorT<typename Derived::Scalar> grad(const Eigen::MatrixBase<Derived>& v) const {
    using S = typename Derived::Scalar;
    // Central differences in extended precision.
    const LVector x = v.template cast<long double>();
    const long double h = 1e-8L * std::max(1.0L, x.cwiseAbs().maxCoeff());
    VectorT<S> g(v.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      LVector xp = x, xm = x;
      xp(i) += h;
      xm(i) -= h;
      g(i) = S((formula.evaluate(xp) - formula.evaluate(xm)) / (2.0L * h));
    }
    return g;
  }
};

// N_T(x) = N(T^{-1} x): the norm whose unit ball is T applied to the base ball.
struct LinearImage {
  std::shared_ptr<const SingularNorm> base;
  Matrix inverse;

  template <typename Derived>
  typename Derived::Scalar eval(const Eigen::MatrixBase<Derived>& v) const;
  template <typename Derived>
  VectorT<typename Derived::Scalar> grad(const Eigen::MatrixBase<Derived>& v) const;
  long double increment(const LVector& x, const LVector& h) const;
};

}  // namespace gauge

// A symmetric, strictly convex (possibly non-smooth) norm on R^n given by an
// evaluable formula. Immutable after construction.
class SingularNorm {
 public:
  using Gauge = std::variant<gauge::Euclidean, gauge::PNorm, gauge::SqrtQuadraticPlusAbs,
                             gauge::EllipsoidIntersection, gauge::Custom, gauge::LinearImage>;

  SingularNorm(int dimension, Gauge g, std::string name, std::vector<Vector> singular_directions = {});

  static SingularNorm euclidean(int dimension);
  static SingularNorm p_norm(int dimension, double p);
  static SingularNorm sqrt_quadratic_plus_abs(const Matrix& quadratic, int abs_index, double weight = 1.0);
  static SingularNorm intersection_of_ellipsoids(std::vector<gauge::Ellipsoid> sets);
  static SingularNorm custom(const std::string& formula, int dimension);
  static SingularNorm linear_image(const SingularNorm& base, const Matrix& transform);

  int dimension() const { return dimension_; }
  NormFamily family() const;
  const std::string& name() const { return name_; }
  const std::vector<Vector>& declared_singular_directions() const { return singular_; }
  SingularNorm with_name(std::string name) const;
  SingularNorm with_singular_directions(std::vector<Vector> dirs) const;

  // Unchecked evaluation; the checked entry point is mh::norm().
  template <typename Derived>
  typename Derived::Scalar evaluate(const Eigen::MatrixBase<Derived>& v) const {
    return std::visit([&](const auto& g) { return g.eval(v); }, gauge_);
  }
  template <typename Derived>
  typename Derived::Scalar operator()(const Eigen::MatrixBase<Derived>& v) const {
    return evaluate(v);
  }

  // N(x + h) - N(x) in extended precision. Families with an algebraic form
  // avoid the cancellation of two large norms; the rest subtract.
  long double increment(const LVector& x, const LVector& h) const {
    return std::visit(
        [&](const auto& g) -> long double {
          if constexpr (requires { g.increment(x, h); }) {
            return g.increment(x, h);
          } else {
            return g.eval(LVector(x + h)) - g.eval(x);
          }
        },
        gauge_);
  }
  // Whether increment() is free of the cancellation above.
  bool stable_increment() const;

  // Gradient at a point where the norm is differentiable. At kinks the value
  // is one of the one-sided limits; callers that care approach from a side.
  template <typename Derived>
  VectorT<typename Derived::Scalar> gradient(const Eigen::MatrixBase<Derived>& v) const {
    return std::visit([&](const auto& g) { return VectorT<typename Derived::Scalar>(g.grad(v)); },
                      gauge_);
  }

 private:
  int dimension_;
  Gauge gauge_;
  std::string name_;
  std::vector<Vector> singular_;
};

namespace gauge {

template <typename Derived>
typename Derived::Scalar LinearImage::eval(const Eigen::MatrixBase<Derived>& v) const {
  using S = typename Derived::Scalar;
  const VectorT<S> w = inverse.cast<S>() * v;
  return base->evaluate(w);
}

template <typename Derived>
VectorT<typename Derived::Scalar> LinearImage::grad(const Eigen::MatrixBase<Derived>& v) const {
  using S = typename Derived::Scalar;
  const VectorT<S> w = inverse.cast<S>() * v;
  return inverse.cast<S>().transpose() * base->gradient(w);
}

inline long double LinearImage::increment(const LVector& x, const LVector& h) const {
  const auto t = inverse.cast<long double>();
  return base->increment(t * x, t * h);
}

}  // namespace gauge

// The norm of the singular Minkowski plane whose unit ball is the
// intersection of the disks x1^2 + (x2 -+ 1)^2 <= 2:
//   ||(y1, y2)|| = sqrt(y1^2 + 2 y2^2) + |y2|.
SingularNorm paper_norm();
// Same unit ball, described as an intersection of two disks.
SingularNorm two_disk_norm();

// Registry of named norms used by the property suites and the CLI.
SingularNorm builtin_norm(const std::string& name);
std::vector<std::string> builtin_norm_names();

}  // namespace mh
