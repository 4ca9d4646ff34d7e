#pragma once

#include <cmath>

#include <Eigen/Dense>

namespace mh {

// Vectors of the directing space and points of the affine space share one
// Eigen representation; the dimension is dynamic but bounded to [2, 4].
template <typename Scalar>
using VectorT = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using Vector = VectorT<double>;
using Point = VectorT<double>;
using LVector = VectorT<long double>;
using Matrix = Eigen::MatrixXd;

inline constexpr int kMinDimension = 2;
inline constexpr int kMaxDimension = 4;

inline bool all_finite(const Eigen::Ref<const Vector>& v) { return v.allFinite(); }

// Euclidean angle between two nonzero vectors, in radians.
inline double angle_between(const Eigen::Ref<const Vector>& a, const Eigen::Ref<const Vector>& b) {
  // Half-angle form: accurate for nearly parallel vectors too.
  const Vector u = a.normalized(), v = b.normalized();
  return 2.0 * std::atan2((u - v).norm(), (u + v).norm());
}

}  // namespace mh
