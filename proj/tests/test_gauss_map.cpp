#include <gtest/gtest.h>

#include <random>

#include "minkhoro/gauss_map.hpp"
#include "minkhoro/sphere.hpp"
#include "oracles.hpp"

using namespace mh;

namespace {

Vector v2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

EuclideanUnitNormal normal(double a, double b) { return EuclideanUnitNormal::normalize(v2(a, b)); }

Direction upper_arc_point() { return Direction::from_unit(paper_norm(), v2(0, std::sqrt(2.0) - 1)); }

}  // namespace

TEST(Support, Examples) {
  EXPECT_NEAR(support_value(SingularNorm::euclidean(2), normal(0.3, -0.8)), 1.0, 1e-14);
  const auto nm = paper_norm();
  EXPECT_NEAR(support_value(nm, normal(1, 0)), 1.0, 1e-14);
  EXPECT_NEAR(support_value(nm, normal(0, 1)), oracle::kSupportUp, 1e-14);
}

TEST(Support, AgreesWithBruteForceOracle) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> ang(0, 2 * std::numbers::pi);
  for (const char* name : {"paper", "two-disk", "p4", "euclidean"}) {
    const auto nm = builtin_norm(name);
    for (int s = 0; s < 20; ++s) {
      const auto nu = EuclideanUnitNormal::from_angle(ang(rng));
      const auto ref = oracle::support_2d(nm, nu.vector(), 200'000);
      const auto sp = support_point(nm, nu);
      EXPECT_GE(sp.value, ref.value - 1e-12) << name;
      EXPECT_NEAR(sp.value, ref.value, 1e-8) << name;
      EXPECT_LT((sp.maximizer.vector() - ref.point).norm(), 1e-3) << name;
    }
  }
}

TEST(Support, SupportPropertyAndUniqueness) {
  const auto nm = paper_norm();
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> ang(0, 2 * std::numbers::pi);
  for (int s = 0; s < 30; ++s) {
    const auto nu = EuclideanUnitNormal::from_angle(ang(rng));
    const auto sp = support_point(nm, nu);
    EXPECT_NEAR(nu.vector().dot(sp.maximizer.vector()), sp.value, 1e-15);
    Point lo, hi;
    double diameter = 0.0;
    std::vector<Point> near;
    for (int i = 0; i < 20000; ++i) {
      const Point x = oracle::sphere_point(nm, 2 * std::numbers::pi * i / 20000);
      const double val = nu.vector().dot(x);
      EXPECT_LE(val, sp.value + 1e-9);
      if (val >= sp.value - 1e-6) near.push_back(x);
    }
    for (const auto& a : near)
      for (const auto& b : near) diameter = std::max(diameter, (a - b).norm());
    // A value gap of 1e-6 spans about 2 * sqrt(2e-6) = 2.8e-3 of arc at unit curvature.
    EXPECT_LT(diameter, 5e-3);
  }
}

TEST(InverseGauss, Examples) {
  const auto eu = SingularNorm::euclidean(2);
  const auto nu = normal(-0.6, 0.8);
  EXPECT_LT((inverse_gauss(eu, nu).vector() - nu.vector()).norm(), 1e-8);
  const auto nm = paper_norm();
  EXPECT_LT((inverse_gauss(nm, normal(1, 0)).vector() - v2(1, 0)).norm(), 1e-12);
  EXPECT_LT((inverse_gauss(nm, normal(1, 1)).vector() - v2(1, 0)).norm(), 1e-12);
  EXPECT_LT((inverse_gauss(nm, normal(0, 1)).vector() - v2(0, std::sqrt(2.0) - 1)).norm(), 1e-8);
}

TEST(InverseGauss, FlatFacetRaisesConvexityError) {
  const auto square = SingularNorm::custom("max(abs(x1), abs(x2))", 2);
  EXPECT_THROW(inverse_gauss(square, normal(1, 0)), ConvexityError);
}

TEST(InverseGauss, HigherDimensions) {
  const auto eu = SingularNorm::euclidean(3);
  Vector n3(3);
  n3 << 0.2, -0.5, 0.7;
  const auto nu = EuclideanUnitNormal::normalize(n3);
  EXPECT_LT((inverse_gauss(eu, nu).vector() - nu.vector()).norm(), 1e-6);

  const auto s3 = builtin_norm("singular3");
  // Two-level brute force: global Fibonacci sampling, then dense sampling of
  // a small cap around the best sample.
  auto dirs = direction_samples(3, 100'000);
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g(0, 1);
  for (int trial = 0; trial < 5; ++trial) {
    Vector raw(3);
    raw << std::cos(trial), std::sin(2.0 * trial), 0.5 - 0.2 * trial;
    const auto nv = EuclideanUnitNormal::normalize(raw);
    auto val = [&](const Vector& d) { return nv.vector().dot(d) / s3.evaluate(d); };
    Vector arg = dirs[0];
    for (const auto& d : dirs)
      if (val(d) > val(arg)) arg = d;
    Vector center = arg;
    for (int i = 0; i < 200'000; ++i) {
      Vector p(3);
      p << g(rng), g(rng), g(rng);
      const Vector d = (center + 0.02 * p).normalized();
      if (val(d) > val(arg)) arg = d;
    }
    const auto sp = support_point(s3, nv);
    EXPECT_GE(sp.value, val(arg) - 1e-12);
    EXPECT_NEAR(sp.value, val(arg), 1e-5);
  }
}

TEST(GaussImage, CornerIsAnArcOfTheTwoCircleNormals) {
  const auto nm = paper_norm();
  const auto g = gauss_image(nm, Direction::from_unit(nm, v2(1, 0)));
  ASSERT_EQ(g.kind, GaussImage::Kind::arc);
  const double r = std::sqrt(0.5);
  EXPECT_LT((g.normals[0].vector() - v2(r, -r)).norm(), 1e-9);
  EXPECT_LT((g.normals[1].vector() - v2(r, r)).norm(), 1e-9);
  EXPECT_NEAR(g.angular_width, std::numbers::pi / 2, 1e-9);
}

TEST(GaussImage, SmoothPointsAreSingletons) {
  const auto g = gauss_image(paper_norm(), upper_arc_point());
  ASSERT_EQ(g.kind, GaussImage::Kind::singleton);
  EXPECT_LT((g.normals[0].vector() - v2(0, 1)).norm(), 1e-9);
  const auto eu = SingularNorm::euclidean(2);
  const auto d = Direction::normalize(eu, v2(0.6, 0.8));
  const auto ge = gauss_image(eu, d);
  ASSERT_EQ(ge.kind, GaussImage::Kind::singleton);
  EXPECT_LT((ge.normals[0].vector() - d.vector()).norm(), 1e-9);
}

TEST(GaussImage, NormalsSupportTheBall) {
  for (const char* name : {"paper", "p4", "two-disk"}) {
    const auto nm = builtin_norm(name);
    for (int i = 0; i < 24; ++i) {
      const auto v = Direction::normalize(nm, unit_sphere_point<double>(nm, 2 * std::numbers::pi * i / 24));
      for (const auto& nu : gauss_image(nm, v).normals)
        for (int j = 0; j < 2000; ++j) {
          const Point x = oracle::sphere_point(nm, 2 * std::numbers::pi * j / 2000);
          EXPECT_LE(nu.vector().dot(x - v.vector()), 1e-9) << name;
        }
    }
  }
}

TEST(GaussImage, SampledInThreeDimensions) {
  const auto s3 = builtin_norm("singular3");
  Vector crease(3);
  crease << 1, 0, 1;
  const auto g = gauss_image(s3, Direction::normalize(s3, crease));
  EXPECT_EQ(g.kind, GaussImage::Kind::sampled);
  EXPECT_GT(g.angular_width, 0.5);
  Vector smooth(3);
  smooth << 0.3, 0.4, 1;
  EXPECT_EQ(classify_direction(s3, Direction::normalize(s3, smooth)), Regularity::regular);
  EXPECT_EQ(classify_direction(builtin_norm("euclidean3"), Direction::normalize(s3, crease)), Regularity::regular);
}

TEST(Classify, Examples) {
  const auto nm = paper_norm();
  EXPECT_EQ(classify_direction(nm, Direction::from_unit(nm, v2(1, 0))), Regularity::singular);
  EXPECT_EQ(classify_direction(nm, Direction::from_unit(nm, v2(-1, 0))), Regularity::singular);
  EXPECT_EQ(classify_direction(nm, upper_arc_point()), Regularity::regular);
}

TEST(Classify, InvariantUnderLinearChangeOfEuclideanStructure) {
  const auto nm = paper_norm();
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int trial = 0; trial < 5; ++trial) {
    Matrix a = Matrix::Identity(2, 2);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) a(i, j) += 0.6 * u(rng);
    const auto image = SingularNorm::linear_image(nm, a);
    for (int i = 0; i < 72; ++i) {
      const auto v = Direction::normalize(nm, unit_sphere_point<double>(nm, 2 * std::numbers::pi * i / 72));
      const auto w = Direction::normalize(image, a * v.vector());
      EXPECT_EQ(classify_direction(nm, v), classify_direction(image, w)) << trial << " " << i;
    }
  }
}

TEST(Theta, Examples) {
  const auto nm = paper_norm();
  const auto e1 = Direction::from_unit(nm, v2(1, 0));
  const auto w = Direction::normalize(nm, v2(1, 1));
  EXPECT_DOUBLE_EQ(theta(normal(1, 0), e1, e1), 1.0);
  EXPECT_NEAR(theta(normal(1, 0), e1, w), oracle::kThetaExample, 1e-14);
  EXPECT_DOUBLE_EQ(theta(normal(0, 1), upper_arc_point(), upper_arc_point()), 1.0);
  EXPECT_THROW(theta(normal(0, 1), e1, w), DomainError);
}

TEST(BigTheta, VanishesOnTheDiagonal) {
  const auto nm = paper_norm();
  const auto v = upper_arc_point();
  EXPECT_EQ(big_theta(nm, normal(0, 1), v, v), 0.0);
}

TEST(CosineIdentity, HoldsOnRandomPairs) {
  const auto nm = paper_norm();
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> ang(-1.5, 1.5);
  int checked = 0;
  while (checked < 300) {
    const auto nu = EuclideanUnitNormal::from_angle(ang(rng));
    const auto v1 = Direction::normalize(nm, unit_sphere_point<double>(nm, ang(rng)));
    const auto v2d = Direction::normalize(nm, unit_sphere_point<double>(nm, ang(rng)));
    if (nu.vector().dot(v1.vector()) <= 0.05 || nu.vector().dot(v2d.vector()) <= 0.05) continue;
    EXPECT_LE(cosine_identity_residual(nm, nu, v1, v2d), 1e-9);
    ++checked;
  }
}

TEST(CosineIdentity, RotatedCopyOnTheSmoothArc) {
  const auto nm = paper_norm();
  const auto v1 = Direction::normalize(nm, unit_sphere_point<double>(nm, 1.2));
  const auto v2d = Direction::normalize(nm, unit_sphere_point<double>(nm, 1.3));
  EXPECT_LE(cosine_identity_residual(nm, normal(0, 1), v1, v2d), 1e-9);
}

TEST(CosineIdentity, NearDegeneratePairsRaiseConditioningError) {
  const auto nm = paper_norm();
  const auto v1 = Direction::normalize(nm, unit_sphere_point<double>(nm, 1.2));
  const auto v2d = Direction::normalize(nm, unit_sphere_point<double>(nm, 1.2 + 1e-13));
  EXPECT_THROW(cosine_identity_residual(nm, normal(0, 1), v1, v2d), ConditioningError);
}

// With |v1 - theta v2| in the denominator the relation is not an identity.
TEST(CosineIdentity, AlternativeDenominatorIsNotAnIdentity) {
  const auto nm = paper_norm();
  const auto nu = normal(0, 1);
  const auto v1 = Direction::normalize(nm, v2(1, 0.5));
  const auto v2d = upper_arc_point();
  const double th = theta(nu, v1, v2d);
  const Vector d = v2d.vector() - v1.vector();
  const double rhs = (nu.vector().dot(d) / d.norm()) / (nu.vector().dot(v2d.vector()) / v2d.vector().norm());
  const double alt = (1 - th) * v2d.vector().norm() / (v1.vector() - th * v2d.vector()).norm();
  EXPECT_GT(std::abs(alt - rhs), 1e-2 * std::abs(rhs));
  EXPECT_LE(cosine_identity_residual(nm, nu, v1, v2d), 1e-12);
}

TEST(Lambda, Examples) {
  const auto eu = SingularNorm::euclidean(2);
  const double a = 0.7;
  EXPECT_NEAR(lambda(eu, normal(1, 0), Direction::from_unit(eu, v2(std::cos(a), std::sin(a)))), 1 / std::cos(a), 1e-12);
  const auto nm = paper_norm();
  EXPECT_NEAR(lambda(nm, normal(1, 1), upper_arc_point()), oracle::kLambdaExample, 1e-12);
  const auto nu = normal(0.3, 0.9);
  EXPECT_DOUBLE_EQ(lambda(nm, nu, inverse_gauss(nm, nu)), 1.0);
  EXPECT_THROW(lambda(nm, normal(-1, 0), upper_arc_point()), DomainError);
}

TEST(BigLambda, VanishesAtTheTouchingPoint) {
  const auto nm = paper_norm();
  const auto nu = normal(0.3, 0.9);
  EXPECT_EQ(big_lambda(nm, nu, inverse_gauss(nm, nu)), 0.0);
  EXPECT_EQ(fixed_direction_lambda(nm, inverse_gauss(nm, nu), nu), 0.0);
}

TEST(BigLambda, BoundedAwayFromZeroAlongCornerSequence) {
  const auto nm = paper_norm();
  const double r = std::sqrt(0.5);
  const auto nu0 = normal(r, -r);
  double lo = 1e300;
  for (int k = 100; k <= 10000; k += 50) {
    const double t = std::numbers::pi / 4 + 1.0 / k;
    const auto vk = Direction::normalize(nm, v2(std::sqrt(2.0) * std::cos(t), -1 + std::sqrt(2.0) * std::sin(t)));
    lo = std::min(lo, big_lambda(nm, nu0, vk));
  }
  EXPECT_GT(lo, oracle::kCornerLowerBound);
}
