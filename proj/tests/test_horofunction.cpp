#include <gtest/gtest.h>

#include <chrono>
#include <random>

#include "minkhoro/gauss_map.hpp"
#include "minkhoro/horofunction.hpp"
#include "minkhoro/sphere.hpp"
#include "oracles.hpp"

using namespace mh;

namespace {

Vector v2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

Ray corner_ray(double a = 0.0) {
  return Ray{v2(0, a), Direction::from_unit(paper_norm(), v2(1, 0))};
}

PointSequence seq2(std::string id, std::function<LVector(long double)> at) {
  return PointSequence{std::move(id), Point::Zero(2), std::move(at)};
}

LVector l2(long double a, long double b) {
  LVector v(2);
  v << a, b;
  return v;
}

double max_error(const Horofunction& f, const std::function<double(const Point&)>& g) {
  double e = 0.0;
  for (const auto& p : oracle::default_grid()) e = std::max(e, std::abs(f(p) - g(p)));
  return e;
}

}  // namespace

TEST(BusemannEval, EuclideanIsMinusInnerProduct) {
  const auto eu = SingularNorm::euclidean(2);
  const auto u = Direction::from_unit(eu, v2(0.6, 0.8));
  Ray r{Point::Zero(2), u};
  for (const auto& y : {v2(1, 2), v2(-3, 0.5), v2(4, -4)})
    EXPECT_NEAR(busemann_eval(eu, r, y), -y.dot(u.vector()), 1e-8);
}

TEST(BusemannEval, ReferenceNormExamples) {
  const auto nm = paper_norm();
  EXPECT_NEAR(busemann_eval(nm, corner_ray(), v2(0, 1)), 1.0, 1e-8);
  EXPECT_NEAR(busemann_eval(nm, corner_ray(), v2(3, -2)), -1.0, 1e-8);
  for (double a : {1.0, -2.0})
    for (const auto& y : {v2(0, 1), v2(2, -3), v2(-1, 4)})
      EXPECT_NEAR(busemann_eval(nm, corner_ray(a), y), oracle::beta0_shifted(y, a), 1e-8);
}

TEST(BusemannEval, ShortScheduleDoesNotConverge) {
  EXPECT_THROW(busemann_eval(paper_norm(), corner_ray(), v2(1, 1), LimitSchedule{5, 1e-12}), LimitError);
  EXPECT_THROW(busemann_eval(paper_norm(), corner_ray(), v2(1, 1), LimitSchedule{2, 1e-8}), ArgumentError);
}

TEST(BusemannEval, NonIncreasingRawSequence) {
  const auto nm = paper_norm();
  for (const auto& y : oracle::default_grid()) {
    double prev = 1e300;
    for (int j = 0; j < 30; ++j) {
      const double t = std::ldexp(1.0, j);
      const double a = nm.evaluate(Vector(y - t * v2(1, 0))) - t;
      EXPECT_LE(a, prev + 1e-12 * (1 + t));
      prev = a;
    }
  }
}

TEST(BusemannFunction, ReproducesBeta0OnTheGrid) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto nm = paper_norm();
  const auto beta = busemann_function(nm, corner_ray(), PointGrid::default_grid(2));
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  EXPECT_LE(max_error(beta, oracle::beta0), 1e-6);
  EXPECT_LT(secs, 5.0);
  EXPECT_EQ(beta.provenance(), Provenance::busemann_of_ray);
  EXPECT_EQ(beta(beta.base()), 0.0);
}

TEST(BusemannFunction, AttainsMinusTAlongItsRay) {
  const auto nm = paper_norm();
  const auto r = Ray{v2(0.5, -1), Direction::normalize(nm, v2(1, 0.7))};
  const auto beta = busemann_function(nm, r, PointGrid::default_grid(2));
  for (double t : {1.0, 2.0, 5.0, 10.0}) {
    EXPECT_NEAR(beta(r.at(t)), -t, 1e-8);
    const auto m = oracle::sphere_min_2d([&](const Point& y) { return beta(y); }, nm, r.origin, t, 20000);
    EXPECT_NEAR(m.value, -t, 1e-6);
  }
}

TEST(HorofunctionLimit, LevelOneSequenceGivesBeta0) {
  const auto nm = paper_norm();
  const auto f = horofunction_limit(nm, seq2("(k,0)", [](long double k) { return l2(k, 0); }), PointGrid::default_grid(2));
  EXPECT_LE(max_error(f, oracle::beta0), 1e-6);
  EXPECT_EQ(f.provenance(), Provenance::limit_of_sequence);
}

TEST(HorofunctionLimit, ParabolicSequencesGivePhiPlusAndMinus) {
  const auto nm = paper_norm();
  const auto grid = PointGrid::default_grid(2);
  const auto fp = horofunction_limit(nm, seq2("(k^2,-k)", [](long double k) { return l2(k * k, -k); }), grid);
  const auto fm = horofunction_limit(nm, seq2("(k^2,k)", [](long double k) { return l2(k * k, k); }), grid);
  EXPECT_LE(max_error(fp, oracle::phi_plus), 1e-6);
  EXPECT_LE(max_error(fm, oracle::phi_minus), 1e-6);
}

TEST(HorofunctionLimit, BoundedSequenceIsRejected) {
  const auto nm = paper_norm();
  try {
    horofunction_limit(nm, seq2("to (1,1)", [](long double k) { return l2(1 + 1 / k, 1 - 1 / k); }), PointGrid::default_grid(2));
    FAIL() << "expected LimitError";
  } catch (const LimitError& e) {
    EXPECT_NE(std::string(e.what()).find("not flag-directed: bounded"), std::string::npos);
  }
}

TEST(HorofunctionLimit, OscillatingSequenceDoesNotConverge) {
  const auto nm = paper_norm();
  // Alternates between two escape directions over the decades.
  auto at = [](long double k) {
    const long double s = std::sin(std::log(k));
    return l2(k, k * s);
  };
  EXPECT_THROW(horofunction_limit(nm, seq2("spiral", at), PointGrid::default_grid(2)), LimitError);
}

TEST(HorofunctionLimit, AlmostFlagDirectedLevelOneMatchesRayDirection) {
  const auto nm = paper_norm();
  const auto f = horofunction_limit(nm, seq2("(k, 1+1/k)", [](long double k) { return l2(k, 1 + 1 / k); }),
                                    PointGrid::default_grid(2));
  for (const auto& y0 : {v2(0, 0), v2(-2, 3), v2(1, -1)})
    for (double s : {0.5, 2.0, 4.0}) EXPECT_NEAR(f(Point(y0 + s * v2(1, 0))) - f(y0), -s, 1e-6);
}

TEST(HorofunctionLimit, RegularDirectionGivesTheBusemannFunction) {
  const auto nm = paper_norm();
  const auto u = Direction::normalize(nm, v2(0.3, 1));
  ASSERT_EQ(classify_direction(nm, u), Regularity::regular);
  const Vector uv = u.vector();
  auto at = [uv](long double k) { return LVector(k * uv.cast<long double>() + l2(2 + 1 / k, -1 + 1 / (k * k))); };
  const auto grid = PointGrid::default_grid(2);
  const auto f = horofunction_limit(nm, seq2("regular", at), grid);
  const auto beta = busemann_function(nm, Ray{Point::Zero(2), u}, grid);
  EXPECT_LE(difference_spread(f, beta, grid), 1e-4);
}

TEST(Equivalence, Examples) {
  const auto grid = PointGrid::default_grid(2);
  const auto b0 = paper_beta0();
  EXPECT_TRUE(equivalent_up_to_constant(b0, b0, grid));
  EXPECT_FALSE(equivalent_up_to_constant(b0, paper_beta0_shifted(1.0), grid));
  EXPECT_GE(difference_spread(b0, paper_phi_plus(), grid), 2.0);
  EXPECT_FALSE(equivalent_up_to_constant(b0, paper_phi_plus(), grid));
  EXPECT_THROW(difference_spread(b0, b0, PointGrid{}), ArgumentError);
}

TEST(Equivalence, RebasingChangesOnlyTheConstant) {
  const auto grid = PointGrid::default_grid(2);
  const auto f = paper_beta0_shifted(1.0);
  const auto g = f.rebased(v2(2, 2));
  EXPECT_EQ(g(v2(2, 2)), 0.0);
  EXPECT_LE(difference_spread(f, g, grid), 1e-12);
}

TEST(HorofunctionProperties, OneLipschitz) {
  const auto nm = paper_norm();
  const auto grid = PointGrid::default_grid(2);
  std::vector<Horofunction> hs = {paper_beta0(), paper_beta0_shifted(1), paper_phi_plus(), paper_phi_minus(),
                                  busemann_function(nm, corner_ray(), grid),
                                  horofunction_limit(nm, seq2("(k^2,-k)", [](long double k) { return l2(k * k, -k); }), grid)};
  for (const auto& h : hs) EXPECT_LE(lipschitz_excess(nm, h, 1000, 17), 1e-9) << h.id();
}

TEST(Coex, FamilyMembersAreBusemannFunctionsOfRegularDirections) {
  const auto nm = paper_norm();
  const auto grid = PointGrid::default_grid(2);
  for (int e1 : {-1, 1})
    for (int e2 : {-1, 1})
      for (double sigma : {0.5, 0.1, 0.01}) {
        const auto c = coex_horofunction(e1, e2, sigma);
        const Vector cov = coex_covector(e1, e2, sigma);
        // Busemann function of v is -<grad N(v), .>, so v = inverse Gauss of -cov.
        const auto v = inverse_gauss(nm, EuclideanUnitNormal::normalize(-cov));
        EXPECT_EQ(classify_direction(nm, v), Regularity::regular);
        const auto beta = busemann_function(nm, Ray{Point::Zero(2), v}, grid);
        EXPECT_LE(difference_spread(c, beta, grid), 1e-6) << e1 << e2 << sigma;
        EXPECT_NEAR(std::abs(v.vector()(1)), sigma / (2 + sigma), 1e-7);
      }
}

TEST(Coex, LimitsAreThePhiFunctions) {
  const auto grid = PointGrid::default_grid(2);
  EXPECT_LE(difference_spread(coex_horofunction(-1, -1, 1e-9), paper_phi_plus(), grid), 1e-7);
  EXPECT_LE(difference_spread(coex_horofunction(-1, 1, 1e-9), paper_phi_minus(), grid), 1e-7);
}

// With lambda^2 + (mu + eps2)^2 = 2 the linear functions are not horofunctions:
// their minimum on the sphere of radius t is not -t.
TEST(Coex, CircleConstraintBreaksTheBallMinimumLaw) {
  const auto nm = paper_norm();
  const double mu = 0.1, lam = std::sqrt(2.0 - 1.1 * 1.1);
  const auto f = linear_horofunction("circle-constraint", -v2(lam, mu + 1), Point::Zero(2));
  const auto m = oracle::sphere_min_2d([&](const Point& y) { return f(y); }, nm, Point::Zero(2), 1.0);
  EXPECT_GT(std::abs(m.value + 1.0), 1e-2);
}

TEST(IsBusemann, ReferenceNormVerdicts) {
  const auto nm = paper_norm();
  const auto b = is_busemann_function(nm, paper_beta0());
  ASSERT_EQ(b.kind, BusemannVerdict::Kind::busemann);
  EXPECT_LT(angle_between(b.ray->direction.vector(), v2(1, 0)), 1e-6);
  EXPECT_LT(b.ray->origin.norm(), 1e-12);
  EXPECT_EQ(is_busemann_function(nm, paper_phi_plus()).kind, BusemannVerdict::Kind::not_busemann);
  EXPECT_EQ(is_busemann_function(nm, paper_phi_minus()).kind, BusemannVerdict::Kind::not_busemann);
}

TEST(IsBusemann, RegularDirectionAndShiftedOrigin) {
  const auto nm = paper_norm();
  const auto grid = PointGrid::default_grid(2);
  const auto u = Direction::normalize(nm, v2(-0.4, 1));
  const auto beta = busemann_function(nm, Ray{Point::Zero(2), u}, grid);
  EXPECT_EQ(is_busemann_function(nm, beta).kind, BusemannVerdict::Kind::busemann);
  const auto shifted = paper_beta0_shifted(1.0).rebased(Point::Zero(2));
  const auto v = is_busemann_function(nm, shifted);
  ASSERT_EQ(v.kind, BusemannVerdict::Kind::busemann);
  EXPECT_NEAR(v.ray->origin(1), 1.0, 1e-12);
}

TEST(IsBusemann, SequenceLimitsOfParabolasAreNotBusemann) {
  // The numeric limits carry evaluation noise that pulls the sampled sphere
  // minimizer slightly off the corner; the verdict must not follow it.
  const auto nm = paper_norm();
  const auto grid = PointGrid::default_grid(2);
  for (int s : {-1, 1}) {
    const auto f = horofunction_limit(nm, seq2("(k^2,sk)", [s](long double k) { return l2(k * k, s * k); }), grid);
    EXPECT_EQ(is_busemann_function(nm, f).kind, BusemannVerdict::Kind::not_busemann) << s;
  }
}

TEST(IsBusemann, RegularDirectionsNearTheCornerAreNotSnapped) {
  const auto nm = paper_norm();
  const auto grid = PointGrid::default_grid(2);
  for (int e2 : {-1, 1}) {
    const auto v = inverse_gauss(nm, EuclideanUnitNormal::normalize(-coex_covector(-1, e2, 1e-3)));
    const auto beta = busemann_function(nm, Ray{Point::Zero(2), v}, grid);
    const auto verdict = is_busemann_function(nm, beta);
    ASSERT_EQ(verdict.kind, BusemannVerdict::Kind::busemann) << e2;
    EXPECT_GT(angle_between(verdict.ray->direction.vector(), v2(1, 0)), 1e-4);
    EXPECT_LT(angle_between(verdict.ray->direction.vector(), v.vector()), 1e-6);
  }
}

TEST(IsBusemann, NonHorofunctionIsAGeometryError) {
  const auto nm = paper_norm();
  const auto f = linear_horofunction("half", v2(-0.5, 0), Point::Zero(2));
  EXPECT_THROW(is_busemann_function(nm, f), GeometryError);
}
