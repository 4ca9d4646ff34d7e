#include <gtest/gtest.h>

#include <chrono>
#include <random>

#include "minkhoro/boundary.hpp"
#include "oracles.hpp"

using namespace mh;

namespace {

Vector v2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

const PointGrid kGrid = PointGrid::default_grid(2);

Horofunction busemann_of(const SingularNorm& nm, const Point& origin, const Vector& dir) {
  return busemann_function(nm, Ray{origin, Direction::normalize(nm, dir)}, kGrid);
}

double angle_to(const WeakPoint& w, const Vector& v) { return angle_between(w.direction.vector(), v); }

}  // namespace

TEST(WeakPointOfRay, Examples) {
  const auto nm = paper_norm();
  const auto a = weak_point_of_ray(Ray{Point::Zero(2), Direction::from_unit(nm, v2(1, 0))});
  const auto b = weak_point_of_ray(Ray{v2(0, 5), Direction::from_unit(nm, v2(1, 0))});
  EXPECT_EQ(a.direction.vector(), b.direction.vector());
  const auto c = weak_point_of_ray(Ray{Point::Zero(2), Direction::from_unit(nm, v2(0, std::sqrt(2.0) - 1.0))});
  EXPECT_LT(angle_to(c, v2(0, 1)), 1e-15);
}

TEST(Project, CornerFiberMembersProjectToTheCorner) {
  const auto nm = paper_norm();
  for (const auto& f : {paper_beta0(), paper_phi_plus(), paper_phi_minus(), paper_beta0_shifted(1.0)}) {
    const auto r = project_coarse_to_weak_detailed(nm, CoarsePoint{f});
    EXPECT_LT(angle_between(r.raw_direction, v2(1, 0)), 1e-6) << f.id();
    EXPECT_EQ(r.point.direction.vector(), v2(1, 0)) << f.id();
    EXPECT_LE(r.max_min_deviation, 1e-6) << f.id();
  }
}

TEST(Project, MinimizerMatchesTheBruteForceOracle) {
  const auto nm = paper_norm();
  for (const auto& f : {paper_phi_plus(), coex_horofunction(-1, 1, 0.3)}) {
    const auto best = oracle::sphere_min_2d([&](const Point& y) { return f(y); }, nm, Point::Zero(2), 10.0);
    const auto r = project_coarse_to_weak_detailed(nm, CoarsePoint{f});
    EXPECT_LT(angle_between(r.raw_direction, best.point), 2e-3) << f.id();
    EXPECT_NEAR(r.minima.back().value, best.value, 1e-5) << f.id();
  }
}

TEST(Project, EuclideanLinear) {
  const auto nm = SingularNorm::euclidean(2);
  const Vector u = v2(0.6, -0.8);
  EXPECT_LT(angle_to(project_coarse_to_weak(nm, CoarsePoint{euclidean_busemann(u, Point::Zero(2))}), u), 1e-6);
}

TEST(Project, WrongBallMinimumIsAGeometryError) {
  const auto nm = paper_norm();
  const auto twice = Horofunction::closed_form("2beta0", Point::Zero(2), [](const Point& y) { return 2.0 * oracle::beta0(y); });
  EXPECT_THROW(project_coarse_to_weak(nm, CoarsePoint{twice}), GeometryError);
}

TEST(Project, NonUniqueMinimizerIsAGeometryError) {
  const auto nm = paper_norm();
  const auto cone = Horofunction::closed_form("-norm", Point::Zero(2), [nm](const Point& y) { return -norm(nm, y); });
  EXPECT_THROW(project_coarse_to_weak(nm, CoarsePoint{cone}), GeometryError);
}

TEST(Project, RoundTripOnRandomDirections) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> angle(-M_PI, M_PI);
  for (const auto& name : {"paper", "euclidean", "p4"}) {
    const auto nm = builtin_norm(name);
    for (int i = 0; i < 25; ++i) {
      const double a = angle(rng);
      const auto f = busemann_of(nm, Point::Zero(2), v2(std::cos(a), std::sin(a)));
      const auto w = project_coarse_to_weak(nm, CoarsePoint{f});
      EXPECT_LT(angle_to(w, v2(std::cos(a), std::sin(a))), 1e-6) << name << " angle " << a;
    }
  }
}

TEST(Project, RoundTripInThreeDimensions) {
  const auto nm = builtin_norm("singular3");
  const auto grid = PointGrid::box(3, -2.0, 2.0, 1.0);
  for (const auto& d : direction_samples(3, 6)) {
    const auto f = busemann_function(nm, Ray{Point::Zero(3), Direction::normalize(nm, d)}, grid);
    const auto w = project_coarse_to_weak(nm, CoarsePoint{f});
    EXPECT_LT(angle_between(w.direction.vector(), d), 1e-6) << d.transpose();
  }
}

TEST(Project, BasePointIndependence) {
  const auto nm = paper_norm();
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> coord(-3.0, 3.0);
  for (const auto& f : {paper_phi_plus(), busemann_of(nm, Point::Zero(2), v2(0.2, 1.0))}) {
    const auto w0 = project_coarse_to_weak(nm, CoarsePoint{f});
    for (int i = 0; i < 5; ++i) {
      const auto w = project_coarse_to_weak(nm, CoarsePoint{f.rebased(v2(coord(rng), coord(rng)))});
      EXPECT_LT(angular_distance(w.direction, w0.direction), 1e-6) << f.id();
    }
  }
}

TEST(Project, BallMinimumLaw) {
  const auto nm = paper_norm();
  for (const auto& f : {paper_beta0(), paper_phi_plus(), paper_phi_minus(), paper_beta0_shifted(-2.0),
                        busemann_of(nm, Point::Zero(2), v2(1, 0))}) {
    for (double t : {1.0, 2.0, 5.0, 10.0}) {
      const auto m = minimize_on_sphere([&](const Point& y) { return f(y); }, nm, f.base(), t);
      EXPECT_NEAR(m.value, -t, 1e-6) << f.id() << " t=" << t;
      EXPECT_TRUE(m.unique) << f.id() << " t=" << t;
    }
  }
}

TEST(Fiber, ReferenceNormSingularDirection) {
  const auto nm = paper_norm();
  std::vector<CoarsePoint> cands{{paper_beta0()}, {paper_beta0_shifted(1.0)}, {paper_beta0_shifted(-2.0)},
                                 {paper_phi_plus()}, {paper_phi_minus()}};
  const auto rep = explore_fiber(nm, WeakPoint{Direction::from_unit(nm, v2(1, 0))}, cands, kGrid);
  EXPECT_EQ(rep.classes, 5);
  EXPECT_GE(rep.min_class_separation, 0.5);
  ASSERT_EQ(rep.entries.size(), 5u);
  for (int i = 0; i < 5; ++i) {
    EXPECT_TRUE(rep.entries[i].included) << i;
    EXPECT_EQ(rep.entries[i].verdict.kind, i < 3 ? BusemannVerdict::Kind::busemann : BusemannVerdict::Kind::not_busemann)
        << rep.entries[i].id;
  }
}

TEST(Fiber, SeparationOverShiftedOrigins) {
  const auto nm = paper_norm();
  std::vector<CoarsePoint> cands{{paper_phi_plus()}, {paper_phi_minus()}};
  for (double a : {-2.0, 0.0, 1.0, 3.0}) cands.push_back({paper_beta0_shifted(a)});
  for (std::size_t i = 0; i < cands.size(); ++i)
    for (std::size_t j = i + 1; j < cands.size(); ++j)
      EXPECT_GE(difference_spread(cands[i].representative, cands[j].representative, kGrid), 0.5) << i << "," << j;
}

TEST(Fiber, EuclideanParallelRaysFormOneClass) {
  const auto nm = SingularNorm::euclidean(2);
  const Vector u = v2(0.8, 0.6);
  std::vector<CoarsePoint> cands{{busemann_of(nm, Point::Zero(2), u)}, {busemann_of(nm, v2(0, 3), u)}};
  const auto rep = explore_fiber(nm, WeakPoint{Direction::normalize(nm, u)}, cands, kGrid);
  EXPECT_EQ(rep.classes, 1);
}

TEST(Fiber, RegularDirectionIsTrivial) {
  const auto nm = paper_norm();
  const Vector u = v2(0, 1);
  std::vector<CoarsePoint> cands{{busemann_of(nm, Point::Zero(2), u)}, {busemann_of(nm, v2(0, 3), u)}};
  const auto rep = explore_fiber(nm, WeakPoint{Direction::normalize(nm, u)}, cands, kGrid);
  EXPECT_EQ(rep.classes, 1);
  for (const auto& e : rep.entries) EXPECT_EQ(e.verdict.kind, BusemannVerdict::Kind::busemann) << e.id;
}

TEST(Fiber, ForeignCandidateIsExcluded) {
  const auto nm = paper_norm();
  std::vector<CoarsePoint> cands{{paper_beta0()}, {busemann_of(nm, Point::Zero(2), v2(0, 1))}};
  const auto rep = explore_fiber(nm, WeakPoint{Direction::from_unit(nm, v2(1, 0))}, cands, kGrid);
  EXPECT_TRUE(rep.entries[0].included);
  EXPECT_FALSE(rep.entries[1].included);
  ASSERT_TRUE(rep.entries[1].projection);
  EXPECT_LT(angle_between(*rep.entries[1].projection, v2(0, 1)), 1e-6);
  EXPECT_EQ(rep.classes, 1);
}

TEST(Continuity, RegularDirectionsApproachingTheCorner) {
  const auto nm = paper_norm();
  std::vector<CoarsePoint> seq;
  for (double th : {0.4, 0.1, 0.03, 0.01, 3e-3, 1e-3, 3e-4})
    seq.push_back({busemann_of(nm, Point::Zero(2), v2(std::cos(th), std::sin(th)))});
  const auto rep = projection_continuity_probe(nm, seq, CoarsePoint{paper_beta0()}, kGrid);
  EXPECT_TRUE(rep.converges);
  EXPECT_LT(rep.angular_distance.back(), 1e-3);
}

TEST(Continuity, ConstantSequence) {
  const auto nm = paper_norm();
  std::vector<CoarsePoint> seq(3, CoarsePoint{paper_phi_plus()});
  const auto rep = projection_continuity_probe(nm, seq, CoarsePoint{paper_phi_plus()}, kGrid);
  for (double d : rep.angular_distance) EXPECT_EQ(d, 0.0);
  for (double d : rep.sup_distance) EXPECT_EQ(d, 0.0);
  EXPECT_TRUE(rep.converges);
}

TEST(Continuity, CoexFamilyConvergesToTheCorner) {
  const auto nm = paper_norm();
  std::vector<CoarsePoint> seq;
  for (double s : {0.5, 0.2, 0.1, 0.05, 0.01, 0.001}) seq.push_back({coex_horofunction(-1, -1, s)});
  const auto rep = projection_continuity_probe(nm, seq, CoarsePoint{paper_phi_plus()}, kGrid);
  EXPECT_TRUE(rep.converges);
  EXPECT_LT(rep.angular_distance.back(), 1e-3);
  for (std::size_t i = 1; i < rep.sup_distance.size(); ++i) EXPECT_LT(rep.sup_distance[i], rep.sup_distance[i - 1]);
}

TEST(Regularity, ReferenceNormCorners) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto rep = classify_space_regularity(paper_norm(), 3600);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  EXPECT_FALSE(rep.regular);
  ASSERT_EQ(rep.singular.size(), 2u);
  EXPECT_LT(angle_between(rep.singular[0].vector(), v2(1, 0)), 1e-9);
  EXPECT_LT(angle_between(rep.singular[1].vector(), v2(-1, 0)), 1e-9);
  EXPECT_LT(secs, 30.0);
}

TEST(Regularity, SmoothNormsAreRegular) {
  for (const auto& name : {"euclidean", "p4"}) {
    const auto rep = classify_space_regularity(builtin_norm(name), 3600);
    EXPECT_TRUE(rep.regular) << name;
    EXPECT_TRUE(rep.singular.empty()) << name;
  }
}

TEST(Regularity, KinkBetweenSamplesIsFound) {
  // Corners at +-(cos 0.3, sin 0.3), never hit by a 3600-point sweep.
  Matrix r(2, 2);
  r << std::cos(0.3), -std::sin(0.3), std::sin(0.3), std::cos(0.3);
  const auto nm = SingularNorm::linear_image(paper_norm(), r).with_singular_directions({});
  const auto rep = classify_space_regularity(nm, 3600);
  ASSERT_EQ(rep.singular.size(), 2u);
  EXPECT_LT(angle_between(rep.singular[0].vector(), v2(std::cos(0.3), std::sin(0.3))), 1e-9);
}

TEST(Regularity, ThreeDimensionalCrease) {
  const auto rep = classify_space_regularity(builtin_norm("singular3"), 2000);
  EXPECT_FALSE(rep.regular);
  for (const auto& d : rep.singular) EXPECT_LT(std::abs(d.vector()(1)), 1e-6);
  EXPECT_TRUE(classify_space_regularity(builtin_norm("euclidean3"), 2000).regular);
}
