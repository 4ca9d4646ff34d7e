#include <gtest/gtest.h>

#include <sstream>

#include "minkhoro/horosphere.hpp"
#include "oracles.hpp"

using namespace mh;

namespace {

Vector v2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

const BoundingBox kBox = BoundingBox::cube(2, -5.0, 5.0);

}  // namespace

TEST(Horosphere, EuclideanLinearLevelSetIsALine) {
  const auto nm = SingularNorm::euclidean(2);
  const auto f = euclidean_busemann(v2(1, 0), Point::Zero(2));
  const auto s = horosphere_sample(nm, f, 0.0, kBox, 40);
  ASSERT_FALSE(s.empty());
  for (const auto& p : s.points) EXPECT_NEAR(p(0), 0.0, 1e-9);
  ASSERT_EQ(s.polylines.size(), 1u);
  EXPECT_NEAR(s.polylines[0].front()(1) * s.polylines[0].back()(1), -25.0, 1e-6);
}

TEST(Horosphere, Beta0LevelSetIsAVee) {
  const auto f = paper_beta0();
  const auto s = horosphere_sample(paper_norm(), f, 0.0, kBox, 40);
  ASSERT_FALSE(s.empty());
  bool upper = false, lower = false;
  for (const auto& p : s.points) {
    EXPECT_NEAR(p(0), std::abs(p(1)), 1e-6);
    upper |= p(1) > 1.0;
    lower |= p(1) < -1.0;
  }
  EXPECT_TRUE(upper && lower);
  EXPECT_EQ(s.polylines.size(), 1u);
}

TEST(Horosphere, PhiPlusLevelSetIsTheDiagonal) {
  const auto s = horosphere_sample(paper_norm(), paper_phi_plus(), 0.0, kBox, 32);
  ASSERT_FALSE(s.empty());
  for (const auto& p : s.points) EXPECT_NEAR(p(0), p(1), 1e-6);
}

TEST(Horosphere, PointsSatisfyTheLevelTolerance) {
  const auto nm = paper_norm();
  const Ray r{Point::Zero(2), Direction::normalize(nm, v2(0.3, 1.0))};
  const auto f = busemann_function(nm, r, PointGrid::default_grid(2));
  for (double level : {-2.0, 0.0, 1.5}) {
    const auto s = horosphere_sample(nm, f, level, kBox, 24);
    ASSERT_FALSE(s.empty()) << level;
    for (const auto& p : s.points) EXPECT_LE(std::abs(f(p) - level), kLevelTolerance);
  }
}

TEST(Horosphere, InsideFlagsMatchTheSublevelSet) {
  const auto f = paper_beta0();
  const int res = 10;
  const auto s = horosphere_sample(paper_norm(), f, 0.0, kBox, res);
  ASSERT_EQ(s.inside.size(), static_cast<size_t>((res + 1) * (res + 1)));
  for (int j = 0; j <= res; ++j)
    for (int i = 0; i <= res; ++i) {
      const Point p = v2(-5.0 + i, -5.0 + j);
      EXPECT_EQ(s.inside[j * (res + 1) + i], oracle::beta0(p) <= 0.0);
    }
}

TEST(Horosphere, LevelOutsideTheBoxIsEmptyWithDiagnostic) {
  const auto s = horosphere_sample(paper_norm(), paper_beta0(), 100.0, kBox, 16);
  EXPECT_TRUE(s.empty());
  EXPECT_FALSE(s.diagnostic.empty());
}

TEST(Horosphere, RejectsCoarseResolution) {
  EXPECT_THROW(horosphere_sample(paper_norm(), paper_beta0(), 0.0, kBox, 7), ArgumentError);
}

TEST(Horosphere, ThreeDimensionalEdgeCrossings) {
  const auto nm = SingularNorm::euclidean(3);
  Vector u = Vector::Zero(3);
  u(2) = 1.0;
  const auto s = horosphere_sample(nm, euclidean_busemann(u, Point::Zero(3)), 0.5,
                                   BoundingBox::cube(3, -1.0, 1.0), 8);
  ASSERT_FALSE(s.empty());
  for (const auto& p : s.points) EXPECT_NEAR(p(2), -0.5, 1e-9);
  EXPECT_TRUE(s.polylines.empty());
}

TEST(HorosphereExport, CsvFormat) {
  const auto s = horosphere_sample(paper_norm(), paper_phi_plus(), 0.0, kBox, 8);
  std::ostringstream out;
  write_csv(out, s);
  const std::string text = out.str();
  EXPECT_EQ(text.rfind("x1,x2,level\n", 0), 0u);
  EXPECT_EQ(text.find('\r'), std::string::npos);
  EXPECT_EQ(text.back(), '\n');
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  int rows = 0;
  while (std::getline(in, line)) {
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), 2);
    ++rows;
  }
  EXPECT_EQ(rows, static_cast<int>(s.points.size()));
}

TEST(HorosphereExport, SeventeenSignificantDigits) {
  EXPECT_EQ(format_number(0.1), "0.10000000000000001");
  EXPECT_EQ(format_number(-2.0), "-2");
  EXPECT_EQ(std::stod(format_number(1.0 / 3.0)), 1.0 / 3.0);
}

TEST(HorosphereExport, SvgHasOnePolylinePerComponent) {
  const auto s = horosphere_sample(paper_norm(), paper_beta0(), 0.0, kBox, 16);
  std::ostringstream out;
  write_svg(out, s);
  const std::string text = out.str();
  EXPECT_NE(text.find("<svg"), std::string::npos);
  size_t count = 0;
  for (size_t pos = text.find("<polyline"); pos != std::string::npos; pos = text.find("<polyline", pos + 1)) ++count;
  EXPECT_EQ(count, s.polylines.size());
}

TEST(HorosphereExport, Deterministic) {
  auto render = [] {
    std::ostringstream out;
    write_csv(out, horosphere_sample(paper_norm(), paper_beta0_shifted(1.0), 0.5, kBox, 20));
    return out.str();
  };
  EXPECT_EQ(render(), render());
}
