#include <gtest/gtest.h>

#include "minkhoro/config.hpp"
#include "oracles.hpp"

using namespace mh;

namespace {

Vector v2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

const char* kReferenceConfig = R"(norm:
  builtin: paper
seed: 7
grid: {lo: -5, hi: 5, step: 0.5}
schedule: {max_steps: 40, tolerance: 1.0e-8}
sequences:
  - id: ray
    coordinates: ["k", "0"]
  - id: parabola
    coordinates: ["k^2", "-k"]
  - id: still
    coordinates: ["3", "1/k"]
horofunctions:
  - {id: b0, busemann: {origin: [0, 0], direction: [1, 0]}}
  - {id: plus, sequence: parabola}
  - {id: lin, linear: {covector: [-1, 1]}}
  - {id: shifted, closed_form: beta0_shifted, a: 1}
  - {id: c, closed_form: coex, eps1: -1, eps2: 1, sigma: 0.1}
fiber:
  xi: [1, 0]
  candidates: [b0, plus]
output: {dir: out, format: csv}
)";

int error_line(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.line();
  }
  return -1;
}

}  // namespace

TEST(Hash, Fnv1aReferenceValues) {
  EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
  EXPECT_EQ(hex64(0xaf63dc4c8601ec8cULL), "af63dc4c8601ec8c");
}

TEST(Config, ParsesEverySection) {
  const auto cfg = parse_config(kReferenceConfig, "paper.yaml");
  EXPECT_EQ(cfg.norm_label, "paper");
  EXPECT_EQ(cfg.norm.dimension(), 2);
  EXPECT_NEAR(norm(cfg.norm, v2(1, 1)), std::sqrt(3.0) + 1, 1e-15);
  EXPECT_EQ(cfg.seed, 7u);
  EXPECT_EQ(cfg.grid.step, 0.5);
  EXPECT_EQ(cfg.schedule.max_steps, 40);
  ASSERT_EQ(cfg.sequences.size(), 3u);
  EXPECT_EQ(cfg.sequences[1].coordinates[0].to_string(), IndexFunction::parse("k^2").to_string());
  ASSERT_EQ(cfg.horofunctions.size(), 5u);
  EXPECT_EQ(cfg.horofunctions[0].kind, HorofunctionConfig::Kind::busemann);
  EXPECT_EQ(cfg.horofunctions[1].sequence, "parabola");
  ASSERT_TRUE(cfg.fiber_xi);
  EXPECT_EQ(*cfg.fiber_xi, v2(1, 0));
  EXPECT_EQ(cfg.fiber_candidates, (std::vector<std::string>{"b0", "plus"}));
  EXPECT_EQ(cfg.output.format, "csv");
  EXPECT_EQ(cfg.hash, fnv1a64(kReferenceConfig));
}

TEST(Config, FamiliesBuildTheExpectedNorms) {
  const auto q = parse_config(R"(norm:
  family: sqrt-quadratic-plus-abs
  dimension: 2
  quadratic: [[1, 0], [0, 2]]
  abs_coordinate: 2
)");
  EXPECT_NEAR(norm(q.norm, v2(0, 1)), std::sqrt(2.0) + 1, 1e-15);
  const auto p = parse_config("norm: {family: p-norm, dimension: 3, p: 4}\n");
  EXPECT_EQ(p.norm.dimension(), 3);
  const auto e = parse_config(R"(norm:
  family: intersection-of-ellipsoids
  dimension: 2
  ellipsoids:
    - {center: [0, 1], shape: [[1, 0], [0, 1]], radius: 1.4142135623730951}
    - {center: [0, -1], shape: [[1, 0], [0, 1]], radius: 1.4142135623730951}
  singular_directions: [[1, 0], [-1, 0]]
)");
  EXPECT_NEAR(norm(e.norm, v2(1, 0)), 1.0, 1e-12);
  EXPECT_EQ(e.norm.declared_singular_directions().size(), 2u);
  const auto c = parse_config("norm: {family: custom-formula, dimension: 2, formula: \"sqrt(x1^2 + x2^2)\"}\n");
  EXPECT_NEAR(norm(c.norm, v2(3, 4)), 5.0, 1e-14);
}

TEST(Config, ErrorsCarryTheLocation) {
  EXPECT_EQ(error_line("norm:\n  builtin: paper\ngrid: {lo: -5, hi: 5, step: [1\n"), 4);
  EXPECT_EQ(error_line("norm:\n  builtin: nowhere\n"), 2);
  EXPECT_EQ(error_line("norm:\n  builtin: paper\nbogus: 1\n"), 3);
  EXPECT_EQ(error_line("norm:\n  builtin: paper\nschedule: {tolerance: -1}\n"), 3);
  EXPECT_EQ(error_line("norm:\n  builtin: paper\nsequences:\n  - id: s\n    coordinates: [\"k^\", \"0\"]\n"), 5);
  EXPECT_EQ(error_line("norm:\n  builtin: paper\nsequences:\n  - id: s\n    coordinates: [\"k\"]\n"), 5);
  EXPECT_EQ(error_line("grid: {step: 1}\n"), 1);  // no norm section
  EXPECT_EQ(error_line("norm:\n  builtin: paper\nhorofunctions:\n  - {id: h, sequence: missing}\n"), 4);
  try {
    parse_config("norm:\n  builtin: paper\ngrid: {step: 0}\n");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.line(), 3);
    EXPECT_GT(e.column(), 0);
    EXPECT_NE(std::string(e.what()).find("step"), std::string::npos);
  }
}

TEST(Config, CustomFormulasAreValidatedAtLoad) {
  const std::string concave = "norm: {family: custom-formula, dimension: 2, formula: \"(sqrt(abs(x1)) + sqrt(abs(x2)))^2\"}\n";
  EXPECT_THROW(parse_config(concave), ConfigError);
  EXPECT_NO_THROW(parse_config(concave, "<config>", {false}));
}

TEST(Config, BuildsHorofunctions) {
  const auto cfg = parse_config(kReferenceConfig);
  const auto grid = cfg.grid.make(2);
  const auto b0 = build_horofunction(cfg, "b0", grid);
  const auto plus = build_horofunction(cfg, "plus", grid);
  const auto ray = build_horofunction(cfg, "ray", grid);
  const auto lin = build_horofunction(cfg, "lin", grid);
  const auto sh = build_horofunction(cfg, "shifted", grid);
  for (const auto& p : oracle::default_grid()) {
    EXPECT_NEAR(b0(p), oracle::beta0(p), 1e-6);
    EXPECT_NEAR(ray(p), oracle::beta0(p), 1e-6);
    EXPECT_NEAR(plus(p), oracle::phi_plus(p), 1e-4);
    EXPECT_NEAR(lin(p), oracle::phi_plus(p), 1e-15);
    EXPECT_NEAR(sh(p) - oracle::beta0_shifted(p, 1.0), sh(Point::Zero(2)) - oracle::beta0_shifted(Point::Zero(2), 1.0),
                1e-12);
  }
  EXPECT_LE(difference_spread(build_horofunction(cfg, "c", grid), coex_horofunction(-1, 1, 0.1), grid), 1e-12);
  EXPECT_THROW(build_horofunction(cfg, "nope", grid), ArgumentError);
  EXPECT_THROW(build_horofunction(cfg, "still", grid), LimitError);
}

TEST(Config, ReferenceClosedFormsNeedTheReferenceNorm) {
  EXPECT_THROW(parse_config("norm: {builtin: euclidean}\nhorofunctions:\n  - {id: h, closed_form: phi_plus}\n"),
               ConfigError);
}
