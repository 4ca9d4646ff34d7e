#include <gtest/gtest.h>

#include "minkhoro/verify.hpp"

using namespace mh;

namespace {

CriterionStatus status(int k, const SingularNorm& nm, std::optional<double> tol = std::nullopt) {
  VerifyOptions o;
  o.tolerance = tol;
  const auto r = run_criterion(k, nm, o);
  EXPECT_EQ(r.number, k);
  EXPECT_FALSE(r.title.empty());
  return r.status;
}

}  // namespace

TEST(Verify, CheapCriteriaPassOnTheReferenceNorm) {
  for (int k : {1, 4, 5, 6, 8}) EXPECT_EQ(status(k, paper_norm()), CriterionStatus::pass) << k;
}

TEST(Verify, EuclideanMarksReferenceCriteriaNotApplicable) {
  const auto eu = SingularNorm::euclidean(2);
  for (int k : {1, 2, 3}) EXPECT_EQ(status(k, eu), CriterionStatus::not_applicable) << k;
  for (int k : {4, 5, 6, 8}) EXPECT_EQ(status(k, eu), CriterionStatus::pass) << k;
}

TEST(Verify, SabotagedToleranceFails) {
  for (int k : {1, 6}) EXPECT_EQ(status(k, paper_norm(), 1e-30), CriterionStatus::fail) << k;
}

TEST(Verify, UnknownCriterionIsAnArgumentError) {
  EXPECT_THROW(run_criterion(0, paper_norm()), ArgumentError);
  EXPECT_THROW(run_criterion(11, paper_norm()), ArgumentError);
}

TEST(Verify, ReportPassesUnlessSomethingFails) {
  VerifyReport r;
  r.criteria.push_back({1, "a", CriterionStatus::pass, "", 0});
  r.criteria.push_back({2, "b", CriterionStatus::not_applicable, "", 0});
  EXPECT_TRUE(r.passed());
  r.criteria.push_back({3, "c", CriterionStatus::fail, "", 0});
  EXPECT_FALSE(r.passed());
}
