#include <gtest/gtest.h>

#include <cmath>

#include "test_support.hpp"

using namespace gtmc;
using namespace gtmc::sim;

namespace {

ExperimentConfig small_config() {
  ExperimentConfig cfg;
  cfg.params = {60, 0, 3, 0.1, 0.1, 5, 17};
  cfg.t_grid = {15, 30, 45};
  cfg.trials = 40;
  cfg.fill_policy = FillPolicy::greedy_cover(0.1);
  cfg.threads = 1;
  return cfg;
}

}  // namespace

TEST(EstimateRows, NoErasureGivesZeroEveryTrial) {
  const auto st = estimate_rows({20, 3, 0.3, 0.0, 4}, 10, 50, RngStream(1));
  EXPECT_EQ(st.mean_h_over_t, 0.0);
  EXPECT_EQ(st.stderr_, 0.0);
}

TEST(EstimateRows, SingleSampleMatchesUpsilon) {
  const RegimeParams rp{20, 3, 0.3, 0.2, 1};
  const auto st = estimate_rows(rp, 10, 20'000, RngStream(2, "rows"), 1);
  EXPECT_LE(std::abs(st.mean_h_over_t - upsilon(3, 3, 0.3, 0.2)), 3 * st.stderr_);
}

TEST(EstimateRows, FullMatrixAgreesWithSingleRow) {
  const RegimeParams rp{30, 3, 0.2, 0.2, 4};
  const auto st = estimate_rows(rp, 12, 20'000, RngStream(3, "rows-exchangeable"), 1);
  const double joint = std::sqrt(st.stderr_ * st.stderr_ + st.omega_stderr * st.omega_stderr);
  EXPECT_LE(std::abs(st.mean_h_over_t - st.mean_omega_single_row), 3 * joint);
}

TEST(EstimateRows, ScheduleIndependent) {
  const RegimeParams rp{25, 2, 0.2, 0.3, 3};
  const auto a = estimate_rows(rp, 8, 300, RngStream(4), 1);
  const auto b = estimate_rows(rp, 8, 300, RngStream(4), 3);
  EXPECT_EQ(a.mean_h_over_t, b.mean_h_over_t);
  EXPECT_EQ(a.stderr_, b.stderr_);
  EXPECT_EQ(a.mean_omega_single_row, b.mean_omega_single_row);
}

TEST(EstimateRows, Errors) {
  EXPECT_THROW(estimate_rows({20, 3, 0.3, 0.2, 1}, 10, 1, RngStream(5)), DomainError);
  EXPECT_THROW(estimate_rows({200'000, 3, 0.3, 0.2, 1}, 10, 2, RngStream(5)), CapacityExceeded);
}

TEST(EstimateRows, CsvLine) {
  const RegimeParams rp{100, 5, 0.2, 0.1, 3};
  const auto st = estimate_rows(rp, 5, 10, RngStream(6), 1);
  const auto line = row_count_csv_line(st, expectation_bounds(rp, BoundsForm::Simple));
  EXPECT_EQ(row_count_csv_header(), "n,d,p,q,s,trials,mean_h_over_t,stderr,lower,upper,form\n");
  EXPECT_EQ(line.rfind("100,5,0.2,0.1,3,10,", 0), 0U);
  EXPECT_NE(line.find(",simple\n"), std::string::npos);
}

TEST(Recovery, NoErasureCurvesCoincide) {
  auto cfg = small_config();
  cfg.params.q = 0.0;
  cfg.eval_from_samples = false;
  const auto res = recovery_experiment(cfg);
  for (std::size_t k = 0; k < res.rows.size(); k += 2) {
    ASSERT_EQ(res.rows[k].matrix_kind, MatrixKind::Actual);
    ASSERT_EQ(res.rows[k + 1].matrix_kind, MatrixKind::Recovered);
    EXPECT_EQ(res.rows[k].success_rate, res.rows[k + 1].success_rate);
  }
}

TEST(Recovery, ManyTestsSaturateComp) {
  auto cfg = small_config();
  cfg.params = {20, 0, 2, 0.3, 0.1, 5, 18};
  cfg.t_grid = {200};
  cfg.algorithms = {Algorithm::Comp};
  const auto res = recovery_experiment(cfg);
  EXPECT_EQ(res.rows[0].success_rate, 1.0);
}

TEST(Recovery, ReproducibleAcrossWorkerCounts) {
  auto cfg = small_config();
  const auto one = experiment_csv(recovery_experiment(cfg).rows);
  cfg.threads = 3;
  EXPECT_EQ(experiment_csv(recovery_experiment(cfg).rows), one);
}

TEST(Recovery, AddingAlgorithmsDoesNotPerturbOthers) {
  auto cfg = small_config();
  cfg.algorithms = {Algorithm::Scomp};
  const auto alone = recovery_experiment(cfg).rows;
  cfg.algorithms = {Algorithm::Comp, Algorithm::Scomp, Algorithm::Sss};
  const auto all = recovery_experiment(cfg).rows;
  std::size_t matched = 0;
  for (const auto& a : alone) {
    for (const auto& b : all) {
      if (b.t == a.t && b.algorithm == a.algorithm && b.matrix_kind == a.matrix_kind) {
        EXPECT_EQ(b.success_rate, a.success_rate);
        ++matched;
      }
    }
  }
  EXPECT_EQ(matched, alone.size());
}

TEST(Recovery, HierarchyOnActualMatrix) {
  auto cfg = small_config();
  cfg.trials = 200;
  const auto res = recovery_experiment(cfg);
  for (std::size_t t : cfg.t_grid) {
    double rate[3] = {};
    for (const auto& row : res.rows) {
      if (row.t == t && row.matrix_kind == MatrixKind::Actual) rate[static_cast<int>(row.algorithm)] = row.success_rate;
    }
    const double sd = std::sqrt(0.25 / cfg.trials);
    EXPECT_GE(rate[2] + 2 * sd, rate[1]);
    EXPECT_GE(rate[1] + 2 * sd, rate[0]);
  }
}

TEST(Recovery, IndependentEvaluationModeRuns) {
  auto cfg = small_config();
  cfg.eval_from_samples = false;
  const auto res = recovery_experiment(cfg);
  EXPECT_EQ(res.rows.size(), 3U * 3U * 2U);
  for (const auto& st : res.stats) EXPECT_EQ(st.trial_errors, 0U);
}

TEST(Recovery, CsvAndSvg) {
  auto cfg = small_config();
  cfg.algorithms = {Algorithm::Comp};
  cfg.t_grid = {20};
  const auto rows = recovery_experiment(cfg).rows;
  const auto csv = experiment_csv(rows);
  EXPECT_EQ(csv.rfind("t,algorithm,matrix_kind,success_rate,trials,seed\n20,comp,actual,", 0), 0U);
  EXPECT_NE(csv.find("20,comp,recovered,"), std::string::npos);
  const auto svg = experiment_svg(rows);
  EXPECT_EQ(svg.rfind("<svg", 0), 0U);
  EXPECT_NE(svg.find("comp (recovered)"), std::string::npos);
}

TEST(Recovery, ConfigValidation) {
  auto cfg = small_config();
  cfg.t_grid = {};
  EXPECT_THROW(cfg.validate(), DomainError);
  cfg.t_grid = {30, 30};
  EXPECT_THROW(cfg.validate(), DomainError);
  cfg.t_grid = {30};
  cfg.algorithms = {};
  EXPECT_THROW(cfg.validate(), DomainError);
  cfg = small_config();
  cfg.params.s = 100'000;
  EXPECT_THROW(cfg.validate(), InsufficientUniverse);
}

TEST(Recovery, ParseAlgorithm) {
  EXPECT_EQ(parse_algorithm("sss"), Algorithm::Sss);
  EXPECT_THROW(parse_algorithm("dd"), DomainError);
}

TEST(MeanAndStderr, Basic) {
  const auto ms = mean_and_stderr({1, 2, 3, 4});
  EXPECT_DOUBLE_EQ(ms.mean, 2.5);
  EXPECT_NEAR(ms.stderr_, std::sqrt(5.0 / 3.0) / 2.0, 1e-15);
}
