#include <cmath>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "gammagof/power_study.hpp"

using namespace gammagof;

namespace {

StudyConfig small_config() {
  std::istringstream in(R"(# tiny study
sample_sizes = 20
alternatives = gamma:1, weibull:3   # null and one alternative
statistics = gn:1, ks
mc_reps = 20
b = 40
alpha = 0.05
seed = 17
estimator = mle-approx
)");
  return parse_study_config(in);
}

}  // namespace

TEST(Config, ParsesGrammar) {
  const auto cfg = small_config();
  ASSERT_EQ(cfg.sample_sizes.size(), 1u);
  EXPECT_EQ(cfg.sample_sizes[0], 20u);
  ASSERT_EQ(cfg.alternatives.size(), 2u);
  EXPECT_EQ(cfg.alternatives[1], AlternativeSpec(Family::Weibull, 3.0));
  ASSERT_EQ(cfg.statistics.size(), 2u);
  EXPECT_EQ(cfg.statistics[1].kind, StatisticKind::KS);
  EXPECT_EQ(cfg.mc_reps, 20u);
  EXPECT_EQ(cfg.b, 40u);
  EXPECT_EQ(cfg.seed, 17u);
}

TEST(Config, ContinuationLines) {
  std::istringstream in("sample_sizes = 20,  # first\n  50\nalternatives = gamma:1,\n\n  lfr:2 # tail\n");
  const auto cfg = parse_study_config(in);
  EXPECT_EQ(cfg.sample_sizes, (std::vector<std::size_t>{20, 50}));
  ASSERT_EQ(cfg.alternatives.size(), 2u);
  EXPECT_EQ(cfg.alternatives[1], AlternativeSpec(Family::LinearFailureRate, 2.0));
}

TEST(Config, ShippedConfigsLoad) {
  for (const char* name : {"tables.conf", "desk.conf", "smoke.conf"}) {
    const auto cfg = load_study_config(std::string(GAMMAGOF_CONFIG_DIR) + "/" + name);
    EXPECT_FALSE(cfg.alternatives.empty()) << name;
    EXPECT_FALSE(cfg.statistics.empty()) << name;
  }
  const auto full = load_study_config(std::string(GAMMAGOF_CONFIG_DIR) + "/tables.conf");
  EXPECT_EQ(full.alternatives.size(), 23u);
  EXPECT_EQ(full.statistics.size(), 14u);
}

TEST(Config, RejectsBadInput) {
  std::istringstream unknown("sample_sizes = 20\nalternatives = gamma:1\nfoo = 1\n");
  EXPECT_THROW(parse_study_config(unknown), ParseError);
  std::istringstream bad_alt("sample_sizes = 20\nalternatives = cauchy:1\n");
  EXPECT_THROW(parse_study_config(bad_alt), ParseError);
  std::istringstream no_eq("sample_sizes 20\n");
  EXPECT_THROW(parse_study_config(no_eq), ParseError);
  std::istringstream small_b("sample_sizes = 20\nalternatives = gamma:1\nb = 5\n");
  EXPECT_THROW(parse_study_config(small_b), ParseError);
}

TEST(PowerStudy, DeterministicAcrossWorkerCounts) {
  auto cfg = small_config();
  const auto a = run_power_study(cfg);
  cfg.workers = 3;
  const auto b = run_power_study(cfg);
  ASSERT_EQ(a.size(), 1u);
  EXPECT_TRUE(a[0] == b[0]);
  EXPECT_EQ(power_table_csv(a[0]), power_table_csv(b[0]));
}

TEST(PowerStudy, CellsAreValidPercentages) {
  const auto t = run_power_study(small_config())[0];
  for (const auto& row : t.cells) {
    for (const auto& cell : row) {
      EXPECT_GE(cell.percent, 0.0);
      EXPECT_LE(cell.percent, 100.0);
      EXPECT_EQ(cell.completed + cell.failures, t.mc_reps);
      const double p = cell.percent / 100.0;
      EXPECT_NEAR(cell.std_error, 100.0 * std::sqrt(p * (1 - p) / t.mc_reps), 1e-12);
    }
  }
}

TEST(PowerStudy, SingleReplicationGivesZeroOrHundred) {
  auto cfg = small_config();
  cfg.mc_reps = 1;
  const auto t = run_power_study(cfg)[0];
  for (const auto& row : t.cells) {
    for (const auto& cell : row) EXPECT_TRUE(cell.percent == 0.0 || cell.percent == 100.0);
  }
}

TEST(PowerTableCsv, RoundTrip) {
  const auto t = run_power_study(small_config())[0];
  const auto parsed = parse_power_table_csv(power_table_csv(t));
  EXPECT_TRUE(parsed == t);
}

TEST(PowerTableCsv, EmptyStatisticsGiveHeaderOnly) {
  auto cfg = small_config();
  cfg.statistics.clear();
  const auto t = run_power_study(cfg)[0];
  EXPECT_EQ(power_table_csv(t), std::string(kPowerCsvHeader) + "\n");
}

TEST(PowerTableCsv, ColumnOrderFollowsConfig) {
  auto cfg = small_config();
  cfg.statistics = {parse_statistic("ks"), parse_statistic("gn:1"), parse_statistic("ad")};
  cfg.alternatives = {AlternativeSpec(Family::Gamma, 1.0)};
  const auto t = run_power_study(cfg)[0];
  const auto csv = power_table_csv(t);
  EXPECT_LT(csv.find(",ks,"), csv.find(",gn:1,"));
  EXPECT_LT(csv.find(",gn:1,"), csv.find(",ad,"));
  const auto text = power_table_text(t);
  EXPECT_LT(text.find("ks"), text.find("gn:1"));
  EXPECT_NE(text.find("Gamma(1)"), std::string::npos);
}

TEST(PowerStudy, InvalidCellsAreFlagged) {
  PowerCell cell;
  cell.failures = 2;
  cell.completed = 998;
  finish_cell(cell, 1000);
  EXPECT_FALSE(cell.valid);
  EXPECT_FALSE(cell.note.empty());
  PowerCell ok;
  ok.failures = 1;
  ok.completed = 999;
  finish_cell(ok, 1000);
  EXPECT_TRUE(ok.valid);
}

TEST(PowerStudy, NullRowsControlSize) {
  std::istringstream in(R"(
sample_sizes = 20
alternatives = gamma:0.25, gamma:1, gamma:10
statistics = gn:0.1, gn:1, gn:3, t1:1, t2:4, ks, cm, ad, wa
mc_reps = 1000
b = 200
seed = 29
)");
  const auto table = run_power_study(parse_study_config(in)).front();
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
      const auto& cell = table.cells[r][c];
      const double se = 100.0 * std::sqrt(0.05 * 0.95 / 1000.0);
      EXPECT_LE(cell.percent, 5.0 + 3.0 * se) << alternative_label(table.rows[r]) << " "
                                              << format_statistic(table.columns[c]);
    }
  }
}

TEST(PowerStudy, PowerGrowsWithSampleSize) {
  std::istringstream in(R"(
sample_sizes = 20, 50
alternatives = weibull:3
statistics = gn:0.1, gn:0.5, gn:1, gn:3, t1:1, t2:4, ks, cm, ad, wa
mc_reps = 1000
b = 200
seed = 31
)");
  const auto tables = run_power_study(parse_study_config(in));
  for (std::size_t c = 0; c < tables[0].columns.size(); ++c) {
    const auto& small = tables[0].cells[0][c];
    const auto& large = tables[1].cells[0][c];
    const double se = std::hypot(small.std_error, large.std_error);
    EXPECT_GE(large.percent, small.percent - 2.0 * se) << format_statistic(tables[0].columns[c]);
  }
}
