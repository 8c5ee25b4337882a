#include <gtest/gtest.h>

#include <algorithm>
#include <atomic>
#include <set>
#include <sstream>

#include <json.hpp>

#include "hdcml/experiments.h"
#include "hdcml/report.h"
#include "hdcml/stats.h"

namespace hdcml {
namespace {

TrialConfig small_config() {
  TrialConfig cfg;
  cfg.trials = 4;
  cfg.pairs = 6;
  cfg.dimension = 600;
  cfg.rings.calculated = true;
  return cfg;
}

bool same_records(const std::vector<TrialReport>& a, const std::vector<TrialReport>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].method != b[i].method || a[i].mode != b[i].mode) return false;
    if (a[i].success.mean != b[i].success.mean || a[i].success.std != b[i].success.std) return false;
    for (std::size_t t = 0; t < a[i].per_trial.size(); ++t) {
      const TrialRecord& x = a[i].per_trial[t];
      const TrialRecord& y = b[i].per_trial[t];
      if (x.success != y.success || x.mean_steps != y.mean_steps || x.similarity != y.similarity ||
          x.failures.size() != y.failures.size()) {
        return false;
      }
    }
  }
  return true;
}

TEST(ForEachTrial, VisitsEveryIndexOnce) {
  for (Execution e : {Execution::serial, Execution::parallel}) {
    std::vector<std::atomic<int>> hits(37);
    for_each_trial(37, e, 3, [&](int t) { hits[t]++; });
    for (const auto& h : hits) EXPECT_EQ(h.load(), 1);
  }
}

TEST(ForEachTrial, RethrowsTrialException) {
  for (Execution e : {Execution::serial, Execution::parallel}) {
    EXPECT_THROW(for_each_trial(8, e, 2,
                                [](int t) {
                                  if (t == 5) throw std::runtime_error("trial 5");
                                }),
                 std::runtime_error);
  }
}

TEST(TrialConfig, Validation) {
  TrialConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  cfg.trials = 0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg = TrialConfig{};
  cfg.thresholds.recognition = 1.5;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg = TrialConfig{};
  cfg.pairs = 0;
  EXPECT_THROW(run_table2(cfg), std::invalid_argument);
}

TEST(Table2, SerialAndParallelAgreeBitForBit) {
  TrialConfig cfg = small_config();
  cfg.execution = Execution::serial;
  const auto serial = run_table2(cfg);
  cfg.execution = Execution::parallel;
  cfg.threads = 3;
  const auto parallel = run_table2(cfg);
  EXPECT_TRUE(same_records(serial, parallel));
  EXPECT_EQ(to_csv(serial), to_csv(parallel));
}

TEST(Table2, ReportShapeAndAggregates) {
  const auto reports = run_table2(small_config());
  ASSERT_EQ(reports.size(), 8u);
  std::set<std::pair<std::string, TargetMode>> cells;
  for (const auto& r : reports) {
    cells.insert({r.method, r.mode});
    EXPECT_EQ(r.table, "II");
    ASSERT_EQ(r.per_trial.size(), 4u);
    std::vector<double> values;
    for (const auto& t : r.per_trial) {
      EXPECT_EQ(t.attempts, 6);
      EXPECT_DOUBLE_EQ(t.success, t.solved / 6.0);
      EXPECT_EQ(static_cast<int>(t.failures.size()), t.attempts - t.solved);
      values.push_back(t.success);
    }
    EXPECT_DOUBLE_EQ(r.success.mean, mean(values));
    EXPECT_DOUBLE_EQ(r.success.std, sample_std(values));
  }
  EXPECT_EQ(cells.size(), 8u);
  EXPECT_TRUE(find_report(reports, "rand_composite", TargetMode::sign));
  EXPECT_FALSE(find_report(reports, "mapping", TargetMode::raw));
}

TEST(Table2, DifferentSeedsGiveDifferentTrials) {
  TrialConfig b = small_config();
  b.master_seed = 2;
  auto steps = [](const std::vector<TrialReport>& reports) {
    std::vector<double> out;
    for (const auto& r : reports) {
      for (const auto& t : r.per_trial) out.push_back(t.mean_steps);
    }
    return out;
  };
  EXPECT_NE(steps(run_table2(small_config())), steps(run_table2(b)));
}

TEST(Table3, SerialAndParallelAgreeAndShape) {
  TrialConfig cfg = small_config();
  cfg.trials = 2;
  cfg.pairs = 3;
  cfg.execution = Execution::serial;
  const auto serial = run_table3(cfg);
  cfg.execution = Execution::parallel;
  const auto parallel = run_table3(cfg);
  EXPECT_TRUE(same_records(serial, parallel));
  ASSERT_EQ(serial.size(), 12u);
  for (const auto& r : serial) {
    EXPECT_EQ(r.table, "III");
    const int attempts = (r.method == "monolithic" || r.method == "partial") ? 1 : 3;
    for (const auto& t : r.per_trial) EXPECT_EQ(t.attempts, attempts);
  }
}

TEST(Aggregate, RecomputesFromRecords) {
  TrialReport r;
  r.per_trial.resize(3);
  r.per_trial[0].success = 1.0;
  r.per_trial[1].success = 0.5;
  r.per_trial[2].success = 0.0;
  r.per_trial[0].similarity = 0.3;
  r.per_trial[2].similarity = 0.5;
  r.aggregate();
  EXPECT_DOUBLE_EQ(r.success.mean, 0.5);
  EXPECT_DOUBLE_EQ(r.success.std, 0.5);
  ASSERT_TRUE(r.similarity);
  EXPECT_DOUBLE_EQ(r.similarity->mean, 0.4);
}

TEST(FailureCensus, GroupsOscillationsByUnorderedPair) {
  const GraphTopology g = toh_graph();
  const int a = *g.find_label("133");
  const int b = *g.find_label("233");
  const int c = *g.find_label("122");
  const int d = *g.find_label("123");
  TrialReport r;
  r.per_trial.resize(2);
  r.per_trial[0].failures.push_back({0, 1, "oscillation", Edge{a, b}});
  r.per_trial[0].failures.push_back({0, 2, "oscillation", Edge{b, a}});
  r.per_trial[1].failures.push_back({0, 3, "oscillation", Edge{c, d}});
  r.per_trial[1].failures.push_back({0, 4, "budget", std::nullopt});
  const FailureCensus census = failure_census(r, g);
  EXPECT_EQ(census.failures, 4);
  EXPECT_EQ(census.oscillations, 3);
  EXPECT_EQ(census.by_pair.at(NodePair{"133", "233"}), 2);
  EXPECT_EQ(census.by_pair.at(NodePair{"122", "123"}), 1);
  EXPECT_EQ(census.outside_corners, 2);
  EXPECT_FALSE(census.all_in_corners());
  EXPECT_TRUE(failure_census(TrialReport{}, g).all_in_corners());
}

TEST(CompositeSimilarityStats, MatchesHandCount) {
  Rng rng = derive_stream(5, {stream_tag("composite-stats")});
  const auto designated = random_designated(2000, rng);
  const CompositeSimilarity s = composite_similarity(designated);
  EXPECT_NEAR(s.component, 0.5, 0.02);
  EXPECT_NEAR(s.pairwise, 6.0 / 26.0, 0.02);
}

TEST(SignSimilarity, BipolarStatesGiveOne) {
  Rng rng = derive_stream(5, {stream_tag("sign-sim")});
  Matrix s(300, 27);
  for (int i = 0; i < 27; ++i) s.col(i) = random_bipolar(300, rng);
  EXPECT_NEAR(mean_sign_similarity(CmlModel::from_states(toh_graph(), s)), 1.0, 1e-12);
}

TEST(Report, CsvLayout) {
  const auto reports = run_table2(small_config());
  std::istringstream csv(to_csv(reports));
  std::string line;
  std::getline(csv, line);
  EXPECT_EQ(line, "table,method,mode,mean,std,trials,seed");
  int rows = 0;
  while (std::getline(csv, line)) {
    ++rows;
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), 6) << line;
    EXPECT_EQ(line.substr(0, 3), "II,");
    EXPECT_EQ(line.substr(line.size() - 4), ",4,1");
  }
  EXPECT_EQ(rows, 8);
}

TEST(Report, StructuredDocumentCarriesRecords) {
  const TrialConfig cfg = small_config();
  const auto reports = run_table2(cfg);
  const auto verdicts = compare(reports, table2_reference());
  const auto doc = nlohmann::json::parse(to_structured(reports, cfg, verdicts));
  EXPECT_EQ(doc["config"]["trials"], 4);
  EXPECT_EQ(doc["reports"].size(), 8u);
  EXPECT_EQ(doc["reports"][0]["per_trial"].size(), 4u);
  EXPECT_EQ(doc["verdicts"].size(), 8u);
}

TEST(Report, CompareUsesBands) {
  TrialReport r;
  r.table = "II";
  r.method = "baseline";
  r.mode = TargetMode::raw;
  r.success = {0.85, 0.04};
  TrialReport s = r;
  s.mode = TargetMode::sign;
  s.success = {0.999, 0.01};
  const auto verdicts = compare({r, s}, table2_reference());
  ASSERT_EQ(verdicts.size(), 8u);
  EXPECT_TRUE(verdicts[0].pass);
  EXPECT_FALSE(verdicts[1].pass);
  EXPECT_FALSE(verdicts[2].present);
  EXPECT_FALSE(all_pass(verdicts));
  EXPECT_NE(side_by_side(verdicts).find("FAIL"), std::string::npos);
}

TEST(Report, ReferenceBandsFollowMeanPlusStdPlusSlack) {
  for (const auto& cell : table3_reference()) {
    if (cell.quantity != Quantity::similarity) continue;
    ASSERT_TRUE(cell.reference_std);
    EXPECT_NEAR(cell.low, cell.reference_mean - *cell.reference_std - 0.02, 1e-12);
    EXPECT_NEAR(cell.high, cell.reference_mean + *cell.reference_std + 0.02, 1e-12);
  }
  EXPECT_EQ(table3_reference().size(), 16u);
}

TEST(Trace, LineFormat) {
  OrchestrationRun run;
  run.method = Method::composite;
  run.mode = TargetMode::sign;
  run.boards = {"111", "112"};
  OrchestrationStep step;
  step.board = "111";
  step.similarity = 0.5;
  step.responding = {2};
  run.steps.push_back(step);
  run.status = RunStatus::solved;
  EXPECT_EQ(format_trace(run, 3, 1000),
            "# method=composite mode=sign seed=3 dimension=1000\n"
            "step board similarity responding mode\n"
            "0 111 0.5000 S sign\n"
            "# boards=111,112 status=solved\n");
}

}  // namespace
}  // namespace hdcml
