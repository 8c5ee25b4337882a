#pragma once

// Seeded trial runner for the single-CML and ring-orchestration experiments.
// Every trial draws from its own stream derived from (master seed, table
// tag, trial index), so reports do not depend on how trials are scheduled.

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hdcml/toh_orchestration.h"

namespace hdcml {

enum class Execution { serial, parallel };

struct TrialConfig {
  std::uint64_t master_seed = 1;
  int trials = 50;
  int pairs = 50;  // random (start, target) pairs per trial
  int dimension = kDefaultDimension;
  Thresholds thresholds{};
  Thresholds composite_thresholds = kCompositeThresholds;
  RingOptions rings{};
  Execution execution = Execution::parallel;
  int threads = 0;  // 0 leaves the OpenMP default

  void validate() const;
};

// Runs body(0..trials-1), in parallel when asked. The first exception thrown
// by any trial is rethrown after all trials finish.
void for_each_trial(int trials, Execution execution, int threads, const std::function<void(int)>& body);

struct FailureRecord {
  int start = 0;
  int target = 0;
  std::string kind;  // FailureKind or RunStatus name
  std::optional<Edge> oscillating_pair;
};

struct TrialRecord {
  int trial = 0;
  double success = 0.0;  // fraction of attempts solved in this trial
  int attempts = 0;
  int solved = 0;
  double mean_steps = 0.0;
  std::vector<FailureRecord> failures;
  std::optional<double> similarity;  // mean similarity of the broadcast to its target
};

struct Summary {
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation across trials
};

struct TrialReport {
  std::string table;   // "II" or "III"
  std::string method;  // baseline, composite, rand, rand_composite, monolithic, ...
  TargetMode mode = TargetMode::raw;
  std::uint64_t master_seed = 0;
  std::vector<TrialRecord> per_trial;
  Summary success;
  std::optional<Summary> similarity;

  // Recomputes the aggregates from per_trial.
  void aggregate();
};

// Rows C_T (baseline), C_Sigma (composite), Rand, Rand-composite, each in raw
// and sign mode: eight reports.
std::vector<TrialReport> run_table2(const TrialConfig& cfg);

// Monolithic, partial, mapping and composite orchestration in raw, sign and
// recover mode: twelve reports.
std::vector<TrialReport> run_table3(const TrialConfig& cfg);

const TrialReport* find_report(const std::vector<TrialReport>& reports, std::string_view method,
                               TargetMode mode);

using NodePair = std::pair<std::string, std::string>;  // labels, sorted

// Oscillating node pairs of the ToH sub-triangle corners.
const std::array<NodePair, 3>& corner_pairs();

struct FailureCensus {
  int failures = 0;
  int oscillations = 0;
  std::map<NodePair, int> by_pair;  // oscillations grouped by unordered pair
  int outside_corners = 0;          // failures that are not a corner oscillation
  bool all_in_corners() const { return outside_corners == 0; }
};

FailureCensus failure_census(const TrialReport& report, const GraphTopology& graph);

// Mean over nodes of similarity(s_i, sgn(s_i)).
double mean_sign_similarity(const CmlModel& model);

struct CompositeSimilarity {
  double component = 0.0;  // mean similarity(t_ijk, each of l_i, m_j, s_k)
  double pairwise = 0.0;   // mean similarity(t_a, t_b), a != b
};
CompositeSimilarity composite_similarity(const std::array<std::array<Hypervector, 3>, kRingCount>& designated);

// Random bipolar stand-ins for the nine designated ring codes.
std::array<std::array<Hypervector, 3>, kRingCount> random_designated(int d, Rng& rng);

// One orchestrated 111 -> 222 solve, as shown in the appendix traces.
OrchestrationRun appendix_run(Method method, TargetMode mode, std::uint64_t seed, int dimension,
                              const RingOptions& rings = {});

}  // namespace hdcml
