#pragma once

// Utility-driven planning over a trained or calculated CML, and the
// two-input / one-output module interface used for orchestration.

#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "hdcml/cml.h"

namespace hdcml {

enum class FailureKind { none, oscillation, budget, stall };
std::string_view to_string(FailureKind kind);

enum class TargetMode { raw, sign, recover };
std::string_view to_string(TargetMode mode);
std::optional<TargetMode> parse_target_mode(std::string_view text);

struct PlanStep {
  int node;
  Eigen::VectorXd utility;        // empty unless vectors are recorded
  Eigen::VectorXd gated_utility;  // empty unless vectors are recorded
  std::optional<int> choice;      // edge index; empty when holding
  Hypervector state;              // empty unless vectors are recorded
};

struct PlanOptions {
  int max_steps = 0;  // 0 selects 4 * n
  bool record_vectors = true;
};

struct PlanTrace {
  std::vector<PlanStep> steps;
  std::vector<int> path;  // start, then the node after each move
  bool reached = false;
  int step_count = 0;
  FailureKind failure = FailureKind::none;
  std::optional<Edge> oscillating_pair;  // last transition seen >= 3 times
};

int default_max_steps(const CmlModel& model);

// Winner-take-all over the edges leaving `node`: the highest utility, lowest
// index on ties (utilities within 1e-9 relative of each other). The planner always moves, so the winner may have a
// non-positive utility; empty only for a node without out-edges.
std::optional<int> choose_edge(const CmlModel& model, int node, const Eigen::VectorXd& utility);

// Ordered transition (a -> b) taken at least three times, if any; the most
// recent such transition is returned.
std::optional<Edge> find_oscillation(std::span<const int> path);

// Plans from `start` towards the state column of `target`, iterating
// u = A+ (s* - s_t), c = WTA(g (.) u), s_{t+1} = s_t + A c.
PlanTrace plan(const CmlModel& model, int start, int target, const PlanOptions& options = {});

// Same loop towards an arbitrary target vector. Reached when the cleaned-up
// current node is the target's best match and its similarity reaches the
// termination threshold.
PlanTrace plan_to_vector(const CmlModel& model, int start, const Hypervector& target,
                         const PlanOptions& options = {});

enum class ModuleAction { unrecognized, terminated, moved };

struct ModuleTransition {
  ModuleAction action;
  int node;  // node after the transition (unchanged unless moved)
};

// One module evaluation from a known current node. Terminates when the
// current node reaches the termination threshold or is already the target's
// best match.
ModuleTransition module_transition(const CmlModel& model, const Hypervector& target,
                                   int current_node, Thresholds thresholds);

// The module interface: (target, current) -> next node state (bipolar), or
// the zeros vector when the target is not recognized or the current state
// is empty.
Hypervector module_step(const CmlModel& model, const Hypervector& target,
                        const Hypervector& current,
                        std::optional<Thresholds> thresholds = std::nullopt);

struct SettleResult {
  bool recognized = false;
  bool terminated = false;
  int node = 0;
  int steps = 0;
};

// Feeds the module its own output until it terminates (or the budget runs out).
SettleResult settle(const CmlModel& model, const Hypervector& target, int start_node,
                    Thresholds thresholds, int max_steps);

struct PairOutcome {
  int start;
  int target;
  bool reached;
  int steps;
  FailureKind failure;
  std::optional<Edge> oscillating_pair;
};

struct PathSuccess {
  double mean = 0.0;
  double std = 0.0;  // sample std of the per-pair 0/1 outcomes
  std::vector<PairOutcome> outcomes;
  std::vector<PairOutcome> failures() const;
};

// Uniform (start, target) pairs with start != target.
std::vector<std::pair<int, int>> sample_pairs(int n, int count, Rng& rng);

// raw: plan to the target's state column. sign: plan to sgn of that column
// and require arriving at the target node.
PairOutcome evaluate_pair(const CmlModel& model, int start, int target, TargetMode mode);
PathSuccess path_success(const CmlModel& model, std::span<const std::pair<int, int>> pairs,
                         TargetMode mode);
PathSuccess path_success(const CmlModel& model, int trials, Rng& rng, TargetMode mode);

}  // namespace hdcml
