#include "hdcml/planner.h"

#include <cmath>
#include <map>
#include <stdexcept>

#include "hdcml/stats.h"

namespace hdcml {

std::string_view to_string(FailureKind kind) {
  switch (kind) {
    case FailureKind::none: return "none";
    case FailureKind::oscillation: return "oscillation";
    case FailureKind::budget: return "budget";
    case FailureKind::stall: return "stall";
  }
  return "unknown";
}

std::string_view to_string(TargetMode mode) {
  switch (mode) {
    case TargetMode::raw: return "raw";
    case TargetMode::sign: return "sign";
    case TargetMode::recover: return "recover";
  }
  return "unknown";
}

std::optional<TargetMode> parse_target_mode(std::string_view text) {
  if (text == "raw") return TargetMode::raw;
  if (text == "sign") return TargetMode::sign;
  if (text == "recover") return TargetMode::recover;
  return std::nullopt;
}

int default_max_steps(const CmlModel& model) { return 4 * model.node_count(); }

std::optional<int> choose_edge(const CmlModel& model, int node, const Eigen::VectorXd& utility) {
  // Utilities equal up to rounding count as a tie, so the pseudo-inverse's
  // last-bit noise cannot decide between symmetric edges.
  constexpr double kTieTolerance = 1e-9;
  std::optional<int> best;
  for (int c : model.graph().out_edges(node)) {
    if (!best || utility[c] > utility[*best] + kTieTolerance * (1.0 + std::abs(utility[*best]))) best = c;
  }
  return best;
}

std::optional<Edge> find_oscillation(std::span<const int> path) {
  std::map<std::pair<int, int>, int> counts;
  std::optional<Edge> found;
  for (std::size_t i = 1; i < path.size(); ++i) {
    if (++counts[{path[i - 1], path[i]}] >= 3) found = Edge{path[i - 1], path[i]};
  }
  return found;
}

namespace {

void check_node(const CmlModel& model, int node, const char* what) {
  if (node < 0 || node >= model.node_count()) {
    throw std::out_of_range(std::string("plan: ") + what + " index out of range");
  }
}

template <typename ReachedFn>
PlanTrace run_planner(const CmlModel& model, int start, const Hypervector& target,
                      const PlanOptions& options, ReachedFn reached_at) {
  if (target.size() != model.dimension()) throw std::invalid_argument("plan: target dimension mismatch");
  const int max_steps = options.max_steps > 0 ? options.max_steps : default_max_steps(model);
  PlanTrace trace;
  trace.path.push_back(start);
  Hypervector state = model.state(start);
  int node = start;
  bool stalled = false;
  for (int step = 0;; ++step) {
    if (reached_at(node, state)) {
      trace.reached = true;
      break;
    }
    if (step >= max_steps) break;
    const Eigen::VectorXd utility = model.actions_pinv() * (target - state);
    const std::optional<int> choice = choose_edge(model, node, utility);
    PlanStep record{node, {}, {}, choice, {}};
    if (options.record_vectors) {
      record.utility = utility;
      record.gated_utility = model.gating().col(node).cwiseProduct(utility);
      record.state = state;
    }
    trace.steps.push_back(std::move(record));
    if (!choice) {
      stalled = true;
      break;
    }
    state += model.actions().col(*choice);
    node = model.graph().edge(*choice).target;
    trace.path.push_back(node);
    ++trace.step_count;
  }
  if (!trace.reached) {
    trace.oscillating_pair = find_oscillation(trace.path);
    if (stalled) trace.failure = FailureKind::stall;
    else if (trace.oscillating_pair) trace.failure = FailureKind::oscillation;
    else trace.failure = FailureKind::budget;
  }
  return trace;
}

}  // namespace

PlanTrace plan(const CmlModel& model, int start, int target, const PlanOptions& options) {
  check_node(model, start, "start");
  check_node(model, target, "target");
  return run_planner(model, start, model.state(target), options,
                     [target](int node, const Hypervector&) { return node == target; });
}

PlanTrace plan_to_vector(const CmlModel& model, int start, const Hypervector& target,
                         const PlanOptions& options) {
  check_node(model, start, "start");
  const CmlModel::Match target_match = model.best_code_match(target);
  const double phi = model.thresholds().termination;
  return run_planner(model, start, target, options,
                     [&model, &target, target_match, phi](int, const Hypervector& state) {
                       const int cleaned = model.best_state_match(state).node;
                       return cleaned == target_match.node &&
                              cosine_similarity(target, model.codes().col(cleaned)) >= phi;
                     });
}

ModuleTransition module_transition(const CmlModel& model, const Hypervector& target,
                                   int current_node, Thresholds thresholds) {
  const Eigen::VectorXd sims = model.code_similarities(target);
  if (sims.maxCoeff() < thresholds.recognition) return {ModuleAction::unrecognized, current_node};
  Eigen::Index best = 0;
  sims.maxCoeff(&best);
  // The cleaned-up target is the current node: nothing left to do.
  if (sims[current_node] >= thresholds.termination || best == current_node) {
    return {ModuleAction::terminated, current_node};
  }
  const Eigen::VectorXd utility = model.actions_pinv() * (target - model.states().col(current_node));
  const std::optional<int> choice = choose_edge(model, current_node, utility);
  if (!choice) return {ModuleAction::terminated, current_node};
  return {ModuleAction::moved, model.graph().edge(*choice).target};
}

Hypervector module_step(const CmlModel& model, const Hypervector& target,
                        const Hypervector& current, std::optional<Thresholds> thresholds) {
  if (target.size() != model.dimension() || current.size() != model.dimension()) {
    throw std::invalid_argument("module_step: dimension mismatch");
  }
  if (is_zero(current) || is_zero(target)) return zeros(model.dimension());
  const int node = model.best_code_match(current).node;
  const ModuleTransition t = module_transition(model, target, node, thresholds.value_or(model.thresholds()));
  if (t.action == ModuleAction::unrecognized) return zeros(model.dimension());
  return model.code(t.node);
}

SettleResult settle(const CmlModel& model, const Hypervector& target, int start_node,
                    Thresholds thresholds, int max_steps) {
  SettleResult result;
  result.node = start_node;
  if (is_zero(target)) return result;
  for (;;) {
    const ModuleTransition t = module_transition(model, target, result.node, thresholds);
    if (t.action == ModuleAction::unrecognized) return result;
    result.recognized = true;
    if (t.action == ModuleAction::terminated) {
      result.terminated = true;
      return result;
    }
    if (result.steps >= max_steps) return result;
    result.node = t.node;
    ++result.steps;
  }
}

std::vector<PairOutcome> PathSuccess::failures() const {
  std::vector<PairOutcome> out;
  for (const auto& o : outcomes) {
    if (!o.reached) out.push_back(o);
  }
  return out;
}

std::vector<std::pair<int, int>> sample_pairs(int n, int count, Rng& rng) {
  if (n < 2) throw std::invalid_argument("sample_pairs: need at least two nodes");
  std::uniform_int_distribution<int> first(0, n - 1);
  std::uniform_int_distribution<int> other(0, n - 2);
  std::vector<std::pair<int, int>> pairs;
  pairs.reserve(count);
  for (int k = 0; k < count; ++k) {
    const int a = first(rng);
    int b = other(rng);
    if (b >= a) ++b;
    pairs.emplace_back(a, b);
  }
  return pairs;
}

PairOutcome evaluate_pair(const CmlModel& model, int start, int target, TargetMode mode) {
  PlanOptions options;
  options.record_vectors = false;
  PlanTrace trace;
  bool reached = false;
  if (mode == TargetMode::raw) {
    trace = plan(model, start, target, options);
    reached = trace.reached;
  } else if (mode == TargetMode::sign) {
    trace = plan_to_vector(model, start, model.code(target), options);
    reached = trace.reached && trace.path.back() == target;
  } else {
    throw std::invalid_argument("evaluate_pair: single-model path success supports raw and sign");
  }
  FailureKind failure = reached ? FailureKind::none : trace.failure;
  if (!reached && failure == FailureKind::none) failure = FailureKind::budget;
  return {start, target, reached, trace.step_count, failure, trace.oscillating_pair};
}

PathSuccess path_success(const CmlModel& model, std::span<const std::pair<int, int>> pairs,
                         TargetMode mode) {
  if (pairs.empty()) throw std::invalid_argument("path_success: need at least one trial");
  PathSuccess result;
  std::vector<double> hits;
  for (const auto& [start, target] : pairs) {
    result.outcomes.push_back(evaluate_pair(model, start, target, mode));
    hits.push_back(result.outcomes.back().reached ? 1.0 : 0.0);
  }
  result.mean = mean(hits);
  result.std = sample_std(hits);
  return result;
}

PathSuccess path_success(const CmlModel& model, int trials, Rng& rng, TargetMode mode) {
  if (trials < 1) throw std::invalid_argument("path_success: trials must be >= 1");
  const auto pairs = sample_pairs(model.node_count(), trials, rng);
  return path_success(model, pairs, mode);
}

}  // namespace hdcml
