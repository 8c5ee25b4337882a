#include "hdcml/toh_orchestration.h"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace hdcml {

char ring_letter(int ring) {
  static constexpr char letters[] = {'L', 'M', 'S'};
  if (ring < 0 || ring >= kRingCount) throw std::out_of_range("ring index");
  return letters[ring];
}

RingSystem::RingSystem(std::vector<CmlModel> rings,
                       std::array<std::array<int, 3>, kRingCount> designated)
    : rings_(std::move(rings)), designated_(designated) {
  if (rings_.size() != kRingCount) throw std::invalid_argument("RingSystem: need three rings");
  for (int r = 0; r < kRingCount; ++r) {
    const CmlModel& m = rings_[r];
    if (m.dimension() != rings_[0].dimension()) throw std::invalid_argument("RingSystem: dimension mismatch");
    for (int k = 0; k < 3; ++k) {
      if (designated_[r][k] < 0 || designated_[r][k] >= m.node_count()) {
        throw std::invalid_argument("RingSystem: designated node out of range");
      }
      for (int j = 0; j < k; ++j) {
        if (designated_[r][j] == designated_[r][k]) throw std::invalid_argument("RingSystem: designated nodes repeat");
      }
    }
    for (int i = 0; i < m.node_count(); ++i) codebooks_[r].add(std::to_string(i), m.code(i));
    for (int peg = 1; peg <= 3; ++peg) {
      designated_dict_.add(std::string(1, ring_letter(r)) + std::to_string(peg), designated_code(r, peg));
    }
  }
}

Hypervector RingSystem::designated_code(int r, int peg) const {
  return rings_[r].code(designated_node(r, peg));
}

int RingSystem::peg_of(int r, int node) const {
  for (int k = 0; k < 3; ++k) {
    if (designated_[r][k] == node) return k + 1;
  }
  return 0;
}

namespace {

bool plans_all_pairs(const CmlModel& model) {
  for (int a = 0; a < model.node_count(); ++a) {
    for (int b = 0; b < model.node_count(); ++b) {
      if (a == b) continue;
      if (!evaluate_pair(model, a, b, TargetMode::raw).reached) return false;
      if (!evaluate_pair(model, a, b, TargetMode::sign).reached) return false;
    }
  }
  return true;
}

std::optional<CmlModel> build_ring(int d, Rng& rng, const RingOptions& options) {
  const GraphTopology g = random_connected_graph(options.nodes, options.undirected_edges, rng);
  std::optional<CmlModel> model;
  if (options.calculated) {
    Matrix states(d, options.nodes);
    for (int i = 0; i < options.nodes; ++i) states.col(i) = random_bipolar(d, rng);
    try {
      model = CmlModel::from_states(g, states, options.thresholds);
    } catch (const std::invalid_argument&) {
      return std::nullopt;
    }
  } else {
    try {
      model = CmlModel::train(g, d, rng, options.train, options.thresholds);
    } catch (const TrainingError&) {
      return std::nullopt;
    }
  }
  if (!plans_all_pairs(*model)) return std::nullopt;
  return model;
}

}  // namespace

RingSystem build_ring_system(int d, Rng& rng, const RingOptions& options) {
  if (options.nodes < 3) throw std::invalid_argument("build_ring_system: rings need at least 3 nodes");
  for (int attempt = 0; attempt < options.max_attempts; ++attempt) {
    std::vector<CmlModel> rings;
    for (int r = 0; r < kRingCount; ++r) {
      auto ring = build_ring(d, rng, options);
      if (!ring) break;
      rings.push_back(std::move(*ring));
    }
    if (static_cast<int>(rings.size()) != kRingCount) continue;

    std::array<std::array<int, 3>, kRingCount> designated{};
    for (int r = 0; r < kRingCount; ++r) {
      std::vector<int> nodes(options.nodes);
      std::iota(nodes.begin(), nodes.end(), 0);
      for (int k = 0; k < 3; ++k) {
        std::uniform_int_distribution<int> pick(k, options.nodes - 1);
        std::swap(nodes[k], nodes[pick(rng)]);
        designated[r][k] = nodes[k];
      }
    }
    RingSystem rs(std::move(rings), designated);
    const auto& entries = rs.designated_dictionary().entries();
    bool orthogonal = true;
    for (std::size_t i = 0; i < entries.size() && orthogonal; ++i) {
      for (std::size_t j = i + 1; j < entries.size(); ++j) {
        if (std::abs(cosine_similarity(entries[i].vector, entries[j].vector)) >=
            options.thresholds.recognition) {
          orthogonal = false;
          break;
        }
      }
    }
    if (orthogonal) return rs;
  }
  throw std::runtime_error("build_ring_system: no acceptable ring system after " +
                           std::to_string(options.max_attempts) + " attempts");
}

const std::vector<RingMove>& canonical_moves() {
  static const std::vector<RingMove> moves = {{2, 2}, {1, 3}, {2, 3}, {0, 2}, {2, 1}, {1, 2}, {2, 2}};
  return moves;
}

std::vector<std::string> canonical_boards() {
  std::vector<std::string> boards;
  TohState s;
  boards.push_back(s.label());
  for (const RingMove& m : canonical_moves()) {
    s.set_peg(m.ring, m.peg);
    boards.push_back(s.label());
  }
  return boards;
}

namespace {

// Designated code visited by canonical move k (k = -1 is the start).
Hypervector move_code(const RingSystem& rs, int k) {
  const RingMove& m = canonical_moves()[k];
  return rs.designated_code(m.ring, m.peg);
}

}  // namespace

Hypervector build_monolithic_policy(const RingSystem& rs, Rng& rng) {
  const auto& moves = canonical_moves();
  std::vector<Hypervector> terms;
  terms.push_back(move_code(rs, 0));
  for (int k = 1; k < static_cast<int>(moves.size()); ++k) {
    terms.push_back(permute(bind(move_code(rs, k - 1), move_code(rs, k)), k));
  }
  return bundle(terms, rng);
}

std::array<Hypervector, kRingCount> build_partial_policies(const RingSystem& rs, Rng& rng) {
  const auto& moves = canonical_moves();
  std::array<std::vector<Hypervector>, kRingCount> terms;
  for (int k = 0; k < static_cast<int>(moves.size()); ++k) {
    Hypervector response = permute(move_code(rs, k), 1);
    if (k > 0) response = bind(move_code(rs, k - 1), response);
    terms[moves[k].ring].push_back(std::move(response));
  }
  std::array<Hypervector, kRingCount> policies;
  for (int r = 0; r < kRingCount; ++r) policies[r] = bundle(terms[r], rng);
  return policies;
}

std::array<Hypervector, kRingCount> build_maps(const CmlModel& ct, const RingSystem& rs, Rng& rng) {
  if (ct.node_count() != 27) throw std::invalid_argument("build_maps: expected a 27-node ToH model");
  if (ct.dimension() != rs.dimension()) throw std::invalid_argument("build_maps: dimension mismatch");
  std::array<Hypervector, kRingCount> maps;
  for (int r = 0; r < kRingCount; ++r) {
    std::vector<Hypervector> terms;
    for (int node = 0; node < 27; ++node) {
      const TohState s = TohState::from_index(node);
      terms.push_back(bind(ct.code(node), rs.designated_code(r, s.peg(r))));
    }
    maps[r] = bundle(terms, rng);
  }
  return maps;
}

Matrix composite_states(const std::array<std::array<Hypervector, 3>, kRingCount>& designated) {
  const Eigen::Index d = designated[0][0].size();
  Matrix t(d, 27);
  for (int node = 0; node < 27; ++node) {
    const TohState s = TohState::from_index(node);
    t.col(node) = sign(designated[0][s.large - 1] + designated[1][s.medium - 1] + designated[2][s.small - 1]);
  }
  return t;
}

Matrix composite_states(const RingSystem& rs) {
  std::array<std::array<Hypervector, 3>, kRingCount> designated;
  for (int r = 0; r < kRingCount; ++r) {
    for (int peg = 1; peg <= 3; ++peg) designated[r][peg - 1] = rs.designated_code(r, peg);
  }
  return composite_states(designated);
}

CmlModel build_composite(const RingSystem& rs, Thresholds thresholds) {
  return CmlModel::from_states(toh_graph(), composite_states(rs), thresholds);
}

std::string_view to_string(Method method) {
  switch (method) {
    case Method::monolithic: return "monolithic";
    case Method::partial: return "partial";
    case Method::mapping: return "mapping";
    case Method::composite: return "composite";
  }
  return "unknown";
}

std::optional<Method> parse_method(std::string_view text) {
  for (Method m : {Method::monolithic, Method::partial, Method::mapping, Method::composite}) {
    if (text == to_string(m)) return m;
  }
  return std::nullopt;
}

std::string_view to_string(RunStatus status) {
  switch (status) {
    case RunStatus::solved: return "solved";
    case RunStatus::wrong_board: return "wrong_board";
    case RunStatus::ambiguous: return "ambiguous";
    case RunStatus::stalled: return "stalled";
    case RunStatus::planner_failed: return "planner_failed";
    case RunStatus::budget: return "budget";
  }
  return "unknown";
}

std::optional<double> OrchestrationRun::mean_similarity() const {
  double sum = 0.0;
  int count = 0;
  for (const auto& s : steps) {
    if (s.similarity) {
      sum += *s.similarity;
      ++count;
    }
  }
  if (count == 0) return std::nullopt;
  return sum / count;
}

RingState RingState::at_board(const RingSystem& rs, const TohState& board) {
  RingState state;
  for (int r = 0; r < kRingCount; ++r) state.nodes[r] = rs.designated_node(r, board.peg(r));
  return state;
}

std::string RingState::board(const RingSystem& rs) const {
  std::string label(kRingCount, '0');
  for (int r = 0; r < kRingCount; ++r) label[r] = static_cast<char>('0' + rs.peg_of(r, nodes[r]));
  return label;
}

RingResponse ring_response(const CmlModel& ring, const Hypervector& target, int current,
                           Thresholds thresholds) {
  const SettleResult settled = settle(ring, target, current, thresholds, default_max_steps(ring));
  RingResponse response;
  response.recognized = settled.recognized;
  response.node = settled.node;
  response.moved = settled.node != current;
  return response;
}

namespace {

// Query after the mode's post-processing; recovery falls back to zeros.
Hypervector post_process(const Hypervector& query, TargetMode mode, const Dictionary& dict,
                         double recover_threshold) {
  switch (mode) {
    case TargetMode::raw: return query;
    case TargetMode::sign: return sign(query);
    case TargetMode::recover: {
      const auto hit = recover(query, dict, recover_threshold);
      return hit ? hit->vector : zeros(static_cast<int>(query.size()));
    }
  }
  return query;
}

Dictionary all_ring_codes(const RingSystem& rs) {
  Dictionary dict;
  for (int r = 0; r < kRingCount; ++r) {
    for (const auto& entry : rs.codebook(r).entries()) {
      dict.add(std::string(1, ring_letter(r)) + entry.label, entry.vector);
    }
  }
  return dict;
}

// Applies the responses of one step. Returns the summed response vector.
Hypervector apply_responses(const RingSystem& rs, RingState& state,
                            const std::array<RingResponse, kRingCount>& responses,
                            OrchestrationStep& step) {
  Hypervector sum = zeros(rs.dimension());
  for (int r = 0; r < kRingCount; ++r) {
    if (!responses[r].moved) continue;
    state.nodes[r] = responses[r].node;
    sum += rs.ring(r).code(responses[r].node);
    step.responding.push_back(r);
  }
  return sum;
}

}  // namespace

OrchestrationRun run_monolithic(const RingSystem& rs, const Hypervector& policy, TargetMode mode,
                                const RunOptions& options) {
  OrchestrationRun run;
  run.method = Method::monolithic;
  run.mode = mode;
  const auto expected = canonical_boards();
  const auto& moves = canonical_moves();
  const Dictionary dict = all_ring_codes(rs);
  const double theta = rs.ring(0).thresholds().recognition;

  RingState state = RingState::at_board(rs, TohState{});
  run.boards.push_back(state.board(rs));
  Hypervector r = ones(rs.dimension());
  for (int t = 0; t < options.max_steps; ++t) {
    OrchestrationStep step;
    step.step = t;
    step.board = run.boards.back();
    step.ring_nodes = state.nodes;
    const Hypervector query = bind(r, permute(policy, -t));
    if (t < static_cast<int>(moves.size())) step.similarity = cosine_similarity(query, move_code(rs, t));
    const Hypervector target = post_process(query, mode, dict, theta);
    std::array<RingResponse, kRingCount> responses;
    for (int k = 0; k < kRingCount; ++k) {
      responses[k] = ring_response(rs.ring(k), target, state.nodes[k], rs.ring(k).thresholds());
    }
    r = apply_responses(rs, state, responses, step);
    const std::size_t responders = step.responding.size();
    run.steps.push_back(std::move(step));
    if (responders == 0) {
      run.self_terminated = true;
      run.status = (run.boards == expected) ? RunStatus::solved : RunStatus::stalled;
      return run;
    }
    run.boards.push_back(state.board(rs));
    if (responders > 1) {
      run.status = RunStatus::ambiguous;
      return run;
    }
    if (run.boards.size() > expected.size() || run.boards.back() != expected[run.boards.size() - 1]) {
      run.status = RunStatus::wrong_board;
      return run;
    }
  }
  run.status = RunStatus::budget;
  return run;
}

OrchestrationRun run_partial(const RingSystem& rs, const std::array<Hypervector, kRingCount>& policies,
                             TargetMode mode, const RunOptions& options) {
  if (options.partial_step_limit < 1) throw std::invalid_argument("run_partial: step limit must be >= 1");
  OrchestrationRun run;
  run.method = Method::partial;
  run.mode = mode;
  const auto expected = canonical_boards();
  const auto& moves = canonical_moves();

  RingState state = RingState::at_board(rs, TohState{});
  run.boards.push_back(state.board(rs));
  Hypervector r = ones(rs.dimension());
  for (int t = 0; t < options.partial_step_limit; ++t) {
    OrchestrationStep step;
    step.step = t;
    step.board = run.boards.back();
    step.ring_nodes = state.nodes;
    std::array<RingResponse, kRingCount> responses;
    for (int k = 0; k < kRingCount; ++k) {
      const CmlModel& ring = rs.ring(k);
      const Hypervector query = permute(bind(r, policies[k]), -1);
      if (t < static_cast<int>(moves.size()) && moves[t].ring == k) {
        step.similarity = cosine_similarity(query, move_code(rs, t));
      }
      const Hypervector target = post_process(query, mode, rs.codebook(k), ring.thresholds().recognition);
      responses[k] = ring_response(ring, target, state.nodes[k], ring.thresholds());
    }
    r = apply_responses(rs, state, responses, step);
    const std::size_t responders = step.responding.size();
    run.steps.push_back(std::move(step));
    if (responders == 0) {
      run.status = RunStatus::stalled;
      return run;
    }
    run.boards.push_back(state.board(rs));
    if (responders > 1) {
      run.status = RunStatus::ambiguous;
      return run;
    }
    if (run.boards.size() > expected.size() || run.boards.back() != expected[run.boards.size() - 1]) {
      run.status = RunStatus::wrong_board;
      return run;
    }
  }
  run.status = (run.boards == expected) ? RunStatus::solved : RunStatus::budget;
  return run;
}

namespace {

// Ring whose peg differs between two ToH nodes (the one that must move).
std::optional<int> moving_ring(int from, int to) {
  const TohState a = TohState::from_index(from);
  const TohState b = TohState::from_index(to);
  for (int r = 0; r < kRingCount; ++r) {
    if (a.peg(r) != b.peg(r)) return r;
  }
  return std::nullopt;
}

}  // namespace

OrchestrationRun run_mapping(const CmlModel& ct, const RingSystem& rs,
                             const std::array<Hypervector, kRingCount>& maps, int start, int target,
                             TargetMode mode) {
  OrchestrationRun run;
  run.method = Method::mapping;
  run.mode = mode;
  RingState state = RingState::at_board(rs, TohState::from_index(start));
  run.boards.push_back(state.board(rs));

  PlanOptions plan_options;
  plan_options.record_vectors = false;
  const PlanTrace trace = plan_to_vector(ct, start, ct.code(target), plan_options);
  if (!trace.reached || trace.path.back() != target) {
    run.status = RunStatus::planner_failed;
    return run;
  }
  for (std::size_t k = 0; k + 1 < trace.path.size(); ++k) {
    const int next = trace.path[k + 1];
    OrchestrationStep step;
    step.step = static_cast<int>(k);
    step.board = run.boards.back();
    step.ring_nodes = state.nodes;
    const Hypervector t_hat = ct.code(next);
    const std::optional<int> mover = moving_ring(trace.path[k], next);
    std::array<RingResponse, kRingCount> responses;
    for (int r = 0; r < kRingCount; ++r) {
      const CmlModel& ring = rs.ring(r);
      const Hypervector query = bind(t_hat, maps[r]);
      if (mover == r) {
        step.similarity = cosine_similarity(query, rs.designated_code(r, TohState::from_index(next).peg(r)));
      }
      const Thresholds th = mode == TargetMode::raw ? kMappingRawThresholds : ring.thresholds();
      const Hypervector goal = post_process(query, mode, rs.codebook(r), kMappingRawThresholds.recognition);
      responses[r] = ring_response(ring, goal, state.nodes[r], th);
    }
    apply_responses(rs, state, responses, step);
    run.steps.push_back(std::move(step));
    run.boards.push_back(state.board(rs));
    if (run.boards.back() != ct.graph().label(next)) {
      run.status = RunStatus::wrong_board;
      return run;
    }
  }
  run.status = RunStatus::solved;
  return run;
}

OrchestrationRun run_composite(const CmlModel& cs, const RingSystem& rs, int start, int target,
                               TargetMode mode) {
  OrchestrationRun run;
  run.method = Method::composite;
  run.mode = mode;
  RingState state = RingState::at_board(rs, TohState::from_index(start));
  run.boards.push_back(state.board(rs));

  auto observe = [&]() -> std::optional<int> {
    Hypervector sum = zeros(rs.dimension());
    for (int r = 0; r < kRingCount; ++r) sum += rs.ring(r).code(state.nodes[r]);
    const CmlModel::Match m = cs.best_code_match(sum);
    if (m.similarity < cs.thresholds().recognition) return std::nullopt;
    return m.node;
  };

  const Hypervector goal = cs.code(target);
  std::optional<int> observed = observe();
  const int max_steps = default_max_steps(cs);
  for (int t = 0; t < max_steps; ++t) {
    if (!observed) {
      run.status = RunStatus::ambiguous;
      return run;
    }
    if (*observed == target) {
      run.status = RunStatus::solved;
      return run;
    }
    const Eigen::VectorXd utility = cs.actions_pinv() * (goal - cs.state(*observed));
    const std::optional<int> choice = choose_edge(cs, *observed, utility);
    if (!choice) {
      run.status = RunStatus::planner_failed;
      return run;
    }
    const int next = cs.graph().edge(*choice).target;
    OrchestrationStep step;
    step.step = t;
    step.board = run.boards.back();
    step.ring_nodes = state.nodes;
    const Hypervector t_hat = cs.code(next);
    const std::optional<int> mover = moving_ring(*observed, next);
    if (mover) {
      step.similarity = cosine_similarity(t_hat, rs.designated_code(*mover, TohState::from_index(next).peg(*mover)));
    }
    std::array<RingResponse, kRingCount> responses;
    for (int r = 0; r < kRingCount; ++r) {
      const CmlModel& ring = rs.ring(r);
      const Hypervector query = post_process(t_hat, mode, rs.codebook(r), ring.thresholds().recognition);
      responses[r] = ring_response(ring, query, state.nodes[r], ring.thresholds());
    }
    apply_responses(rs, state, responses, step);
    run.steps.push_back(std::move(step));
    run.boards.push_back(state.board(rs));
    if (run.boards.back() != cs.graph().label(next)) {
      run.status = RunStatus::wrong_board;
      return run;
    }
    observed = observe();
  }
  run.status = (observed && *observed == target) ? RunStatus::solved : RunStatus::budget;
  return run;
}

}  // namespace hdcml
