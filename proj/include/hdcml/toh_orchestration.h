#pragma once

// Ring CMLs for the three Tower of Hanoi rings and the four ways of wiring
// them together: monolithic policy, partial policies, node-state mapping
// and composite node states.

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "hdcml/cml.h"
#include "hdcml/planner.h"

namespace hdcml {

constexpr int kRingCount = 3;  // 0 large, 1 medium, 2 small
char ring_letter(int ring);    // 'L', 'M', 'S'

struct RingOptions {
  int nodes = 7;
  int undirected_edges = 10;
  // Build each ring from random bipolar states instead of training it.
  bool calculated = false;
  Thresholds thresholds{};
  TrainOptions train{};
  int max_attempts = 100;
};

class RingSystem {
 public:
  RingSystem(std::vector<CmlModel> rings, std::array<std::array<int, 3>, kRingCount> designated);

  const CmlModel& ring(int r) const { return rings_[r]; }
  int dimension() const { return rings_[0].dimension(); }
  // Node of ring `r` that stands for peg 1..3.
  int designated_node(int r, int peg) const { return designated_[r][peg - 1]; }
  Hypervector designated_code(int r, int peg) const;
  // Peg 1..3 of a ring node, or 0 for an interstitial node.
  int peg_of(int r, int node) const;
  // All node codes of one ring, labelled by node index.
  const Dictionary& codebook(int r) const { return codebooks_[r]; }
  // Designated codes of all rings, labelled "L1".."S3".
  const Dictionary& designated_dictionary() const { return designated_dict_; }

 private:
  std::vector<CmlModel> rings_;
  std::array<std::array<int, 3>, kRingCount> designated_;
  std::array<Dictionary, kRingCount> codebooks_;
  Dictionary designated_dict_;
};

// Three independent ring CMLs on random connected graphs with three
// designated nodes each. A candidate is rejected when a ring does not plan
// every ordered pair successfully or two designated codes are not
// pseudo-orthogonal (|similarity| >= recognition threshold).
RingSystem build_ring_system(int d, Rng& rng, const RingOptions& options = {});

struct RingMove {
  int ring;
  int peg;
};

// Optimal 111 -> 222 solution, one ring move per step.
const std::vector<RingMove>& canonical_moves();
// Board labels visited by canonical_moves(), starting with "111".
std::vector<std::string> canonical_boards();

Hypervector build_monolithic_policy(const RingSystem& rs, Rng& rng);
std::array<Hypervector, kRingCount> build_partial_policies(const RingSystem& rs, Rng& rng);
// map_R = [sum over ToH nodes of t_node (.) designated code of ring R].
// `ct` must be a 27-node model on the ToH graph.
std::array<Hypervector, kRingCount> build_maps(const CmlModel& ct, const RingSystem& rs, Rng& rng);

// Composite states sgn(l_i + m_j + s_k) as a d x 27 matrix in ToH index order.
Matrix composite_states(const RingSystem& rs);
Matrix composite_states(const std::array<std::array<Hypervector, 3>, kRingCount>& designated);
inline constexpr Thresholds kCompositeThresholds{0.55, 0.3};
CmlModel build_composite(const RingSystem& rs, Thresholds thresholds = kCompositeThresholds);

enum class Method { monolithic, partial, mapping, composite };
std::string_view to_string(Method method);
std::optional<Method> parse_method(std::string_view text);

enum class RunStatus { solved, wrong_board, ambiguous, stalled, planner_failed, budget };
std::string_view to_string(RunStatus status);

struct OrchestrationStep {
  int step = 0;
  std::string board;  // board before the step; '0' marks an interstitial ring
  std::array<int, kRingCount> ring_nodes{};
  // Similarity of the unprocessed query to the code the moving ring should
  // reach; empty when no move is expected.
  std::optional<double> similarity;
  std::vector<int> responding;  // rings that returned a non-zero state
};

struct OrchestrationRun {
  Method method = Method::monolithic;
  TargetMode mode = TargetMode::raw;
  std::vector<OrchestrationStep> steps;
  std::vector<std::string> boards;  // start plus the board after every step
  RunStatus status = RunStatus::budget;
  bool self_terminated = false;  // a step with no responder ended the run
  bool solved() const { return status == RunStatus::solved; }
  std::optional<double> mean_similarity() const;
};

struct RingState {
  std::array<int, kRingCount> nodes{};
  static RingState at_board(const RingSystem& rs, const TohState& board);
  std::string board(const RingSystem& rs) const;
};

struct RingResponse {
  bool recognized = false;
  bool moved = false;
  int node = 0;
};

// One ring CML fed a target until it terminates (at most 4 n moves). A ring
// that does not change its node answers with the zeros vector.
RingResponse ring_response(const CmlModel& ring, const Hypervector& target, int current,
                           Thresholds thresholds);

struct RunOptions {
  int max_steps = 14;        // monolithic safety cap
  int partial_step_limit = 7;  // external end condition
};

OrchestrationRun run_monolithic(const RingSystem& rs, const Hypervector& policy, TargetMode mode,
                                const RunOptions& options = {});
OrchestrationRun run_partial(const RingSystem& rs, const std::array<Hypervector, kRingCount>& policies,
                             TargetMode mode, const RunOptions& options = {});

// Thresholds the rings use for a mapping query in raw mode.
inline constexpr Thresholds kMappingRawThresholds{0.07, 0.07};

OrchestrationRun run_mapping(const CmlModel& ct, const RingSystem& rs,
                             const std::array<Hypervector, kRingCount>& maps, int start, int target,
                             TargetMode mode);
OrchestrationRun run_composite(const CmlModel& cs, const RingSystem& rs, int start, int target,
                               TargetMode mode);

}  // namespace hdcml
