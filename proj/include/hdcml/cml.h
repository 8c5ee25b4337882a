#pragma once

// Cognitive map learner: node states S (d x n), edge actions A (d x e),
// gating G (e x n) and the pseudo-inverse of A used for planning.
//
// Observations and choices are node / edge indices; the identity
// observation and choice matrices are never built.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "hdcml/graph.h"
#include "hdcml/hypervector.h"

namespace hdcml {

struct Thresholds {
  double recognition = 0.1;  // target must reach this similarity to some node
  double termination = 0.3;  // target this close to the current node ends a move
};

struct TrainOptions {
  double learning_rate = 0.1;
  double state_sigma = 0.1;
  double action_sigma = 1.0;
  // Stop once ||epoch update||_F / ||[A S]||_F drops below this.
  double tolerance = 1e-5;
  int max_epochs = 5000;
  // Fixed node states; only the actions are learned.
  std::optional<Matrix> frozen_states;
  // Recorded with the model; not used to draw anything.
  std::uint64_t seed = 0;
};

struct TrainingRecord {
  int epochs = 0;
  double final_update_norm = 0.0;
  std::vector<double> update_norms;
  std::uint64_t seed = 0;
};

class TrainingError : public std::runtime_error {
 public:
  TrainingError(int epochs, double last_update_norm);
  int epochs() const { return epochs_; }
  double last_update_norm() const { return last_update_norm_; }

 private:
  int epochs_;
  double last_update_norm_;
};

class CmlModel {
 public:
  struct Match {
    int node;
    double similarity;
  };

  // Delta-rule training with epoch-summed updates; S columns are
  // renormalized to unit length after every epoch.
  static CmlModel train(const GraphTopology& graph, int d, Rng& rng,
                        const TrainOptions& options = {}, Thresholds thresholds = {});

  // Prescribed states: columns are normalized and each action is set so that
  // s_source + a = s_target exactly.
  static CmlModel from_states(const GraphTopology& graph, const Matrix& states,
                              Thresholds thresholds = {});

  // Rebuilds derived matrices (G, A+, codes) from stored parts.
  static CmlModel assemble(GraphTopology graph, Matrix states, Matrix actions,
                           Thresholds thresholds, std::optional<TrainingRecord> training);

  const GraphTopology& graph() const { return graph_; }
  int dimension() const { return static_cast<int>(states_.rows()); }
  int node_count() const { return graph_.node_count(); }
  int edge_count() const { return graph_.edge_count(); }

  const Matrix& states() const { return states_; }
  const Matrix& actions() const { return actions_; }
  const Matrix& gating() const { return gating_; }
  const Matrix& actions_pinv() const { return actions_pinv_; }
  int actions_rank() const { return actions_rank_; }
  // sgn(S): the bipolar node states exposed to other HDC modules.
  const Matrix& codes() const { return codes_; }

  Hypervector state(int node) const { return states_.col(node); }
  Hypervector code(int node) const { return codes_.col(node); }

  Thresholds thresholds() const { return thresholds_; }
  CmlModel with_thresholds(Thresholds t) const;
  const std::optional<TrainingRecord>& training() const { return training_; }

  Eigen::VectorXd code_similarities(const Hypervector& x) const;
  Eigen::VectorXd state_similarities(const Hypervector& x) const;
  Match best_code_match(const Hypervector& x) const;
  Match best_state_match(const Hypervector& x) const;

 private:
  CmlModel() = default;
  void finalize();

  GraphTopology graph_;
  Matrix states_;
  Matrix actions_;
  Matrix gating_;
  Matrix actions_pinv_;
  int actions_rank_ = 0;
  Matrix codes_;
  Eigen::VectorXd code_norms_;
  Thresholds thresholds_;
  std::optional<TrainingRecord> training_;
};

}  // namespace hdcml
