#include "hdcml/cml.h"

#include <cmath>
#include <string>

#include "hdcml/linalg.h"

namespace hdcml {

namespace {

void normalize_columns(Matrix& m) {
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    const double norm = m.col(c).norm();
    if (norm > 0.0) m.col(c) /= norm;
  }
}

Matrix gaussian(int rows, int cols, double sigma, Rng& rng) {
  std::normal_distribution<double> dist(0.0, sigma);
  Matrix m(rows, cols);
  // Column-major fill keeps the draw order independent of Eigen internals.
  for (int c = 0; c < cols; ++c) {
    for (int r = 0; r < rows; ++r) m(r, c) = dist(rng);
  }
  return m;
}

Eigen::Index argmax(const Eigen::VectorXd& v) {
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < v.size(); ++i) {
    if (v[i] > v[best]) best = i;
  }
  return best;
}

}  // namespace

TrainingError::TrainingError(int epochs, double last_update_norm)
    : std::runtime_error("CML training did not converge after " + std::to_string(epochs) +
                         " epochs (last relative update norm " +
                         std::to_string(last_update_norm) + ")"),
      epochs_(epochs),
      last_update_norm_(last_update_norm) {}

CmlModel CmlModel::train(const GraphTopology& graph, int d, Rng& rng,
                         const TrainOptions& options, Thresholds thresholds) {
  if (d < 1) throw std::invalid_argument("train: dimension must be >= 1");
  if (options.learning_rate <= 0.0) throw std::invalid_argument("train: learning rate must be > 0");
  if (!graph.strongly_connected()) throw std::invalid_argument("train: graph is not strongly connected");

  const int n = graph.node_count();
  const int e = graph.edge_count();
  const bool frozen = options.frozen_states.has_value();

  Matrix S;
  if (frozen) {
    S = *options.frozen_states;
    if (S.rows() != d || S.cols() != n) throw std::invalid_argument("train: frozen states must be d x n");
  } else {
    S = gaussian(d, n, options.state_sigma, rng);
  }
  normalize_columns(S);
  Matrix A = gaussian(d, e, options.action_sigma, rng);

  TrainingRecord record;
  record.seed = options.seed;
  Matrix dA(d, e);
  Matrix dS(d, n);
  const double alpha = options.learning_rate;
  for (int epoch = 1; epoch <= options.max_epochs; ++epoch) {
    dA.setZero();
    dS.setZero();
    for (int c = 0; c < e; ++c) {
      const Edge& edge = graph.edge(c);
      // prediction s_j + a_c against the observed s_i
      Eigen::VectorXd error = S.col(edge.target) - S.col(edge.source) - A.col(c);
      dA.col(c) += alpha * error;
      dS.col(edge.target) -= alpha * error;
    }
    A += dA;
    double update_sq = dA.squaredNorm();
    if (!frozen) {
      S += dS;
      normalize_columns(S);
      update_sq += dS.squaredNorm();
    }
    const double rel = std::sqrt(update_sq) / std::sqrt(A.squaredNorm() + S.squaredNorm());
    record.update_norms.push_back(rel);
    record.epochs = epoch;
    record.final_update_norm = rel;
    if (rel < options.tolerance) {
      CmlModel model;
      model.graph_ = graph;
      model.states_ = std::move(S);
      model.actions_ = std::move(A);
      model.thresholds_ = thresholds;
      model.training_ = std::move(record);
      model.finalize();
      return model;
    }
  }
  throw TrainingError(record.epochs, record.final_update_norm);
}

CmlModel CmlModel::from_states(const GraphTopology& graph, const Matrix& states,
                               Thresholds thresholds) {
  const int n = graph.node_count();
  if (states.cols() != n) throw std::invalid_argument("from_states: state column count must equal n");
  Matrix S = states;
  for (int i = 0; i < n; ++i) {
    if (S.col(i).norm() == 0.0) throw std::invalid_argument("from_states: zero state column");
  }
  normalize_columns(S);
  const Matrix gram = S.transpose() * S;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (gram(i, j) > 1.0 - 1e-12) {
        throw std::invalid_argument("from_states: degenerate states (columns " + std::to_string(i) +
                                    " and " + std::to_string(j) + " coincide)");
      }
    }
  }
  Matrix A(S.rows(), graph.edge_count());
  for (int c = 0; c < graph.edge_count(); ++c) {
    const Edge& edge = graph.edge(c);
    A.col(c) = S.col(edge.target) - S.col(edge.source);
  }
  CmlModel model;
  model.graph_ = graph;
  model.states_ = std::move(S);
  model.actions_ = std::move(A);
  model.thresholds_ = thresholds;
  model.finalize();
  return model;
}

CmlModel CmlModel::assemble(GraphTopology graph, Matrix states, Matrix actions,
                            Thresholds thresholds, std::optional<TrainingRecord> training) {
  if (states.cols() != graph.node_count() || actions.cols() != graph.edge_count() ||
      states.rows() != actions.rows()) {
    throw std::invalid_argument("assemble: inconsistent matrix shapes");
  }
  CmlModel model;
  model.graph_ = std::move(graph);
  model.states_ = std::move(states);
  model.actions_ = std::move(actions);
  model.thresholds_ = thresholds;
  model.training_ = std::move(training);
  model.finalize();
  return model;
}

void CmlModel::finalize() {
  gating_ = gating_matrix(graph_);
  // Edge actions of a consistent map are differences of node states, so
  // their span has dimension at most n - (#components). Anything beyond
  // that is training residual and must not be inverted.
  const int structural_rank = graph_.node_count() - graph_.weak_component_count();
  PseudoInverse p = pseudo_inverse(actions_, structural_rank);
  actions_pinv_ = std::move(p.matrix);
  actions_rank_ = p.rank;
  codes_ = states_.unaryExpr([](double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); });
  code_norms_ = codes_.colwise().norm().transpose();
}

CmlModel CmlModel::with_thresholds(Thresholds t) const {
  CmlModel copy = *this;
  copy.thresholds_ = t;
  return copy;
}

Eigen::VectorXd CmlModel::code_similarities(const Hypervector& x) const {
  if (x.size() != dimension()) throw std::invalid_argument("code_similarities: dimension mismatch");
  const double nx = x.norm();
  Eigen::VectorXd sims = Eigen::VectorXd::Zero(node_count());
  if (nx == 0.0) return sims;
  const Eigen::VectorXd dots = codes_.transpose() * x;
  for (int i = 0; i < node_count(); ++i) {
    if (code_norms_[i] > 0.0) sims[i] = dots[i] / (nx * code_norms_[i]);
  }
  return sims;
}

Eigen::VectorXd CmlModel::state_similarities(const Hypervector& x) const {
  if (x.size() != dimension()) throw std::invalid_argument("state_similarities: dimension mismatch");
  const double nx = x.norm();
  if (nx == 0.0) return Eigen::VectorXd::Zero(node_count());
  // columns of S are unit length
  return (states_.transpose() * x) / nx;
}

CmlModel::Match CmlModel::best_code_match(const Hypervector& x) const {
  const Eigen::VectorXd sims = code_similarities(x);
  const auto best = argmax(sims);
  return {static_cast<int>(best), sims[best]};
}

CmlModel::Match CmlModel::best_state_match(const Hypervector& x) const {
  const Eigen::VectorXd sims = state_similarities(x);
  const auto best = argmax(sims);
  return {static_cast<int>(best), sims[best]};
}

}  // namespace hdcml
