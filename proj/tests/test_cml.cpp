#include <gtest/gtest.h>

#include <cmath>

#include "generators.h"
#include "hdcml/cml.h"
#include "hdcml/linalg.h"
#include "hdcml/planner.h"
#include "hdcml/stats.h"

namespace hdcml {
namespace {

using testing::case_stream;

TEST(PseudoInverse, HandComputedCases) {
  Matrix a(2, 2);
  a << 2, 0, 0, 4;
  const PseudoInverse p = pseudo_inverse(a);
  EXPECT_EQ(p.rank, 2);
  EXPECT_NEAR(p.matrix(0, 0), 0.5, 1e-15);
  EXPECT_NEAR(p.matrix(1, 1), 0.25, 1e-15);

  // rank one: [1 1; 1 1]+ = [1 1; 1 1] / 4
  Matrix ones2 = Matrix::Ones(2, 2);
  const PseudoInverse q = pseudo_inverse(ones2);
  EXPECT_EQ(q.rank, 1);
  EXPECT_TRUE(q.matrix.isApprox(Matrix::Constant(2, 2, 0.25), 1e-14));

  // column vector v: v+ = v^T / |v|^2
  Matrix v(3, 1);
  v << 1, 2, 2;
  EXPECT_TRUE(pseudo_inverse(v).matrix.isApprox(v.transpose() / 9.0, 1e-14));
}

TEST(PseudoInverse, AgreesWithCompleteOrthogonalDecomposition) {
  for (int c = 0; c < 20; ++c) {
    Rng rng = case_stream("pinv", c);
    const int rows = testing::uniform_int(rng, 2, 30);
    const int cols = testing::uniform_int(rng, 2, 30);
    const int k = testing::uniform_int(rng, 1, std::min(rows, cols));
    Matrix l(rows, k);
    Matrix r(k, cols);
    for (int j = 0; j < k; ++j) l.col(j) = testing::gen_real_vector(rng, rows);
    for (int j = 0; j < cols; ++j) r.col(j) = testing::gen_real_vector(rng, k);
    const Matrix a = l * r;
    const PseudoInverse p = pseudo_inverse(a);
    EXPECT_EQ(p.rank, k);
    const Matrix reference = a.completeOrthogonalDecomposition().pseudoInverse();
    EXPECT_LT((p.matrix - reference).norm() / reference.norm(), 1e-8) << "case " << c;
    EXPECT_LT(moore_penrose_residual(a, p.matrix), 1e-10);
  }
}

TEST(PseudoInverse, RankCapDropsTrailingDirections) {
  Matrix a = Matrix::Zero(3, 3);
  a.diagonal() << 3, 2, 1e-3;
  const PseudoInverse p = pseudo_inverse(a, 2);
  EXPECT_EQ(p.rank, 2);
  EXPECT_NEAR(p.matrix(2, 2), 0.0, 1e-15);
  EXPECT_NEAR(p.matrix(1, 1), 0.5, 1e-15);
}

TEST(FromStates, ActionsCloseEveryEdgeExactly) {
  for (int c = 0; c < 20; ++c) {
    Rng rng = case_stream("from-states", c);
    const GraphTopology g = testing::gen_digraph(rng, 2, 12);
    const CmlModel m = CmlModel::from_states(g, testing::gen_bipolar_states(rng, 256, g.node_count()));
    for (int i = 0; i < g.node_count(); ++i) EXPECT_NEAR(m.states().col(i).norm(), 1.0, 1e-12);
    for (int e = 0; e < g.edge_count(); ++e) {
      const Edge& edge = g.edge(e);
      EXPECT_LT((m.state(edge.source) + m.actions().col(e) - m.state(edge.target)).norm(), 1e-12);
    }
    EXPECT_EQ(m.actions_rank(), g.node_count() - g.weak_component_count());
    EXPECT_LT(moore_penrose_residual(m.actions(), m.actions_pinv()), 1e-10);
  }
}

TEST(FromStates, CodesAreSignOfStates) {
  Rng rng = case_stream("codes", 0);
  const GraphTopology g = toh_graph();
  const Matrix s = testing::gen_bipolar_states(rng, 500, 27);
  const CmlModel m = CmlModel::from_states(g, s);
  EXPECT_EQ(m.codes(), s);
  EXPECT_EQ(m.best_code_match(s.col(5)).node, 5);
  EXPECT_NEAR(m.best_code_match(s.col(5)).similarity, 1.0, 1e-12);
  EXPECT_EQ(m.gating(), gating_matrix(g));
}

TEST(FromStates, RejectsDegenerateInput) {
  const GraphTopology g(2, {{0, 1}, {1, 0}});
  Matrix s = Matrix::Ones(4, 2);
  EXPECT_THROW(CmlModel::from_states(g, s), std::invalid_argument);
  s.col(1).setZero();
  EXPECT_THROW(CmlModel::from_states(g, s), std::invalid_argument);
  EXPECT_THROW(CmlModel::from_states(g, Matrix::Ones(4, 3)), std::invalid_argument);
}

TEST(Train, ConvergesToConsistentMap) {
  for (int c = 0; c < 5; ++c) {
    Rng rng = case_stream("train", c);
    const GraphTopology g = testing::gen_connected_graph(rng, 4, 10);
    TrainOptions opts;
    opts.seed = 99;
    const CmlModel m = CmlModel::train(g, 300, rng, opts);
    ASSERT_TRUE(m.training());
    EXPECT_EQ(m.training()->seed, 99u);
    EXPECT_LT(m.training()->final_update_norm, opts.tolerance);
    EXPECT_EQ(static_cast<int>(m.training()->update_norms.size()), m.training()->epochs);
    for (int i = 0; i < g.node_count(); ++i) EXPECT_NEAR(m.states().col(i).norm(), 1.0, 1e-9);
    for (int e = 0; e < g.edge_count(); ++e) {
      const Edge& edge = g.edge(e);
      EXPECT_LT((m.state(edge.source) + m.actions().col(e) - m.state(edge.target)).norm(), 1e-3);
    }
    EXPECT_EQ(m.actions_rank(), g.node_count() - 1);
  }
}

TEST(Train, LearnedStatesArePseudoOrthogonal) {
  Rng rng = case_stream("train-orth", 0);
  const CmlModel m = CmlModel::train(toh_graph(), 1000, rng);
  const Matrix gram = m.states().transpose() * m.states();
  for (int i = 0; i < 27; ++i) {
    for (int j = i + 1; j < 27; ++j) EXPECT_LT(std::abs(gram(i, j)), 0.2) << i << "," << j;
  }
}

TEST(Train, SignOfTrainedStateKeepsMostOfItsDirection) {
  Rng rng = case_stream("train-sign", 0);
  const CmlModel m = CmlModel::train(toh_graph(), 1000, rng);
  std::vector<double> sims;
  for (int i = 0; i < 27; ++i) sims.push_back(cosine_similarity(m.state(i), m.code(i)));
  // Gaussian entries give E|x| / sqrt(E x^2) = sqrt(2 / pi)
  EXPECT_NEAR(mean(sims), std::sqrt(2.0 / M_PI), 0.03);
}

TEST(Train, ReportsNonConvergence) {
  Rng rng = case_stream("train-fail", 0);
  TrainOptions opts;
  opts.max_epochs = 3;
  try {
    CmlModel::train(toh_graph(), 100, rng, opts);
    FAIL() << "expected TrainingError";
  } catch (const TrainingError& e) {
    EXPECT_EQ(e.epochs(), 3);
    EXPECT_GT(e.last_update_norm(), opts.tolerance);
  }
}

TEST(Train, RejectsDisconnectedGraph) {
  Rng rng = case_stream("train-disc", 0);
  const GraphTopology g(4, {{0, 1}, {1, 0}, {2, 3}, {3, 2}});
  EXPECT_THROW(CmlModel::train(g, 50, rng), std::invalid_argument);
}

TEST(Train, FrozenStatesReproduceCalculatedPlans) {
  for (int c = 0; c < 3; ++c) {
    Rng rng = case_stream("frozen", c);
    const GraphTopology g = random_connected_graph(8, 12, rng);
    const Matrix s = testing::gen_bipolar_states(rng, 500, 8);
    const CmlModel calc = CmlModel::from_states(g, s);
    TrainOptions opts;
    opts.frozen_states = s;
    opts.tolerance = 1e-13;
    const CmlModel trained = CmlModel::train(g, 500, rng, opts);
    EXPECT_LT((trained.actions() - calc.actions()).norm(), 1e-6);
    for (int a = 0; a < 8; ++a) {
      for (int b = 0; b < 8; ++b) {
        if (a == b) continue;
        EXPECT_EQ(plan(calc, a, b).path, plan(trained, a, b).path) << a << "->" << b;
      }
    }
  }
}

TEST(Similarities, ZeroQueryAndDimensionChecks) {
  Rng rng = case_stream("sims", 0);
  const CmlModel m = CmlModel::from_states(toh_graph(), testing::gen_bipolar_states(rng, 100, 27));
  EXPECT_EQ(m.code_similarities(zeros(100)), Eigen::VectorXd::Zero(27));
  EXPECT_EQ(m.state_similarities(zeros(100)), Eigen::VectorXd::Zero(27));
  EXPECT_THROW(m.code_similarities(zeros(99)), std::invalid_argument);
  const CmlModel t = m.with_thresholds({0.2, 0.4});
  EXPECT_EQ(t.thresholds().recognition, 0.2);
  EXPECT_EQ(m.thresholds().recognition, 0.1);
}

}  // namespace
}  // namespace hdcml
