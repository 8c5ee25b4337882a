#include <gtest/gtest.h>

#include <filesystem>

#include <json.hpp>

#include "generators.h"
#include "hdcml/model_io.h"
#include "hdcml/planner.h"

namespace hdcml {
namespace {

TEST(ModelIo, TrainedModelRoundTripsBitForBit) {
  Rng rng = testing::case_stream("io", 0);
  const GraphTopology g = random_connected_graph(6, 8, rng);
  TrainOptions opts;
  opts.seed = 17;
  const CmlModel m = CmlModel::train(g, 120, rng, opts, {0.15, 0.35});
  const CmlModel back = model_from_json(model_to_json(m));
  EXPECT_EQ(back.states(), m.states());
  EXPECT_EQ(back.actions(), m.actions());
  EXPECT_EQ(back.gating(), m.gating());
  EXPECT_EQ(back.graph().edges(), g.edges());
  EXPECT_EQ(back.thresholds().recognition, 0.15);
  EXPECT_EQ(back.thresholds().termination, 0.35);
  ASSERT_TRUE(back.training());
  EXPECT_EQ(back.training()->seed, 17u);
  EXPECT_EQ(back.training()->epochs, m.training()->epochs);
  EXPECT_EQ(back.training()->update_norms, m.training()->update_norms);
  EXPECT_EQ(model_to_json(back), model_to_json(m));
  for (int a = 0; a < 6; ++a) {
    for (int b = 0; b < 6; ++b) EXPECT_EQ(plan(back, a, b).path, plan(m, a, b).path);
  }
}

TEST(ModelIo, LabelsAndFilesSurvive) {
  Rng rng = testing::case_stream("io-file", 0);
  const CmlModel m = CmlModel::from_states(toh_graph(), testing::gen_bipolar_states(rng, 64, 27));
  const auto path = std::filesystem::temp_directory_path() / "hdcml_io_test_model.json";
  save_model(m, path);
  const CmlModel back = load_model(path);
  std::filesystem::remove(path);
  EXPECT_EQ(back.graph().label(13), "222");
  EXPECT_FALSE(back.training());
  EXPECT_EQ(back.codes(), m.codes());
}

TEST(ModelIo, RejectsInconsistentDocuments) {
  Rng rng = testing::case_stream("io-bad", 0);
  const CmlModel m = CmlModel::from_states(GraphTopology(3, {{0, 1}, {1, 2}, {2, 0}}),
                                           testing::gen_bipolar_states(rng, 16, 3));
  auto doc = nlohmann::json::parse(model_to_json(m));
  EXPECT_THROW(model_from_json("{"), std::runtime_error);

  auto wrong_format = doc;
  wrong_format["format"] = "other";
  EXPECT_THROW(model_from_json(wrong_format.dump()), std::runtime_error);

  auto short_edges = doc;
  short_edges["edges"].erase(0);
  EXPECT_THROW(model_from_json(short_edges.dump()), std::exception);

  auto bad_column = doc;
  bad_column["S"][0].erase(0);
  EXPECT_THROW(model_from_json(bad_column.dump()), std::runtime_error);

  EXPECT_THROW(load_model("/nonexistent/model.json"), std::runtime_error);
}

}  // namespace
}  // namespace hdcml
