#include "hdcml/model_io.h"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace hdcml {

namespace {

using nlohmann::json;

// Column-major nested arrays: one inner array per column.
json matrix_to_json(const Matrix& m) {
  json cols = json::array();
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    std::vector<double> col(m.col(c).data(), m.col(c).data() + m.rows());
    cols.push_back(std::move(col));
  }
  return cols;
}

Matrix matrix_from_json(const json& j, Eigen::Index rows, Eigen::Index cols, const char* name) {
  if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != cols) {
    throw std::runtime_error(std::string("model file: bad column count for ") + name);
  }
  Matrix m(rows, cols);
  for (Eigen::Index c = 0; c < cols; ++c) {
    const auto col = j[c].get<std::vector<double>>();
    if (static_cast<Eigen::Index>(col.size()) != rows) {
      throw std::runtime_error(std::string("model file: bad row count for ") + name);
    }
    for (Eigen::Index r = 0; r < rows; ++r) m(r, c) = col[r];
  }
  return m;
}

}  // namespace

std::string model_to_json(const CmlModel& model) {
  const GraphTopology& g = model.graph();
  json doc;
  doc["format"] = "hdcml-model";
  doc["version"] = 1;
  doc["d"] = model.dimension();
  doc["n"] = model.node_count();
  doc["e"] = model.edge_count();
  json edges = json::array();
  for (const Edge& edge : g.edges()) edges.push_back({edge.source, edge.target});
  doc["edges"] = std::move(edges);
  if (g.has_labels()) {
    std::vector<std::string> labels;
    for (int i = 0; i < g.node_count(); ++i) labels.push_back(g.label(i));
    doc["labels"] = labels;
  }
  doc["theta"] = model.thresholds().recognition;
  doc["phi"] = model.thresholds().termination;
  doc["S"] = matrix_to_json(model.states());
  doc["A"] = matrix_to_json(model.actions());
  doc["G"] = matrix_to_json(model.gating());
  if (const auto& t = model.training()) {
    doc["training"] = {{"seed", t->seed},
                       {"epochs", t->epochs},
                       {"final_update_norm", t->final_update_norm},
                       {"update_norms", t->update_norms}};
  }
  return doc.dump(1);
}

CmlModel model_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(std::string("model file: ") + e.what());
  }
  if (doc.value("format", "") != "hdcml-model") throw std::runtime_error("model file: unknown format");
  const int d = doc.at("d").get<int>();
  const int n = doc.at("n").get<int>();
  const int e = doc.at("e").get<int>();
  std::vector<Edge> edges;
  for (const auto& pair : doc.at("edges")) edges.push_back({pair.at(0).get<int>(), pair.at(1).get<int>()});
  if (static_cast<int>(edges.size()) != e) throw std::runtime_error("model file: edge count mismatch");
  std::vector<std::string> labels;
  if (doc.contains("labels")) labels = doc["labels"].get<std::vector<std::string>>();
  GraphTopology graph(n, std::move(edges), std::move(labels));

  Matrix S = matrix_from_json(doc.at("S"), d, n, "S");
  Matrix A = matrix_from_json(doc.at("A"), d, e, "A");
  const Matrix G = matrix_from_json(doc.at("G"), e, n, "G");
  if (G != gating_matrix(graph)) throw std::runtime_error("model file: gating matrix disagrees with edge list");

  Thresholds thresholds{doc.at("theta").get<double>(), doc.at("phi").get<double>()};
  std::optional<TrainingRecord> training;
  if (doc.contains("training")) {
    const auto& t = doc["training"];
    TrainingRecord record;
    record.seed = t.at("seed").get<std::uint64_t>();
    record.epochs = t.at("epochs").get<int>();
    record.final_update_norm = t.at("final_update_norm").get<double>();
    record.update_norms = t.at("update_norms").get<std::vector<double>>();
    training = std::move(record);
  }
  return CmlModel::assemble(std::move(graph), std::move(S), std::move(A), thresholds, std::move(training));
}

void save_model(const CmlModel& model, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << model_to_json(model) << '\n';
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

CmlModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return model_from_json(buf.str());
}

}  // namespace hdcml
