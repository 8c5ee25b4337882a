// hdcml: train and inspect CMLs, run ring orchestrations, reproduce the
// path-success tables and print step traces.
//
// Exit codes: 0 success, 1 verification failure, 2 usage or input error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "hdcml/experiments.h"
#include "hdcml/model_io.h"
#include "hdcml/report.h"
#include "hdcml/stats.h"

namespace {

using namespace hdcml;

constexpr int kOk = 0;
constexpr int kVerifyFailed = 1;
constexpr int kUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Common {
  std::uint64_t seed = 1;
  int dimension = kDefaultDimension;
  std::string out;
  std::string format = "csv";
};

void log_config(const std::string& command, const std::vector<std::pair<std::string, std::string>>& items) {
  std::cerr << "hdcml " << command << ":";
  for (const auto& [k, v] : items) std::cerr << ' ' << k << '=' << v;
  std::cerr << '\n';
}

void emit(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw UsageError("cannot write " + path);
  out << text;
}

GraphTopology graph_from_source(const std::string& source, std::uint64_t seed) {
  if (source == "toh") return toh_graph();
  if (source.rfind("random:", 0) == 0) {
    int n = 0;
    int m = 0;
    char tail = 0;
    if (std::sscanf(source.c_str() + 7, "%d,%d%c", &n, &m, &tail) != 2) {
      throw UsageError("graph source must look like random:n,m");
    }
    Rng rng = derive_stream(seed, {stream_tag("graph")});
    try {
      return random_connected_graph(n, m, rng);
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
  }
  std::ifstream in(source);
  if (!in) throw UsageError("graph source is neither toh, random:n,m nor a readable edge list: " + source);
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_edge_list(buf.str());
  } catch (const std::exception& e) {
    throw UsageError(std::string("bad edge list: ") + e.what());
  }
}

int resolve_node(const GraphTopology& g, const std::string& text) {
  if (auto idx = g.find_label(text)) return *idx;
  throw UsageError("unknown node: " + text);
}

TargetMode parse_mode(const std::string& text) {
  if (auto m = parse_target_mode(text)) return *m;
  throw UsageError("unknown mode: " + text);
}

int cmd_train(const Common& c, const std::string& graph_source, const std::string& build) {
  const std::string out = c.out.empty() ? "model.json" : c.out;
  log_config("train", {{"graph", graph_source}, {"mode", build}, {"seed", std::to_string(c.seed)},
                       {"dimension", std::to_string(c.dimension)}, {"out", out}});
  const GraphTopology g = graph_from_source(graph_source, c.seed);
  if (!g.strongly_connected()) throw UsageError("graph is not strongly connected");
  Rng rng = derive_stream(c.seed, {stream_tag("model")});
  std::optional<CmlModel> model;
  if (build == "calculated") {
    Matrix states(c.dimension, g.node_count());
    for (int i = 0; i < g.node_count(); ++i) states.col(i) = random_bipolar(c.dimension, rng);
    model = CmlModel::from_states(g, states);
  } else {
    TrainOptions opts;
    opts.seed = c.seed;
    try {
      model = CmlModel::train(g, c.dimension, rng, opts);
    } catch (const TrainingError& e) {
      std::cerr << "error: " << e.what() << '\n';
      return kVerifyFailed;
    }
  }
  save_model(*model, out);

  std::vector<double> offdiag;
  const Matrix gram = model->states().transpose() * model->states();
  for (int i = 0; i < g.node_count(); ++i) {
    for (int j = 0; j < g.node_count(); ++j) {
      if (i != j) offdiag.push_back(std::abs(gram(i, j)));
    }
  }
  std::vector<std::pair<int, int>> pairs;
  for (int a = 0; a < g.node_count(); ++a) {
    for (int b = 0; b < g.node_count(); ++b) {
      if (a != b) pairs.emplace_back(a, b);
    }
  }
  const double raw = path_success(*model, pairs, TargetMode::raw).mean;
  const double sgn = path_success(*model, pairs, TargetMode::sign).mean;
  std::printf("nodes %d\nedges %d\n", model->node_count(), model->edge_count());
  if (const auto& t = model->training()) {
    std::printf("epochs %d\nfinal_update_norm %.3e\n", t->epochs, t->final_update_norm);
  } else {
    std::printf("epochs 0\n");
  }
  std::printf("state_similarity_abs_mean %.4f\nstate_similarity_abs_max %.4f\n", mean(offdiag),
              *std::max_element(offdiag.begin(), offdiag.end()));
  std::printf("sign_similarity_mean %.4f\n", mean_sign_similarity(*model));
  std::printf("path_success_raw %.4f\npath_success_sign %.4f\n", raw, sgn);
  return sgn == 1.0 ? kOk : kVerifyFailed;
}

int cmd_plan(const std::string& model_path, const std::string& from, const std::string& to,
             const std::string& mode_text) {
  log_config("plan", {{"model", model_path}, {"from", from}, {"to", to}, {"mode", mode_text}});
  const TargetMode mode = parse_mode(mode_text);
  if (mode == TargetMode::recover) throw UsageError("plan supports raw and sign");
  CmlModel model = [&] {
    try {
      return load_model(model_path);
    } catch (const std::exception& e) {
      throw UsageError(e.what());
    }
  }();
  const GraphTopology& g = model.graph();
  const int start = resolve_node(g, from);
  const int target = resolve_node(g, to);
  const PlanTrace trace = mode == TargetMode::raw ? plan(model, start, target)
                                                  : plan_to_vector(model, start, model.code(target));
  const bool reached = trace.reached && trace.path.back() == target;
  std::printf("path");
  for (int node : trace.path) std::printf(" %s", g.label(node).c_str());
  std::printf("\nsteps %d\nreached %s\n", trace.step_count, reached ? "yes" : "no");
  if (!reached) {
    std::printf("failure %s", std::string(to_string(trace.failure)).c_str());
    if (trace.oscillating_pair) {
      std::printf(" %s-%s", g.label(trace.oscillating_pair->source).c_str(),
                  g.label(trace.oscillating_pair->target).c_str());
    }
    std::printf("\n");
  }
  return reached ? kOk : kVerifyFailed;
}

Method parse_method_or_throw(const std::string& text) {
  if (auto m = parse_method(text)) return *m;
  throw UsageError("unknown method: " + text);
}

nlohmann::json run_to_json(const OrchestrationRun& run, std::uint64_t seed, int dimension) {
  nlohmann::json steps = nlohmann::json::array();
  for (const auto& s : run.steps) {
    nlohmann::json js = {{"step", s.step}, {"board", s.board}, {"ring_nodes", s.ring_nodes}};
    js["similarity"] = s.similarity ? nlohmann::json(*s.similarity) : nlohmann::json(nullptr);
    std::string responding;
    for (int r : s.responding) responding += ring_letter(r);
    js["responding"] = responding;
    steps.push_back(std::move(js));
  }
  return {{"method", std::string(to_string(run.method))},
          {"mode", std::string(to_string(run.mode))},
          {"seed", seed},
          {"dimension", dimension},
          {"status", std::string(to_string(run.status))},
          {"self_terminated", run.self_terminated},
          {"boards", run.boards},
          {"steps", std::move(steps)}};
}

int cmd_toh(const Common& c, const std::string& method_text, const std::string& mode_text,
            const std::string& from, const std::string& to, const RingOptions& rings) {
  log_config("toh", {{"method", method_text}, {"mode", mode_text}, {"from", from}, {"to", to},
                     {"seed", std::to_string(c.seed)}, {"dimension", std::to_string(c.dimension)},
                     {"ring_edges", std::to_string(rings.undirected_edges)},
                     {"rings", rings.calculated ? "calculated" : "trained"}});
  const Method method = parse_method_or_throw(method_text);
  const TargetMode mode = parse_mode(mode_text);
  const GraphTopology toh = toh_graph();
  const int start = resolve_node(toh, from);
  const int target = resolve_node(toh, to);
  if ((method == Method::monolithic || method == Method::partial) && (from != "111" || to != "222")) {
    throw UsageError("policy methods only encode the 111 -> 222 solution");
  }
  Rng rng = derive_stream(c.seed, {stream_tag("toh")});
  const RingSystem rs = build_ring_system(c.dimension, rng, rings);
  Matrix states(c.dimension, 27);
  for (int i = 0; i < 27; ++i) states.col(i) = random_bipolar(c.dimension, rng);
  const CmlModel ct = CmlModel::from_states(toh, states);
  OrchestrationRun run;
  switch (method) {
    case Method::monolithic: run = run_monolithic(rs, build_monolithic_policy(rs, rng), mode); break;
    case Method::partial: run = run_partial(rs, build_partial_policies(rs, rng), mode); break;
    case Method::mapping: run = run_mapping(ct, rs, build_maps(ct, rs, rng), start, target, mode); break;
    case Method::composite: run = run_composite(build_composite(rs), rs, start, target, mode); break;
  }
  const std::string text = c.format == "structured" ? run_to_json(run, c.seed, c.dimension).dump(2) + "\n"
                                                    : format_trace(run, c.seed, c.dimension);
  emit(text, c.out);
  return run.solved() ? kOk : kVerifyFailed;
}

int cmd_reproduce(const Common& c, int table, TrialConfig cfg, bool serial) {
  cfg.master_seed = c.seed;
  cfg.dimension = c.dimension;
  cfg.execution = serial ? Execution::serial : Execution::parallel;
  log_config("reproduce", {{"table", std::to_string(table)}, {"seed", std::to_string(cfg.master_seed)},
                           {"trials", std::to_string(cfg.trials)}, {"pairs", std::to_string(cfg.pairs)},
                           {"dimension", std::to_string(cfg.dimension)},
                           {"theta", std::to_string(cfg.thresholds.recognition)},
                           {"phi", std::to_string(cfg.thresholds.termination)},
                           {"composite_theta", std::to_string(cfg.composite_thresholds.recognition)},
                           {"ring_edges", std::to_string(cfg.rings.undirected_edges)},
                           {"rings", cfg.rings.calculated ? "calculated" : "trained"},
                           {"execution", serial ? "serial" : "parallel"}, {"format", c.format},
                           {"out", c.out.empty() ? "-" : c.out}});
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  const auto reports = table == 2 ? run_table2(cfg) : run_table3(cfg);
  const auto verdicts = compare(reports, table == 2 ? table2_reference() : table3_reference());
  const bool pass = all_pass(verdicts);
  const std::string body = c.format == "structured" ? to_structured(reports, cfg, verdicts) : to_csv(reports);
  if (c.out.empty()) {
    std::cout << side_by_side(verdicts) << "verdict " << (pass ? "PASS" : "FAIL") << "\n\n" << body;
  } else {
    emit(body, c.out);
    std::cout << side_by_side(verdicts) << "verdict " << (pass ? "PASS" : "FAIL") << '\n';
  }
  return pass ? kOk : kVerifyFailed;
}

int cmd_trace(const Common& c, const std::string& method_text, std::string mode_text, const RingOptions& rings) {
  const Method method = parse_method_or_throw(method_text);
  if (mode_text.empty()) mode_text = method == Method::mapping ? "recover" : "raw";
  const TargetMode mode = parse_mode(mode_text);
  log_config("trace", {{"method", method_text}, {"mode", mode_text}, {"seed", std::to_string(c.seed)},
                       {"dimension", std::to_string(c.dimension)},
                       {"ring_edges", std::to_string(rings.undirected_edges)},
                       {"rings", rings.calculated ? "calculated" : "trained"},
                       {"format", c.format == "structured" ? "structured" : "line"}});
  const OrchestrationRun run = appendix_run(method, mode, c.seed, c.dimension, rings);
  const std::string text = c.format == "structured" ? run_to_json(run, c.seed, c.dimension).dump(2) + "\n"
                                                    : format_trace(run, c.seed, c.dimension);
  emit(text, c.out);
  bool ok = run.boards == canonical_boards() && run.solved();
  if (method == Method::monolithic) ok = ok && run.self_terminated && run.steps.size() == 8;
  if (!ok) std::cerr << "trace: board sequence does not match 111 -> 222 (" << to_string(run.status) << ")\n";
  return ok ? kOk : kVerifyFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cognitive map learners with hyperdimensional orchestration"};
  app.require_subcommand(1);

  Common common;
  auto add_common = [&common](CLI::App* sub, bool with_format, const std::string& default_format) {
    sub->add_option("--seed", common.seed, "Master seed for every random draw")->capture_default_str();
    sub->add_option("--dimension,-d", common.dimension, "Hypervector dimension")
        ->envname("HDCML_DIM")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    sub->add_option("--out,-o", common.out, "Output path (stdout when omitted)");
    if (with_format) {
      sub->add_option("--format", common.format, "Output format")
          ->check(CLI::IsMember({default_format, std::string("structured")}))
          ->default_str(default_format);
    }
  };

  RingOptions rings;
  auto add_ring_options = [&rings](CLI::App* sub) {
    sub->add_option("--ring-edges", rings.undirected_edges, "Undirected edges per 7-node ring graph")
        ->capture_default_str();
    sub->add_flag("--calculated-rings", rings.calculated, "Build rings from random bipolar states");
  };

  auto* train = app.add_subcommand("train", "Train or calculate a CML and save it");
  std::string graph_source;
  std::string build = "trained";
  train->add_option("--graph", graph_source, "toh, random:n,m or an edge-list file")->required();
  train->add_option("--mode", build, "trained or calculated")
      ->check(CLI::IsMember({"trained", "calculated"}))
      ->capture_default_str();
  add_common(train, false, "");

  auto* plan_cmd = app.add_subcommand("plan", "Plan a path with a saved model");
  std::string model_path;
  std::string from = "111";
  std::string to = "222";
  std::string mode_text = "sign";
  plan_cmd->add_option("--model", model_path, "Model file written by train")->required();
  plan_cmd->add_option("--from", from, "Start node label")->capture_default_str();
  plan_cmd->add_option("--to", to, "Target node label")->capture_default_str();
  plan_cmd->add_option("--mode", mode_text, "raw or sign target")->capture_default_str();

  auto* toh = app.add_subcommand("toh", "Solve a Tower of Hanoi instance with orchestrated ring CMLs");
  std::string method_text = "composite";
  toh->add_option("--method", method_text, "monolithic, partial, mapping or composite")->capture_default_str();
  std::string toh_mode = "raw";
  toh->add_option("--mode", toh_mode, "raw, sign or recover")->capture_default_str();
  toh->add_option("--from", from, "Start board")->capture_default_str();
  toh->add_option("--to", to, "Target board")->capture_default_str();
  add_common(toh, true, "line");
  add_ring_options(toh);

  auto* reproduce = app.add_subcommand("reproduce", "Run a path-success table and compare with reference values");
  int table = 2;
  TrialConfig cfg;
  bool serial = false;
  reproduce->add_option("--table", table, "2 (single CMLs) or 3 (ring orchestration)")
      ->check(CLI::IsMember({2, 3}))
      ->required();
  reproduce->add_option("--trials", cfg.trials, "Trials")->envname("HDCML_TRIALS")->check(CLI::PositiveNumber)
      ->capture_default_str();
  reproduce->add_option("--pairs", cfg.pairs, "Random start/target pairs per trial")->check(CLI::PositiveNumber)
      ->capture_default_str();
  reproduce->add_option("--theta", cfg.thresholds.recognition, "Recognition threshold")->capture_default_str();
  reproduce->add_option("--phi", cfg.thresholds.termination, "Termination threshold")->capture_default_str();
  reproduce->add_option("--composite-theta", cfg.composite_thresholds.recognition,
                        "Recognition threshold of the composite model")
      ->capture_default_str();
  reproduce->add_option("--threads", cfg.threads, "Worker threads (0: OpenMP default)")->capture_default_str();
  reproduce->add_flag("--serial", serial, "Run trials on the serial reference path");
  add_common(reproduce, true, "csv");
  add_ring_options(reproduce);

  auto* trace = app.add_subcommand("trace", "Print the step trace of one 111 -> 222 solve");
  std::string trace_method;
  std::string trace_mode;
  trace->add_option("--method", trace_method, "monolithic, partial, mapping or composite")->required();
  trace->add_option("--mode", trace_mode, "raw, sign or recover (mapping defaults to recover, others to raw)");
  add_common(trace, true, "line");
  add_ring_options(trace);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (train->parsed()) return cmd_train(common, graph_source, build);
    if (plan_cmd->parsed()) return cmd_plan(model_path, from, to, mode_text);
    if (toh->parsed()) return cmd_toh(common, method_text, toh_mode, from, to, rings);
    if (reproduce->parsed()) {
      cfg.rings = rings;
      return cmd_reproduce(common, table, cfg, serial);
    }
    if (trace->parsed()) return cmd_trace(common, trace_method, trace_mode, rings);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kVerifyFailed;
  }
  return kUsage;
}
