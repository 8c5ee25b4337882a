#include "hdcml/experiments.h"

#include <algorithm>
#include <exception>
#include <mutex>
#include <numeric>
#include <stdexcept>

#include <omp.h>

#include "hdcml/stats.h"

namespace hdcml {

void TrialConfig::validate() const {
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");
  if (pairs < 1) throw std::invalid_argument("pairs must be >= 1");
  if (dimension < 1) throw std::invalid_argument("dimension must be >= 1");
  for (const Thresholds& t : {thresholds, composite_thresholds, rings.thresholds}) {
    if (t.recognition < 0.0 || t.recognition > 1.0 || t.termination < 0.0 || t.termination > 1.0) {
      throw std::invalid_argument("thresholds must lie in [0, 1]");
    }
  }
}

void for_each_trial(int trials, Execution execution, int threads, const std::function<void(int)>& body) {
  if (execution == Execution::serial) {
    for (int t = 0; t < trials; ++t) body(t);
    return;
  }
  std::exception_ptr error;
  std::mutex error_mutex;
  const int team = threads > 0 ? threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 1) num_threads(team)
  for (int t = 0; t < trials; ++t) {
    try {
      body(t);
    } catch (...) {
      std::lock_guard<std::mutex> lock(error_mutex);
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
}

void TrialReport::aggregate() {
  std::sort(per_trial.begin(), per_trial.end(),
            [](const TrialRecord& a, const TrialRecord& b) { return a.trial < b.trial; });
  std::vector<double> successes;
  std::vector<double> sims;
  for (const auto& r : per_trial) {
    successes.push_back(r.success);
    if (r.similarity) sims.push_back(*r.similarity);
  }
  success = {mean(successes), sample_std(successes)};
  similarity.reset();
  if (!sims.empty()) similarity = Summary{mean(sims), sample_std(sims)};
}

namespace {

constexpr std::uint64_t kTable2Tag = stream_tag("table2");
constexpr std::uint64_t kTable3Tag = stream_tag("table3");
constexpr std::uint64_t kAppendixTag = stream_tag("appendix");

TrialRecord single_model_record(int trial, const CmlModel& model,
                                const std::vector<std::pair<int, int>>& pairs, TargetMode mode) {
  const PathSuccess ps = path_success(model, pairs, mode);
  TrialRecord rec;
  rec.trial = trial;
  rec.attempts = static_cast<int>(pairs.size());
  double steps = 0.0;
  for (const auto& o : ps.outcomes) {
    steps += o.steps;
    if (o.reached) {
      ++rec.solved;
    } else {
      rec.failures.push_back({o.start, o.target, std::string(to_string(o.failure)), o.oscillating_pair});
    }
  }
  rec.success = ps.mean;
  rec.mean_steps = steps / static_cast<double>(pairs.size());
  return rec;
}

Matrix random_bipolar_states(int d, int n, Rng& rng) {
  Matrix states(d, n);
  for (int i = 0; i < n; ++i) states.col(i) = random_bipolar(d, rng);
  return states;
}

// Accumulates orchestration runs into one trial record.
struct RunTally {
  TrialRecord rec;
  double steps = 0.0;
  double sim_sum = 0.0;
  int sim_count = 0;

  void add(const OrchestrationRun& run, int start, int target) {
    ++rec.attempts;
    steps += static_cast<double>(run.steps.size());
    if (run.solved()) {
      ++rec.solved;
    } else {
      rec.failures.push_back({start, target, std::string(to_string(run.status)), std::nullopt});
    }
    if (const auto s = run.mean_similarity()) {
      sim_sum += *s;
      ++sim_count;
    }
  }

  TrialRecord finish(int trial) {
    rec.trial = trial;
    rec.success = static_cast<double>(rec.solved) / rec.attempts;
    rec.mean_steps = steps / rec.attempts;
    if (sim_count > 0) rec.similarity = sim_sum / sim_count;
    return rec;
  }
};

const std::array<TargetMode, 2> kTable2Modes = {TargetMode::raw, TargetMode::sign};
const std::array<TargetMode, 3> kTable3Modes = {TargetMode::raw, TargetMode::sign, TargetMode::recover};
const std::array<const char*, 4> kTable2Methods = {"baseline", "composite", "rand", "rand_composite"};
const std::array<const char*, 4> kTable3Methods = {"monolithic", "partial", "mapping", "composite"};

std::vector<TrialReport> empty_reports(const char* table, std::span<const char* const> methods,
                                       std::span<const TargetMode> modes, const TrialConfig& cfg) {
  std::vector<TrialReport> reports;
  for (const char* method : methods) {
    for (TargetMode mode : modes) {
      TrialReport r;
      r.table = table;
      r.method = method;
      r.mode = mode;
      r.master_seed = cfg.master_seed;
      r.per_trial.resize(cfg.trials);
      reports.push_back(std::move(r));
    }
  }
  return reports;
}

}  // namespace

std::array<std::array<Hypervector, 3>, kRingCount> random_designated(int d, Rng& rng) {
  std::array<std::array<Hypervector, 3>, kRingCount> designated;
  for (auto& ring : designated) {
    for (auto& v : ring) v = random_bipolar(d, rng);
  }
  return designated;
}

std::vector<TrialReport> run_table2(const TrialConfig& cfg) {
  cfg.validate();
  std::vector<TrialReport> reports = empty_reports("II", kTable2Methods, kTable2Modes, cfg);
  const GraphTopology toh = toh_graph();
  const int d = cfg.dimension;

  for_each_trial(cfg.trials, cfg.execution, cfg.threads, [&](int trial) {
    Rng rng = derive_stream(cfg.master_seed, {kTable2Tag, static_cast<std::uint64_t>(trial)});
    const CmlModel ct = CmlModel::from_states(toh, random_bipolar_states(d, 27, rng), cfg.thresholds);
    const Matrix composite = composite_states(random_designated(d, rng));
    const CmlModel cs = CmlModel::from_states(toh, composite, cfg.composite_thresholds);

    const GraphTopology random_graph = random_connected_graph(27, 78, rng);
    const CmlModel rand = CmlModel::from_states(random_graph, random_bipolar_states(d, 27, rng), cfg.thresholds);
    std::vector<int> order(27);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    Matrix shuffled(d, 27);
    for (int i = 0; i < 27; ++i) shuffled.col(i) = composite.col(order[i]);
    const CmlModel rand_composite = CmlModel::from_states(random_graph, shuffled, cfg.composite_thresholds);

    const auto pairs = sample_pairs(27, cfg.pairs, rng);
    const std::array<const CmlModel*, 4> models = {&ct, &cs, &rand, &rand_composite};
    for (std::size_t m = 0; m < models.size(); ++m) {
      for (std::size_t k = 0; k < kTable2Modes.size(); ++k) {
        reports[m * kTable2Modes.size() + k].per_trial[trial] =
            single_model_record(trial, *models[m], pairs, kTable2Modes[k]);
      }
    }
  });
  for (auto& r : reports) r.aggregate();
  return reports;
}

std::vector<TrialReport> run_table3(const TrialConfig& cfg) {
  cfg.validate();
  std::vector<TrialReport> reports = empty_reports("III", kTable3Methods, kTable3Modes, cfg);
  const GraphTopology toh = toh_graph();
  const int d = cfg.dimension;
  const int solve_start = TohState{1, 1, 1}.index();
  const int solve_target = TohState{2, 2, 2}.index();

  for_each_trial(cfg.trials, cfg.execution, cfg.threads, [&](int trial) {
    Rng rng = derive_stream(cfg.master_seed, {kTable3Tag, static_cast<std::uint64_t>(trial)});
    const RingSystem rs = build_ring_system(d, rng, cfg.rings);
    const CmlModel ct = CmlModel::from_states(toh, random_bipolar_states(d, 27, rng), cfg.thresholds);
    const Hypervector policy = build_monolithic_policy(rs, rng);
    const auto partial = build_partial_policies(rs, rng);
    const auto maps = build_maps(ct, rs, rng);
    const CmlModel cs = build_composite(rs, cfg.composite_thresholds);
    const auto pairs = sample_pairs(27, cfg.pairs, rng);

    for (std::size_t k = 0; k < kTable3Modes.size(); ++k) {
      const TargetMode mode = kTable3Modes[k];
      RunTally mono;
      mono.add(run_monolithic(rs, policy, mode), solve_start, solve_target);
      RunTally part;
      part.add(run_partial(rs, partial, mode), solve_start, solve_target);
      RunTally mapping;
      RunTally composite;
      for (const auto& [s, t] : pairs) {
        mapping.add(run_mapping(ct, rs, maps, s, t, mode), s, t);
        composite.add(run_composite(cs, rs, s, t, mode), s, t);
      }
      const std::size_t stride = kTable3Modes.size();
      reports[0 * stride + k].per_trial[trial] = mono.finish(trial);
      reports[1 * stride + k].per_trial[trial] = part.finish(trial);
      reports[2 * stride + k].per_trial[trial] = mapping.finish(trial);
      reports[3 * stride + k].per_trial[trial] = composite.finish(trial);
    }
  });
  for (auto& r : reports) r.aggregate();
  return reports;
}

const TrialReport* find_report(const std::vector<TrialReport>& reports, std::string_view method,
                               TargetMode mode) {
  for (const auto& r : reports) {
    if (r.method == method && r.mode == mode) return &r;
  }
  return nullptr;
}

const std::array<NodePair, 3>& corner_pairs() {
  static const std::array<NodePair, 3> pairs = {
      NodePair{"133", "233"}, NodePair{"122", "322"}, NodePair{"211", "311"}};
  return pairs;
}

FailureCensus failure_census(const TrialReport& report, const GraphTopology& graph) {
  FailureCensus census;
  for (const auto& trial : report.per_trial) {
    for (const auto& f : trial.failures) {
      ++census.failures;
      if (!f.oscillating_pair) {
        ++census.outside_corners;
        continue;
      }
      ++census.oscillations;
      NodePair pair{graph.label(f.oscillating_pair->source), graph.label(f.oscillating_pair->target)};
      if (pair.second < pair.first) std::swap(pair.first, pair.second);
      ++census.by_pair[pair];
      const auto& corners = corner_pairs();
      if (std::find(corners.begin(), corners.end(), pair) == corners.end()) ++census.outside_corners;
    }
  }
  return census;
}

double mean_sign_similarity(const CmlModel& model) {
  double sum = 0.0;
  for (int i = 0; i < model.node_count(); ++i) sum += cosine_similarity(model.state(i), model.code(i));
  return sum / model.node_count();
}

CompositeSimilarity composite_similarity(const std::array<std::array<Hypervector, 3>, kRingCount>& designated) {
  const Matrix t = composite_states(designated);
  CompositeSimilarity out;
  double component = 0.0;
  for (int node = 0; node < 27; ++node) {
    const TohState s = TohState::from_index(node);
    for (int r = 0; r < kRingCount; ++r) component += cosine_similarity(t.col(node), designated[r][s.peg(r) - 1]);
  }
  out.component = component / (27.0 * kRingCount);
  double pairwise = 0.0;
  for (int a = 0; a < 27; ++a) {
    for (int b = 0; b < 27; ++b) {
      if (a != b) pairwise += cosine_similarity(t.col(a), t.col(b));
    }
  }
  out.pairwise = pairwise / (27.0 * 26.0);
  return out;
}

OrchestrationRun appendix_run(Method method, TargetMode mode, std::uint64_t seed, int dimension,
                              const RingOptions& rings) {
  Rng rng = derive_stream(seed, {kAppendixTag});
  const RingSystem rs = build_ring_system(dimension, rng, rings);
  const GraphTopology toh = toh_graph();
  const CmlModel ct = CmlModel::from_states(toh, random_bipolar_states(dimension, 27, rng));
  const int start = TohState{1, 1, 1}.index();
  const int target = TohState{2, 2, 2}.index();
  switch (method) {
    case Method::monolithic: return run_monolithic(rs, build_monolithic_policy(rs, rng), mode);
    case Method::partial: return run_partial(rs, build_partial_policies(rs, rng), mode);
    case Method::mapping: return run_mapping(ct, rs, build_maps(ct, rs, rng), start, target, mode);
    case Method::composite: return run_composite(build_composite(rs), rs, start, target, mode);
  }
  throw std::invalid_argument("appendix_run: unknown method");
}

}  // namespace hdcml
