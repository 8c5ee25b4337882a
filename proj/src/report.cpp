#include "hdcml/report.h"

#include <cstdio>
#include <sstream>

#include <json.hpp>

namespace hdcml {

namespace {

ReferenceCell exact(const char* table, const char* method, TargetMode mode) {
  return {table, method, mode, Quantity::success, 1.0, std::nullopt, 1.0, 1.0};
}

ReferenceCell banded(const char* table, const char* method, TargetMode mode, double ref_mean,
                     double ref_std, double low, double high) {
  return {table, method, mode, Quantity::success, ref_mean, ref_std, low, high};
}

// Reference mean +/- (reference std + 0.02 sampling slack).
ReferenceCell similarity_cell(const char* method, double ref_mean, double ref_std) {
  const double slack = ref_std + 0.02;
  return {"III", method, TargetMode::raw, Quantity::similarity, ref_mean, ref_std,
          ref_mean - slack, ref_mean + slack};
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

}  // namespace

std::vector<ReferenceCell> table2_reference() {
  return {
      banded("II", "baseline", TargetMode::raw, 0.846, 0.042, 0.78, 0.92),
      exact("II", "baseline", TargetMode::sign),
      banded("II", "composite", TargetMode::raw, 0.831, 0.031, 0.77, 0.90),
      exact("II", "composite", TargetMode::sign),
      exact("II", "rand", TargetMode::raw),
      exact("II", "rand", TargetMode::sign),
      exact("II", "rand_composite", TargetMode::raw),
      exact("II", "rand_composite", TargetMode::sign),
  };
}

std::vector<ReferenceCell> table3_reference() {
  std::vector<ReferenceCell> cells;
  for (const char* method : {"monolithic", "partial"}) {
    for (TargetMode mode : {TargetMode::raw, TargetMode::sign, TargetMode::recover}) {
      cells.push_back(exact("III", method, mode));
    }
  }
  cells.push_back(banded("III", "mapping", TargetMode::raw, 0.889, 0.015, 0.83, 0.95));
  cells.push_back(banded("III", "mapping", TargetMode::sign, 0.694, 0.027, 0.62, 0.77));
  cells.push_back(exact("III", "mapping", TargetMode::recover));
  for (TargetMode mode : {TargetMode::raw, TargetMode::sign, TargetMode::recover}) {
    cells.push_back(exact("III", "composite", mode));
  }
  cells.push_back(similarity_cell("monolithic", 0.308, 0.014));
  cells.push_back(similarity_cell("partial", 0.617, 0.210));
  cells.push_back(similarity_cell("mapping", 0.155, 0.032));
  cells.push_back(similarity_cell("composite", 0.503, 0.023));
  return cells;
}

std::vector<CellVerdict> compare(const std::vector<TrialReport>& reports,
                                 const std::vector<ReferenceCell>& cells) {
  std::vector<CellVerdict> verdicts;
  for (const auto& cell : cells) {
    CellVerdict v;
    v.cell = cell;
    const TrialReport* r = nullptr;
    for (const auto& candidate : reports) {
      if (candidate.table == cell.table && candidate.method == cell.method && candidate.mode == cell.mode) {
        r = &candidate;
        break;
      }
    }
    if (r) {
      if (cell.quantity == Quantity::success) {
        v.present = true;
        v.obtained = r->success;
      } else if (r->similarity) {
        v.present = true;
        v.obtained = *r->similarity;
      }
    }
    v.pass = v.present && v.obtained.mean >= cell.low && v.obtained.mean <= cell.high;
    verdicts.push_back(v);
  }
  return verdicts;
}

bool all_pass(const std::vector<CellVerdict>& verdicts) {
  for (const auto& v : verdicts) {
    if (!v.pass) return false;
  }
  return true;
}

std::string to_csv(const std::vector<TrialReport>& reports) {
  std::ostringstream out;
  out << "table,method,mode,mean,std,trials,seed\n";
  for (const auto& r : reports) {
    const auto trials = r.per_trial.size();
    out << r.table << ',' << r.method << ',' << to_string(r.mode) << ',' << fmt(r.success.mean) << ','
        << fmt(r.success.std) << ',' << trials << ',' << r.master_seed << '\n';
  }
  for (const auto& r : reports) {
    // Similarity does not depend on post-processing; report it once per method.
    if (!r.similarity || r.mode != TargetMode::raw) continue;
    out << r.table << ',' << r.method << ",similarity," << fmt(r.similarity->mean) << ','
        << fmt(r.similarity->std) << ',' << r.per_trial.size() << ',' << r.master_seed << '\n';
  }
  return out.str();
}

std::string to_structured(const std::vector<TrialReport>& reports, const TrialConfig& cfg,
                          const std::vector<CellVerdict>& verdicts) {
  using nlohmann::json;
  json doc;
  doc["config"] = {{"master_seed", cfg.master_seed},
                   {"trials", cfg.trials},
                   {"pairs", cfg.pairs},
                   {"dimension", cfg.dimension},
                   {"theta", cfg.thresholds.recognition},
                   {"phi", cfg.thresholds.termination},
                   {"composite_theta", cfg.composite_thresholds.recognition},
                   {"ring_nodes", cfg.rings.nodes},
                   {"ring_edges", cfg.rings.undirected_edges},
                   {"ring_models", cfg.rings.calculated ? "calculated" : "trained"},
                   {"similarity_aggregation", "mean within trial, then mean and sample std across trials"}};
  json reps = json::array();
  for (const auto& r : reports) {
    json rep = {{"table", r.table},
                {"method", r.method},
                {"mode", std::string(to_string(r.mode))},
                {"seed", r.master_seed},
                {"mean", r.success.mean},
                {"std", r.success.std}};
    if (r.similarity) rep["similarity"] = {{"mean", r.similarity->mean}, {"std", r.similarity->std}};
    json trials = json::array();
    for (const auto& t : r.per_trial) {
      json jt = {{"trial", t.trial},
                 {"success", t.success},
                 {"attempts", t.attempts},
                 {"solved", t.solved},
                 {"mean_steps", t.mean_steps}};
      if (t.similarity) jt["similarity"] = *t.similarity;
      json failures = json::array();
      for (const auto& f : t.failures) {
        json jf = {{"start", f.start}, {"target", f.target}, {"kind", f.kind}};
        if (f.oscillating_pair) jf["oscillating_pair"] = {f.oscillating_pair->source, f.oscillating_pair->target};
        failures.push_back(std::move(jf));
      }
      jt["failures"] = std::move(failures);
      trials.push_back(std::move(jt));
    }
    rep["per_trial"] = std::move(trials);
    reps.push_back(std::move(rep));
  }
  doc["reports"] = std::move(reps);
  json cells = json::array();
  for (const auto& v : verdicts) {
    json c = {{"table", v.cell.table},
              {"method", v.cell.method},
              {"mode", v.cell.quantity == Quantity::similarity ? "similarity" : std::string(to_string(v.cell.mode))},
              {"reference_mean", v.cell.reference_mean},
              {"low", v.cell.low},
              {"high", v.cell.high},
              {"pass", v.pass}};
    if (v.cell.reference_std) c["reference_std"] = *v.cell.reference_std;
    if (v.present) c["obtained"] = {{"mean", v.obtained.mean}, {"std", v.obtained.std}};
    cells.push_back(std::move(c));
  }
  doc["verdicts"] = std::move(cells);
  return doc.dump(2) + "\n";
}

std::string side_by_side(const std::vector<CellVerdict>& verdicts) {
  std::ostringstream out;
  char line[256];
  std::snprintf(line, sizeof line, "%-5s %-15s %-10s %-16s %-16s %-17s %s\n", "table", "method", "mode",
                "reference", "obtained", "band", "verdict");
  out << line;
  for (const auto& v : verdicts) {
    const std::string mode = v.cell.quantity == Quantity::similarity ? "similarity" : std::string(to_string(v.cell.mode));
    std::string ref = fmt(v.cell.reference_mean);
    if (v.cell.reference_std) ref += " +- " + fmt(*v.cell.reference_std).substr(1);
    const std::string got = v.present ? fmt(v.obtained.mean) + " +- " + fmt(v.obtained.std).substr(1) : "missing";
    const std::string band = "[" + fmt(v.cell.low) + ", " + fmt(v.cell.high) + "]";
    std::snprintf(line, sizeof line, "%-5s %-15s %-10s %-16s %-16s %-17s %s\n", v.cell.table.c_str(),
                  v.cell.method.c_str(), mode.c_str(), ref.c_str(), got.c_str(), band.c_str(),
                  v.pass ? "PASS" : "FAIL");
    out << line;
  }
  return out.str();
}

std::string format_trace(const OrchestrationRun& run, std::uint64_t seed, int dimension) {
  std::ostringstream out;
  out << "# method=" << to_string(run.method) << " mode=" << to_string(run.mode) << " seed=" << seed
      << " dimension=" << dimension << '\n';
  out << "step board similarity responding mode\n";
  for (const auto& s : run.steps) {
    std::string responding;
    for (int r : s.responding) responding += ring_letter(r);
    out << s.step << ' ' << s.board << ' ' << (s.similarity ? fmt(*s.similarity) : "-") << ' '
        << (responding.empty() ? "-" : responding) << ' ' << to_string(run.mode) << '\n';
  }
  out << "# boards=";
  for (std::size_t i = 0; i < run.boards.size(); ++i) out << (i ? "," : "") << run.boards[i];
  out << " status=" << to_string(run.status) << (run.self_terminated ? " self_terminated" : "") << '\n';
  return out.str();
}

}  // namespace hdcml
