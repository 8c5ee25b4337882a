#pragma once

// Reference values, tolerance bands and output formats for experiment reports.

#include <optional>
#include <string>
#include <vector>

#include "hdcml/experiments.h"

namespace hdcml {

enum class Quantity { success, similarity };

struct ReferenceCell {
  std::string table;
  std::string method;
  TargetMode mode;
  Quantity quantity;
  double reference_mean;
  std::optional<double> reference_std;  // empty for exact cells
  double low;
  double high;
};

// Eight success cells.
std::vector<ReferenceCell> table2_reference();
// Twelve success cells and four similarity cells.
std::vector<ReferenceCell> table3_reference();

struct CellVerdict {
  ReferenceCell cell;
  bool present = false;
  Summary obtained;
  bool pass = false;
};

std::vector<CellVerdict> compare(const std::vector<TrialReport>& reports,
                                 const std::vector<ReferenceCell>& cells);
bool all_pass(const std::vector<CellVerdict>& verdicts);

// One row per cell: table,method,mode,mean,std,trials,seed. Similarity
// cells use the mode "similarity".
std::string to_csv(const std::vector<TrialReport>& reports);

// Full-fidelity JSON with per-trial records and, when given, the verdicts.
std::string to_structured(const std::vector<TrialReport>& reports, const TrialConfig& cfg,
                          const std::vector<CellVerdict>& verdicts);

// Human-readable reference vs. obtained table.
std::string side_by_side(const std::vector<CellVerdict>& verdicts);

// Line trace: a "# key=value" header, a column header, then one row per step
// with step, board, similarity, responding rings and mode ("-" when empty).
std::string format_trace(const OrchestrationRun& run, std::uint64_t seed, int dimension);

}  // namespace hdcml
