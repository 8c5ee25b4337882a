#pragma once

#include <filesystem>
#include <string>

#include "hdcml/cml.h"

namespace hdcml {

// JSON document holding d, n, e, the edge list, S, A, G, thresholds and the
// training record. Doubles are written in shortest round-trip form, so a
// save/load cycle reproduces every matrix bit for bit. A+ is recomputed.
std::string model_to_json(const CmlModel& model);
CmlModel model_from_json(const std::string& text);

void save_model(const CmlModel& model, const std::filesystem::path& path);
CmlModel load_model(const std::filesystem::path& path);

}  // namespace hdcml
