#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mfi/chain.hpp"
#include "mfi/coarse_graining.hpp"
#include "mfi/constants.hpp"
#include "mfi/dynamics.hpp"

#include <json.hpp>

namespace mfi::io {

struct ChainFile {
  Generator generator;
  std::optional<ProbMeasure> measure;
};

// { "states": [...], "rates": [[...]], "measure": [...] (optional) }
ChainFile load_chain(const std::string& path);
ChainFile chain_from_json(const nlohmann::json& j);
nlohmann::json chain_to_json(const Generator& g, const std::optional<ProbMeasure>& measure);

// { "clusters": { "<coarse>": ["<fine>", ...], ... } }
CoarseGrainMap load_map(const std::string& path, const StateSpace& fine);
CoarseGrainMap map_from_json(const nlohmann::json& j, const StateSpace& fine);
nlohmann::json map_to_json(const CoarseGrainMap& map);

// { "states": [...], "clusters": {...}, "Q": [[...]], "G": [[...]] }
MultiscaleChain load_multiscale(const std::string& path);
MultiscaleChain multiscale_from_json(const nlohmann::json& j);

// A measure file is either a bare array or { "measure": [...] }.
ProbMeasure load_measure(const std::string& path, const StateSpace& space);

nlohmann::json report_to_json(const ConstantReport& report);
nlohmann::json quality_to_json(const QualityReport& report);

// Floating-point cells carry 17 significant digits so values round-trip.
std::string format_double(double v);
std::string trajectory_csv(const Trajectory& traj);
std::string audit_csv(const DecayAudit& audit);
// Trajectory states and audit series zipped into one table; both must share
// the time grid.
std::string trajectory_audit_csv(const Trajectory& traj, const DecayAudit& audit);
std::string sweep_csv(const std::vector<SweepRow>& rows);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace mfi::io
