#include "mfi/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "mfi/errors.hpp"

namespace mfi::io {

using nlohmann::json;

namespace {

json parse(const std::string& text, const std::string& what) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) throw Error(ErrorCode::ParseError, "invalid JSON in " + what);
  return j;
}

std::vector<double> number_array(const json& j, const std::string& what) {
  if (!j.is_array()) throw Error(ErrorCode::ParseError, what + " must be an array");
  std::vector<double> out;
  out.reserve(j.size());
  for (const auto& v : j) {
    if (!v.is_number()) throw Error(ErrorCode::ParseError, what + " must contain numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

Matrix matrix_from_json(const json& j, const std::string& what) {
  if (!j.is_array() || j.empty())
    throw Error(ErrorCode::ParseError, what + " must be a non-empty array of rows");
  const std::size_t n = j.size();
  Matrix m(n, j[0].size());
  for (std::size_t i = 0; i < n; ++i) {
    const std::vector<double> row = number_array(j[i], what + " row");
    if (row.size() != m.cols())
      throw Error(ErrorCode::ParseError, what + " rows have inconsistent lengths");
    for (std::size_t k = 0; k < row.size(); ++k) m(i, k) = row[k];
  }
  return m;
}

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

StateSpace space_from_json(const json& j) {
  if (!j.contains("states") || !j["states"].is_array())
    throw Error(ErrorCode::ParseError, "missing \"states\" array");
  std::vector<std::string> labels;
  for (const auto& s : j["states"]) {
    if (!s.is_string()) throw Error(ErrorCode::ParseError, "state labels must be strings");
    labels.push_back(s.get<std::string>());
  }
  return StateSpace(std::move(labels));
}

}  // namespace

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path);
  out << content;
}

ChainFile chain_from_json(const json& j) {
  StateSpace space = space_from_json(j);
  if (!j.contains("rates")) throw Error(ErrorCode::ParseError, "missing \"rates\" matrix");
  Matrix rates = matrix_from_json(j["rates"], "rates");
  Generator gen = validate_generator(rates, space);
  std::optional<ProbMeasure> measure;
  if (j.contains("measure"))
    measure = ProbMeasure(gen.space(), number_array(j["measure"], "measure"));
  return ChainFile{std::move(gen), std::move(measure)};
}

ChainFile load_chain(const std::string& path) {
  return chain_from_json(parse(read_file(path), path));
}

json chain_to_json(const Generator& g, const std::optional<ProbMeasure>& measure) {
  json j;
  j["states"] = g.space().labels();
  j["rates"] = matrix_to_json(g.rates());
  if (measure) j["measure"] = measure->weights();
  return j;
}

CoarseGrainMap map_from_json(const json& j, const StateSpace& fine) {
  if (!j.contains("clusters") || !j["clusters"].is_object())
    throw Error(ErrorCode::ParseError, "missing \"clusters\" object");
  std::vector<std::string> coarse_labels;
  std::vector<std::size_t> assignment(fine.size(), fine.size());
  std::size_t y = 0;
  for (const auto& [label, members] : j["clusters"].items()) {
    coarse_labels.push_back(label);
    if (!members.is_array())
      throw Error(ErrorCode::ParseError, "cluster " + label + " must list its states");
    for (const auto& member : members) {
      if (!member.is_string())
        throw Error(ErrorCode::ParseError, "cluster members must be state labels");
      const auto idx = fine.index_of(member.get<std::string>());
      if (!idx)
        throw Error(ErrorCode::ParseError,
                    "cluster " + label + " references unknown state " + member.get<std::string>());
      if (assignment[*idx] != fine.size())
        throw Error(ErrorCode::ParseError,
                    "state " + member.get<std::string>() + " assigned to two clusters");
      assignment[*idx] = y;
    }
    ++y;
  }
  for (std::size_t x = 0; x < fine.size(); ++x)
    if (assignment[x] == fine.size())
      throw Error(ErrorCode::ParseError, "state " + fine.labels()[x] + " not assigned");
  return CoarseGrainMap(fine, StateSpace(std::move(coarse_labels)), std::move(assignment));
}

CoarseGrainMap load_map(const std::string& path, const StateSpace& fine) {
  return map_from_json(parse(read_file(path), path), fine);
}

json map_to_json(const CoarseGrainMap& map) {
  json clusters = json::object();
  for (std::size_t y = 0; y < map.cluster_count(); ++y) {
    json members = json::array();
    for (std::size_t x : map.level_set(y)) members.push_back(map.fine().labels()[x]);
    clusters[map.coarse().labels()[y]] = std::move(members);
  }
  return json{{"clusters", std::move(clusters)}};
}

MultiscaleChain multiscale_from_json(const json& j) {
  StateSpace fine = space_from_json(j);
  CoarseGrainMap map = map_from_json(j, fine);
  if (!j.contains("Q") || !j.contains("G"))
    throw Error(ErrorCode::ParseError, "multiscale file needs \"Q\" and \"G\" matrices");
  return MultiscaleChain(matrix_from_json(j["Q"], "Q"), matrix_from_json(j["G"], "G"),
                         std::move(map));
}

MultiscaleChain load_multiscale(const std::string& path) {
  return multiscale_from_json(parse(read_file(path), path));
}

ProbMeasure load_measure(const std::string& path, const StateSpace& space) {
  const json j = parse(read_file(path), path);
  if (j.is_array()) return ProbMeasure(space, number_array(j, "measure"));
  if (j.contains("measure"))
    return ProbMeasure(space, number_array(j["measure"], "measure"));
  throw Error(ErrorCode::ParseError, "measure file must be an array or carry a \"measure\" key");
}

json report_to_json(const ConstantReport& report) {
  json j;
  j["gpi"] = report.gpi;
  j["spectral_gap"] = report.spectral_gap;
  j["explicit_gpi_lower"] = report.explicit_gpi_lower;
  j["glsi_lower"] = report.glsi_lower;
  j["glsi_upper"] = report.glsi_upper;
  j["glsi_estimate"] = report.glsi_estimate ? json(*report.glsi_estimate) : json(nullptr);
  j["slsi_estimate"] = report.slsi_estimate ? json(*report.slsi_estimate) : json(nullptr);
  j["optimizer_stats"] = {
      {"iterations", report.optimizer_stats.iterations},
      {"restarts", report.optimizer_stats.restarts},
      {"converged_restarts", report.optimizer_stats.converged_restarts},
      {"best_distance_from_one",
       std::isnan(report.optimizer_stats.best_distance_from_one)
           ? json(nullptr)
           : json(report.optimizer_stats.best_distance_from_one)},
  };
  return j;
}

json quality_to_json(const QualityReport& report) {
  json clusters = json::array();
  for (const ClusterQuality& c : report.clusters) {
    json entry;
    entry["cluster"] = c.label;
    entry["states"] = c.conditional.space().labels();
    entry["restricted_rates"] = matrix_to_json(c.restricted.rates());
    entry["conditional"] = c.conditional.weights();
    entry["conditional_min"] = c.conditional_min;
    entry["spectral_gap"] = c.gap;
    entry["glsi_upper"] = c.glsi_upper;
    entry["ratio"] = c.ratio;
    clusters.push_back(std::move(entry));
  }
  return json{{"alpha", report.alpha}, {"clusters", std::move(clusters)}};
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string trajectory_csv(const Trajectory& traj) {
  std::ostringstream out;
  out << "time";
  for (const std::string& label : traj.generator.space().labels()) out << "," << label;
  out << "\n";
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    out << format_double(traj.times[i]);
    for (double v : traj.states[i]) out << "," << format_double(v);
    out << "\n";
  }
  return out.str();
}

std::string audit_csv(const DecayAudit& audit) {
  std::ostringstream out;
  out << "time,variance,entropy,var_dissipation,ent_dissipation,fd_variance,fd_entropy";
  const bool envelopes = !audit.var_envelope.empty();
  const bool alphas = !audit.alpha_gpi_series.empty();
  const bool glsi = !audit.alpha_glsi_series.empty();
  if (envelopes) out << ",var_envelope,ent_envelope";
  if (alphas) out << ",alpha_gpi";
  if (glsi) out << ",alpha_glsi";
  out << "\n";
  for (std::size_t i = 0; i < audit.times.size(); ++i) {
    out << format_double(audit.times[i]) << "," << format_double(audit.variance_series[i]) << ","
        << format_double(audit.entropy_series[i]) << ","
        << format_double(audit.var_dissipation[i]) << ","
        << format_double(audit.ent_dissipation[i]) << "," << format_double(audit.fd_variance[i])
        << "," << format_double(audit.fd_entropy[i]);
    if (envelopes)
      out << "," << format_double(audit.var_envelope[i]) << ","
          << format_double(audit.ent_envelope[i]);
    if (alphas) out << "," << format_double(audit.alpha_gpi_series[i]);
    if (glsi) out << "," << format_double(audit.alpha_glsi_series[i]);
    out << "\n";
  }
  return out.str();
}

std::string trajectory_audit_csv(const Trajectory& traj, const DecayAudit& audit) {
  if (traj.times != audit.times)
    throw Error(ErrorCode::DimensionMismatch, "trajectory and audit time grids differ");
  std::ostringstream out;
  out << "time";
  for (const std::string& label : traj.generator.space().labels()) out << "," << label;
  out << ",variance,entropy,var_dissipation,ent_dissipation,fd_variance,fd_entropy";
  const bool envelopes = !audit.var_envelope.empty();
  const bool alphas = !audit.alpha_gpi_series.empty();
  const bool glsi = !audit.alpha_glsi_series.empty();
  if (envelopes) out << ",var_envelope,ent_envelope";
  if (alphas) out << ",alpha_gpi";
  if (glsi) out << ",alpha_glsi";
  out << "\n";
  for (std::size_t i = 0; i < audit.times.size(); ++i) {
    out << format_double(audit.times[i]);
    for (double v : traj.states[i]) out << "," << format_double(v);
    out << "," << format_double(audit.variance_series[i]) << ","
        << format_double(audit.entropy_series[i]) << ","
        << format_double(audit.var_dissipation[i]) << ","
        << format_double(audit.ent_dissipation[i]) << "," << format_double(audit.fd_variance[i])
        << "," << format_double(audit.fd_entropy[i]);
    if (envelopes)
      out << "," << format_double(audit.var_envelope[i]) << ","
          << format_double(audit.ent_envelope[i]);
    if (alphas) out << "," << format_double(audit.alpha_gpi_series[i]);
    if (glsi) out << "," << format_double(audit.alpha_glsi_series[i]);
    out << "\n";
  }
  return out.str();
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream out;
  out << "eps,sup_H,tv_error,gen_dist\n";
  for (const SweepRow& row : rows)
    out << format_double(row.eps) << "," << format_double(row.sup_entropy) << ","
        << format_double(row.tv_error) << "," << format_double(row.generator_distance) << "\n";
  return out.str();
}

}  // namespace mfi::io
