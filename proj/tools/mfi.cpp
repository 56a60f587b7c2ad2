// mfi: generalised Poincare / log-Sobolev constants for finite-state Markov
// chains, trajectory dissipation audits, and coarse-graining quality reports.

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mfi/coarse_graining.hpp"
#include "mfi/constants.hpp"
#include "mfi/dynamics.hpp"
#include "mfi/errors.hpp"
#include "mfi/io.hpp"

namespace {

using nlohmann::json;

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty())
    std::cout << text;
  else
    mfi::io::write_file(out_path, text);
}

std::vector<double> parse_number_list(const std::string& text, const char* what) {
  std::vector<double> values;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t next = text.find(',', pos);
    if (next == std::string::npos) next = text.size();
    const std::string token = text.substr(pos, next - pos);
    try {
      values.push_back(std::stod(token));
    } catch (const std::exception&) {
      throw mfi::Error(mfi::ErrorCode::ParseError,
                       std::string(what) + ": bad number '" + token + "'");
    }
    pos = next + 1;
  }
  if (values.empty())
    throw mfi::Error(mfi::ErrorCode::ParseError, std::string(what) + ": empty list");
  return values;
}

// "a:step:b" ranges or comma-separated values.
std::vector<double> parse_times(const std::string& text) {
  const std::size_t c1 = text.find(':');
  if (c1 == std::string::npos) return parse_number_list(text, "--times");
  const std::size_t c2 = text.find(':', c1 + 1);
  if (c2 == std::string::npos)
    throw mfi::Error(mfi::ErrorCode::ParseError, "--times range must be start:step:end");
  try {
    const double start = std::stod(text.substr(0, c1));
    const double step = std::stod(text.substr(c1 + 1, c2 - c1 - 1));
    const double end = std::stod(text.substr(c2 + 1));
    if (!(step > 0.0) || end < start)
      throw mfi::Error(mfi::ErrorCode::ParseError, "--times range must increase");
    std::vector<double> times;
    for (long long i = 0;; ++i) {
      const double t = start + step * static_cast<double>(i);
      if (t > end + 0.5 * step) break;
      times.push_back(std::min(t, end));
      if (times.size() > 1000000)
        throw mfi::Error(mfi::ErrorCode::ParseError, "--times range too long");
    }
    return times;
  } catch (const std::invalid_argument&) {
    throw mfi::Error(mfi::ErrorCode::ParseError, "--times range must be numeric");
  }
}

mfi::ProbMeasure resolve_measure(const mfi::io::ChainFile& chain, const std::string& measure_path) {
  if (!measure_path.empty())
    return mfi::io::load_measure(measure_path, chain.generator.space());
  if (chain.measure) return *chain.measure;
  return mfi::steady_state(chain.generator);
}

int run(int argc, char** argv) {
  CLI::App app{"generalised functional-inequality toolkit for finite-state Markov chains"};
  app.require_subcommand(1);

  std::string chain_path, measure_path, map_path, ms_path, out_path;
  std::string mu0_text, zeta0_text, eta0_text, times_text = "0:0.1:5", eps_text, which_text = "all";
  std::uint64_t seed = 0;
  int restarts = 16;
  double simplex_tol = 1e-9;
  bool audit = false, audit_glsi = false, verify_tensor = false;
  std::size_t k_clusters = 2, top = 10;
  std::uint64_t budget = 2000000;
  std::vector<std::string> tensor_paths;

  const auto add_out = [&](CLI::App* cmd) {
    cmd->add_option("--out", out_path, "write output to a file instead of stdout");
  };
  const auto add_optimizer = [&](CLI::App* cmd) {
    cmd->add_option("--seed", seed, "optimizer restart seed (default 0)");
    cmd->add_option("--restarts", restarts, "random optimizer restarts (default 16)");
    cmd->add_option("--tol-simplex", simplex_tol,
                    "simplex diameter convergence tolerance (default 1e-9)");
  };

  CLI::App* validate = app.add_subcommand("validate", "check a chain file");
  validate->add_option("chain", chain_path, "chain JSON file")->required();

  CLI::App* constants = app.add_subcommand("constants", "gPI/gLSI/sLSI constants and bounds");
  constants->add_option("chain", chain_path, "chain JSON file")->required();
  constants->add_option("--measure", measure_path,
                        "reference measure file (defaults to the chain's measure, then the "
                        "steady state)");
  constants->add_option("--which", which_text, "gpi|glsi|slsi|bounds|all (default all)");
  add_optimizer(constants);
  add_out(constants);

  CLI::App* evolve_cmd = app.add_subcommand("evolve", "forward Kolmogorov trajectory CSV");
  evolve_cmd->add_option("chain", chain_path, "chain JSON file")->required();
  evolve_cmd->add_option("--mu0", mu0_text, "initial distribution, comma separated")->required();
  evolve_cmd->add_option("--zeta0", zeta0_text,
                         "reference initial distribution for --audit (default: steady state)");
  evolve_cmd->add_option("--times", times_text, "comma list or start:step:end (default 0:0.1:5)");
  evolve_cmd->add_flag("--audit", audit, "emit the dissipation audit instead of raw states");
  evolve_cmd->add_flag("--audit-glsi", audit_glsi, "sample alpha_gLSI along the audit (slow)");
  add_optimizer(evolve_cmd);
  add_out(evolve_cmd);

  CLI::App* cg = app.add_subcommand("coarse-grain", "reduced generators for a map");
  cg->add_option("chain", chain_path, "chain JSON file")->required();
  cg->add_option("map", map_path, "coarse-graining map JSON file")->required();
  add_out(cg);

  CLI::App* quality = app.add_subcommand("quality", "clustering quality score alpha");
  quality->add_option("chain", chain_path, "chain JSON file")->required();
  quality->add_option("map", map_path, "coarse-graining map JSON file")->required();
  add_out(quality);

  CLI::App* search = app.add_subcommand("search", "exhaustive clustering search");
  search->add_option("chain", chain_path, "chain JSON file")->required();
  search->add_option("-k,--clusters", k_clusters, "cluster count (default 2)");
  search->add_option("--budget", budget, "partition enumeration budget");
  search->add_option("--top", top, "ranked maps to print (default 10)");
  add_out(search);

  CLI::App* multiscale = app.add_subcommand("multiscale", "error sweep over eps");
  multiscale->add_option("spec", ms_path, "multiscale JSON file (Q, G, clusters)")->required();
  multiscale->add_option("--eps", eps_text, "decreasing eps values, comma separated")->required();
  multiscale->add_option("--mu0", mu0_text, "fine initial distribution (default uniform)");
  multiscale->add_option("--eta0", eta0_text,
                         "coarse initial distribution (default pushforward of mu0)");
  multiscale->add_option("--times", times_text, "comma list or start:step:end (default 0:0.1:5)");
  add_out(multiscale);

  CLI::App* tensor = app.add_subcommand("tensor", "product of measured chains");
  tensor->add_option("chains", tensor_paths, "chain JSON files")->required()->expected(-1);
  tensor->add_flag("--verify", verify_tensor,
                   "include the tensorisation identity check in the output");
  add_out(tensor);

  CLI11_PARSE(app, argc, argv);

  if (validate->parsed()) {
    try {
      mfi::io::load_chain(chain_path);
    } catch (const mfi::Error& e) {
      std::cerr << e.what() << "\n";
      return mfi::exit_code_for(e.code());
    }
    std::cout << "valid\n";
    return 0;
  }

  mfi::EstimateOptions opts;
  opts.seed = seed;
  opts.restarts = restarts;
  opts.simplex_tol = simplex_tol;

  if (constants->parsed()) {
    const mfi::io::ChainFile chain = mfi::io::load_chain(chain_path);
    const mfi::ProbMeasure zeta = resolve_measure(chain, measure_path);
    mfi::WhichConstants which = mfi::WhichConstants::All;
    if (which_text == "gpi") which = mfi::WhichConstants::Gpi;
    else if (which_text == "glsi") which = mfi::WhichConstants::Glsi;
    else if (which_text == "slsi") which = mfi::WhichConstants::Slsi;
    else if (which_text == "bounds") which = mfi::WhichConstants::Bounds;
    else if (which_text != "all")
      throw mfi::Error(mfi::ErrorCode::InvalidArgument, "--which must be gpi|glsi|slsi|bounds|all");
    const mfi::ConstantReport report = mfi::compute_constants(zeta, chain.generator, which, opts);
    json j = mfi::io::report_to_json(report);
    j["seed"] = seed;
    j["which"] = which_text;
    emit(j.dump(2) + "\n", out_path);
    return 0;
  }

  if (evolve_cmd->parsed()) {
    const mfi::io::ChainFile chain = mfi::io::load_chain(chain_path);
    const std::vector<double> mu0 = parse_number_list(mu0_text, "--mu0");
    const std::vector<double> times = parse_times(times_text);
    const mfi::Trajectory traj = mfi::evolve(chain.generator, mu0, times);
    if (!audit) {
      emit(mfi::io::trajectory_csv(traj), out_path);
      return 0;
    }
    std::vector<double> zeta0;
    if (zeta0_text.empty())
      zeta0 = mfi::steady_state(chain.generator).weights();
    else
      zeta0 = parse_number_list(zeta0_text, "--zeta0");
    mfi::AuditOptions audit_opts;
    audit_opts.sample_alpha_glsi = audit_glsi;
    audit_opts.estimate = opts;
    const mfi::DecayAudit result =
        mfi::dissipation_audit(chain.generator, mu0, zeta0, times, audit_opts);
    // one plot-ready table: trajectory columns followed by the audit series
    std::string csv = mfi::io::trajectory_audit_csv(traj, result);
    emit(csv, out_path);
    return 0;
  }

  if (cg->parsed()) {
    const mfi::io::ChainFile chain = mfi::io::load_chain(chain_path);
    const mfi::CoarseGrainMap map = mfi::io::load_map(map_path, chain.generator.space());
    const mfi::ProbMeasure rho = mfi::steady_state(chain.generator);
    const mfi::Generator effective = mfi::effective_generator(chain.generator, map, rho);
    const mfi::Generator averaged = mfi::averaged_generator(chain.generator, map);
    json j;
    j["map"] = mfi::io::map_to_json(map);
    j["pushforward_steady_state"] = mfi::pushforward(map, rho).weights();
    j["effective"] = mfi::io::chain_to_json(effective, mfi::steady_state(effective));
    j["averaged"] = mfi::io::chain_to_json(averaged, mfi::steady_state(averaged));
    j["effective_vs_averaged_max_diff"] =
        mfi::max_abs_diff(effective.rates(), averaged.rates());
    emit(j.dump(2) + "\n", out_path);
    return 0;
  }

  if (quality->parsed()) {
    const mfi::io::ChainFile chain = mfi::io::load_chain(chain_path);
    const mfi::CoarseGrainMap map = mfi::io::load_map(map_path, chain.generator.space());
    const mfi::QualityReport report = mfi::quality_score(chain.generator, map);
    emit(mfi::io::quality_to_json(report).dump(2) + "\n", out_path);
    return 0;
  }

  if (search->parsed()) {
    const mfi::io::ChainFile chain = mfi::io::load_chain(chain_path);
    mfi::SearchOptions search_opts;
    search_opts.budget = budget;
    const mfi::SearchResult result =
        mfi::clustering_search(chain.generator, k_clusters, search_opts);
    json ranked = json::array();
    for (std::size_t i = 0; i < result.ranked.size() && i < top; ++i) {
      const mfi::ScoredPartition& sp = result.ranked[i];
      json entry = mfi::io::map_to_json(sp.map);
      entry["alpha"] = sp.alpha;
      entry["encoding"] = sp.encoding;
      ranked.push_back(std::move(entry));
    }
    json j;
    j["ranked"] = std::move(ranked);
    j["enumerated"] = result.enumerated;
    j["rejected_singleton"] = result.rejected_singleton;
    j["rejected_reducible"] = result.rejected_reducible;
    emit(j.dump(2) + "\n", out_path);
    return 0;
  }

  if (multiscale->parsed()) {
    const mfi::MultiscaleChain ms = mfi::io::load_multiscale(ms_path);
    const std::vector<double> eps_list = parse_number_list(eps_text, "--eps");
    const std::vector<double> times = parse_times(times_text);
    std::vector<double> mu0;
    if (mu0_text.empty())
      mu0.assign(ms.map().fine().size(), 1.0 / static_cast<double>(ms.map().fine().size()));
    else
      mu0 = parse_number_list(mu0_text, "--mu0");
    std::vector<double> eta0 =
        eta0_text.empty() ? mfi::pushforward(ms.map(), mu0) : parse_number_list(eta0_text, "--eta0");
    const std::vector<mfi::SweepRow> rows =
        mfi::multiscale_error_sweep(ms, eps_list, mu0, eta0, times);
    emit(mfi::io::sweep_csv(rows), out_path);
    return 0;
  }

  if (tensor->parsed()) {
    std::vector<std::pair<mfi::ProbMeasure, mfi::Generator>> chains;
    for (const std::string& path : tensor_paths) {
      const mfi::io::ChainFile chain = mfi::io::load_chain(path);
      chains.emplace_back(resolve_measure(chain, ""), chain.generator);
    }
    const auto [measure, generator] = mfi::tensor_product(chains);
    json j = mfi::io::chain_to_json(generator, measure);
    if (verify_tensor) {
      double min_gpi = std::numeric_limits<double>::infinity();
      for (const auto& [zeta_i, m_i] : chains)
        min_gpi = std::min(min_gpi, mfi::alpha_gpi(zeta_i, m_i));
      const double formula = min_gpi / static_cast<double>(chains.size());
      const double computed = mfi::alpha_gpi(measure, generator);
      j["tensorisation"] = {{"gpi_formula", formula},
                            {"gpi_computed", computed},
                            {"abs_diff", std::abs(formula - computed)}};
    }
    emit(j.dump(2) + "\n", out_path);
    return 0;
  }

  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const mfi::Error& e) {
    std::cerr << e.what() << "\n";
    return mfi::exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
