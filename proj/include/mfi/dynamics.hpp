#pragma once

#include <vector>

#include "mfi/chain.hpp"
#include "mfi/constants.hpp"

namespace mfi {

// Forward Kolmogorov snapshots d/dt mu = M^T mu. Snapshots are probability
// vectors; strict positivity is guaranteed (and checked) for t > 0 only, so
// initial data with zeros are admitted.
struct Trajectory {
  Generator generator;
  std::vector<double> times;
  std::vector<std::vector<double>> states;
  const std::vector<double>& at(std::size_t i) const { return states[i]; }
};

Trajectory evolve(const Generator& m, const std::vector<double>& mu0,
                  const std::vector<double>& times);

// Fixed-step classic Runge-Kutta cross-check of the matrix-exponential path.
Trajectory evolve_rk4(const Generator& m, const std::vector<double>& mu0,
                      const std::vector<double>& times, double max_step = 0.0);

struct AuditOptions {
  double fd_dt = 0.0;             // 0 picks min(1e-3, spacing/10)
  bool sample_alpha_gpi = true;   // alpha_gPI(zeta_t) column
  bool sample_alpha_glsi = false; // alpha_gLSI(zeta_t) column (runs the optimizer per sample)
  EstimateOptions estimate;
};

// Pointwise dissipation audit of two coupled solutions. fd_* columns hold the
// centred finite differences of the series (NaN where the stencil leaves the
// admissible region); envelopes are filled by decay_envelope only.
struct DecayAudit {
  std::vector<double> times;
  std::vector<double> variance_series;
  std::vector<double> entropy_series;
  std::vector<double> var_dissipation;  // -2 E_{zeta_t}(mu_t/zeta_t)
  std::vector<double> ent_dissipation;  // -R_{zeta_t}(mu_t/zeta_t)
  std::vector<double> fd_variance;
  std::vector<double> fd_entropy;
  std::vector<double> var_envelope;
  std::vector<double> ent_envelope;
  std::vector<double> alpha_gpi_series;
  std::vector<double> alpha_glsi_series;
  double alpha_star_entropy = 0.0;   // min glsi lower bound over [delta, T]
  double alpha_star_variance = 0.0;  // 2 * min spectral gap over [delta, T]
};

DecayAudit dissipation_audit(const Generator& m, const std::vector<double>& mu0,
                             const std::vector<double>& zeta0, const std::vector<double>& times,
                             const AuditOptions& options = {});

// Adds the Gronwall envelopes value_0 * min(1, exp(-alpha_star (t - delta)))
// with rates taken from the provable lower-bound chain sampled along zeta_t.
DecayAudit decay_envelope(const Generator& m, const std::vector<double>& mu0,
                          const std::vector<double>& zeta0, const std::vector<double>& times,
                          double delta, const AuditOptions& options = {});

namespace detail {
// var and H of mu relative to zeta with the 0 log 0 = 0 convention for
// non-negative mu.
double variance_of_ratio(const std::vector<double>& zeta, const std::vector<double>& mu);
double entropy_of_ratio(const std::vector<double>& zeta, const std::vector<double>& mu);
}  // namespace detail

}  // namespace mfi
