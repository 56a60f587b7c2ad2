#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "mfi/chain.hpp"
#include "mfi/functionals.hpp"

namespace mfi {

// Reversible generator with steady state zeta obtained by averaging M with
// its zeta-adjoint; off-diagonals (M(z,z') + zeta(z')/zeta(z) M(z',z))/2,
// diagonal set to the negative row sum.
struct SymmetrisedGenerator {
  Generator base;
  ProbMeasure reference;
  Generator sym;
};

SymmetrisedGenerator symmetrise(const Generator& m, const ProbMeasure& zeta);

// Magnitude of the largest nonzero eigenvalue of the symmetrised generator,
// computed on the diag(zeta)^{1/2}-conjugated symmetric matrix.
double spectral_gap(const SymmetrisedGenerator& s);

struct SpectralGapMode {
  double gap = 0.0;
  std::vector<double> mode;  // minimiser of the Rayleigh quotient, E_zeta[mode] = 0
};
SpectralGapMode spectral_gap_with_mode(const SymmetrisedGenerator& s);

// Generalised Poincare constant; equals the spectral gap of the symmetrised
// generator and is cross-checked against the flat-complement Rayleigh
// minimisation on every call.
double alpha_gpi(const ProbMeasure& zeta, const Generator& m);

// Independent route: exact minimisation of E_zeta(f)/var_zeta(f) over the
// flat orthogonal complement of the constants.
double alpha_gpi_rayleigh(const ProbMeasure& zeta, const Generator& m);

struct OptimizerStats {
  long long iterations = 0;
  int restarts = 0;
  int converged_restarts = 0;
  double best_distance_from_one = 0.0;  // ||phi - 1||_zeta at the optimizer's best point
};

struct EstimateOptions {
  std::uint64_t seed = 0;
  int restarts = 16;          // random restarts; one extra directed restart is always added
  double simplex_tol = 1e-9;  // simplex diameter convergence threshold
  int max_iterations = 20000;
  bool force_simplex = false;  // bypass the 2-state grid path (used for cross-checks)
};

struct GlsiEstimate {
  double value = 0.0;
  double lower = 0.0;  // provable bound of the explicit lower-bound chain
  double upper = 0.0;  // 2 * alpha_gpi
  OptimizerStats stats;
};

// Multi-start simplex estimate of inf R_zeta(phi)/H_zeta(phi) over densities,
// parametrised by phi(u) = exp(u)/E_zeta[exp(u)]. Two-state inputs use a
// 2048-point grid with golden-section refinement instead.
GlsiEstimate alpha_glsi_estimate(const ProbMeasure& zeta, const Generator& m,
                                 const EstimateOptions& options = {});

// The 1-D grid/golden-section route on its own; the oracle family for the
// optimizer cross-checks.
double alpha_glsi_grid_2state(const ProbMeasure& zeta, const Generator& m,
                              int grid_points = 2048);

// Standard-LSI constant estimate inf E(f,M^zeta)/Ent(f^2) over positive f.
double alpha_slsi_estimate(const SymmetrisedGenerator& s, const EstimateOptions& options = {});

struct LowerBounds {
  double gpi_lower = 0.0;   // zeta_* M_* / |Z|
  double glsi_lower = 0.0;  // max of the explicit and spectral-gap forms
};

LowerBounds explicit_lower_bounds(const ProbMeasure& zeta, const Generator& m);

// Product chain of d components: product measure and the (1/d)-averaged
// Kronecker-sum generator.
struct TensorOptions {
  std::size_t max_states = 4096;
};
std::pair<ProbMeasure, Generator> tensor_product(
    const std::vector<std::pair<ProbMeasure, Generator>>& chains,
    const TensorOptions& options = {});

// Witness that the naive Poincare quotient (f,-Mf)_zeta / var_zeta(f) is
// unbounded below when zeta is not the steady state.
struct NaiveWitness {
  Observable f;          // c*1 + h with h in the zeta-orthogonal complement
  double ratio = 0.0;    // naive quotient at f; negative by construction
  double constant_part = 0.0;
};
std::optional<NaiveWitness> naive_pi_probe(const ProbMeasure& zeta, const Generator& m);

// (f,-Mf)_zeta / var_zeta(f); the quotient probed above.
double naive_rayleigh(const ProbMeasure& zeta, const Observable& f, const Generator& m);

enum class WhichConstants { Gpi, Glsi, Slsi, Bounds, All };

struct ConstantReport {
  double gpi = 0.0;
  double spectral_gap = 0.0;
  double explicit_gpi_lower = 0.0;
  double glsi_lower = 0.0;
  double glsi_upper = 0.0;
  std::optional<double> glsi_estimate;
  std::optional<double> slsi_estimate;
  OptimizerStats optimizer_stats;
};

ConstantReport compute_constants(const ProbMeasure& zeta, const Generator& m,
                                 WhichConstants which = WhichConstants::All,
                                 const EstimateOptions& options = {});

struct ContinuityRow {
  double gpi = 0.0;
  double glsi = 0.0;
};

// Constants sampled along a path of reference measures.
std::vector<ContinuityRow> continuity_scan(const std::vector<ProbMeasure>& zeta_path,
                                           const Generator& m,
                                           const EstimateOptions& options = {});

}  // namespace mfi
