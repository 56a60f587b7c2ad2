#include "mfi/constants.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "mfi/errors.hpp"
#include "mfi/optimize.hpp"
#include "mfi/rng.hpp"

namespace mfi {

namespace {

Matrix symmetrised_rates(const Matrix& m, const std::vector<double>& zeta) {
  const std::size_t n = zeta.size();
  Matrix s(n, n);
  for (std::size_t z = 0; z < n; ++z) {
    double row = 0.0;
    for (std::size_t zp = 0; zp < n; ++zp) {
      if (z == zp) continue;
      s(z, zp) = 0.5 * (m(z, zp) + zeta[zp] / zeta[z] * m(zp, z));
      row += s(z, zp);
    }
    s(z, z) = -row;
  }
  return s;
}

// Ratio R_zeta(phi)/H_zeta(phi) with the quadratic-regime limit near phi = 1.
double glsi_ratio(const std::vector<double>& w, const std::vector<double>& phi,
                  const Matrix& rates, double two_gpi_hint) {
  const double h = detail::entropy_of_density(w, phi);
  if (h < 1e-10) {
    std::vector<double> f(phi.size());
    for (std::size_t z = 0; z < phi.size(); ++z) f[z] = phi[z] - 1.0;
    const double var = detail::variance(w, f);
    if (var <= 0.0) return two_gpi_hint;
    return 2.0 * detail::gen_dirichlet(w, f, rates) / var;
  }
  return detail::gen_fisher(w, phi, rates) / h;
}

// Ratio E_zeta(f, M^zeta)/Ent_zeta(f^2) with its quadratic-regime limit.
double slsi_ratio(const std::vector<double>& w, const std::vector<double>& f,
                  const Matrix& sym_rates, double half_gap_hint) {
  std::vector<double> f2(f.size());
  for (std::size_t z = 0; z < f.size(); ++z) f2[z] = f[z] * f[z];
  const double ent = detail::centred_entropy(w, f2);
  if (ent < 1e-10) {
    // within rounding distance of the constants even the two-pass variance is
    // noise, and the quadratic limit along the surviving direction applies
    const double var = detail::variance(w, f);
    if (var < 1e-24) return half_gap_hint;
    return detail::gen_dirichlet(w, f, sym_rates) / (2.0 * var);
  }
  return detail::gen_dirichlet(w, f, sym_rates) / ent;
}

struct MultiStartResult {
  std::vector<double> best_x;
  double best_value = 0.0;
  OptimizerStats stats;
};

// Shared multi-start scheme: one directed restart along the worst Rayleigh
// direction, then seeded random restarts with cycling spreads.
MultiStartResult multi_start(const std::function<double(const std::vector<double>&)>& objective,
                             const std::vector<double>& directed_mode,
                             const EstimateOptions& options, std::size_t dim) {
  Rng rng(options.seed);
  MultiStartResult out;
  out.best_value = std::numeric_limits<double>::infinity();

  const double spreads[] = {0.5, 1.0, 2.0, 4.0};
  for (int r = 0; r <= options.restarts; ++r) {
    std::vector<double> x0(dim, 0.0);
    SimplexOptions sopt;
    sopt.diameter_tol = options.simplex_tol;
    sopt.max_iterations = options.max_iterations;
    if (r == 0) {
      const double delta = 0.25;
      for (std::size_t i = 0; i < dim; ++i) x0[i] = std::log1p(delta * directed_mode[i]);
      sopt.initial_step = 0.05;
    } else {
      const double spread = spreads[(r - 1) % 4];
      for (std::size_t i = 0; i < dim; ++i) x0[i] = rng.uniform(-spread, spread);
      sopt.initial_step = 0.25 * spread;
    }
    SimplexResult res = nelder_mead(objective, x0, sopt);
    out.stats.iterations += res.iterations;
    ++out.stats.restarts;
    if (res.converged) ++out.stats.converged_restarts;
    if (res.fx < out.best_value) {
      out.best_value = res.fx;
      out.best_x = res.x;
    }
  }
  if (out.stats.converged_restarts == 0)
    throw Error(ErrorCode::OptimizerDidNotConverge, "no simplex restart converged");
  return out;
}

std::vector<double> exp_normalised(const std::vector<double>& u, const std::vector<double>& w) {
  const std::size_t n = u.size();
  const double umax = *std::max_element(u.begin(), u.end());
  std::vector<double> phi(n);
  double mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    phi[i] = std::exp(u[i] - umax);
    mean += phi[i] * w[i];
  }
  for (double& p : phi) p /= mean;
  return phi;
}

bool spread_too_large(const std::vector<double>& u) {
  const auto [lo, hi] = std::minmax_element(u.begin(), u.end());
  return *hi - *lo > 120.0;
}

double distance_from_one(const std::vector<double>& w, const std::vector<double>& phi) {
  double s = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) s += w[i] * (phi[i] - 1.0) * (phi[i] - 1.0);
  return std::sqrt(s);
}

double golden_section(const std::function<double(double)>& f, double a, double b, double tol,
                      long long& evals, double* argmin = nullptr) {
  const double invphi = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = b - invphi * (b - a);
  double x2 = a + invphi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  evals += 2;
  while (b - a > tol) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - invphi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + invphi * (b - a);
      f2 = f(x2);
    }
    ++evals;
  }
  if (argmin) *argmin = f1 < f2 ? x1 : x2;
  return std::min(f1, f2);
}

}  // namespace

SymmetrisedGenerator symmetrise(const Generator& m, const ProbMeasure& zeta) {
  detail::require_same_space(m.space(), zeta.space(), "symmetrise");
  Matrix s = symmetrised_rates(m.rates(), zeta.weights());
  Generator sym(m.space(), s);

  const std::size_t n = zeta.size();
  double scale = 0.0;
  for (std::size_t z = 0; z < n; ++z)
    for (std::size_t zp = 0; zp < n; ++zp)
      if (z != zp) scale = std::max(scale, std::abs(zeta[z] * s(z, zp)));
  if (scale == 0.0) scale = 1.0;
  for (std::size_t z = 0; z < n; ++z)
    for (std::size_t zp = z + 1; zp < n; ++zp)
      if (std::abs(zeta[z] * s(z, zp) - zeta[zp] * s(zp, z)) > 1e-12 * scale)
        throw Error(ErrorCode::EigensolveFailure, "symmetrised generator broke detailed balance");

  const ProbMeasure pi = steady_state(sym);
  for (std::size_t z = 0; z < n; ++z)
    if (std::abs(pi[z] - zeta[z]) > 1e-10)
      throw Error(ErrorCode::EigensolveFailure,
                  "symmetrised generator steady state drifted from the reference");
  return SymmetrisedGenerator{m, zeta, std::move(sym)};
}

SpectralGapMode spectral_gap_with_mode(const SymmetrisedGenerator& s) {
  const std::size_t n = s.reference.size();
  const std::vector<double>& zeta = s.reference.weights();
  // conjugate to a symmetric matrix with the same spectrum
  Matrix a(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      a(i, j) = std::sqrt(zeta[i] / zeta[j]) * s.sym(i, j);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double v = 0.5 * (a(i, j) + a(j, i));
      a(i, j) = v;
      a(j, i) = v;
    }
  SymmetricEigen eig = jacobi_eigensolve(std::move(a));
  const double scale = std::max(1.0, std::abs(eig.values.back()));
  if (std::abs(eig.values[0]) > 1e-8 * scale)
    throw Error(ErrorCode::EigensolveFailure, "kernel eigenvalue missing from spectrum");
  const double gap = -eig.values[1];
  if (!(gap > 0.0))
    throw Error(ErrorCode::EigensolveFailure, "spectral gap not positive");

  SpectralGapMode out;
  out.gap = gap;
  out.mode.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.mode[i] = eig.vectors(i, 1) / std::sqrt(zeta[i]);
  const double m = max_abs(out.mode);
  for (double& v : out.mode) v /= m;
  return out;
}

double spectral_gap(const SymmetrisedGenerator& s) { return spectral_gap_with_mode(s).gap; }

double alpha_gpi_rayleigh(const ProbMeasure& zeta, const Generator& m) {
  detail::require_same_space(m.space(), zeta.space(), "alpha_gpi_rayleigh");
  const std::size_t n = zeta.size();
  const std::vector<double>& w = zeta.weights();

  // E_zeta(f) = f^T K f
  Matrix k(n, n);
  for (std::size_t z = 0; z < n; ++z)
    for (std::size_t zp = 0; zp < n; ++zp) {
      if (z == zp) continue;
      const double c = 0.5 * (m(z, zp) * w[z] + m(zp, z) * w[zp]);
      k(z, zp) -= c;
      k(z, z) += c;
    }
  // var_zeta(f) = f^T B f
  Matrix b(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    b(i, i) = w[i];
    for (std::size_t j = 0; j < n; ++j) b(i, j) -= w[i] * w[j];
  }

  // Helmert basis of the flat complement of the constants.
  Matrix q(n, n - 1);
  for (std::size_t col = 0; col < n - 1; ++col) {
    const double kk = static_cast<double>(col + 1);
    const double norm = std::sqrt(kk * (kk + 1.0));
    for (std::size_t i = 0; i <= col; ++i) q(i, col) = 1.0 / norm;
    q(col + 1, col) = -kk / norm;
  }
  const Matrix qt = transpose(q);
  const Matrix kr = qt * (k * q);
  const Matrix br = qt * (b * q);

  const Matrix l = cholesky(br);
  // inverse of the lower factor by forward substitution
  const std::size_t r = n - 1;
  Matrix li(r, r);
  for (std::size_t col = 0; col < r; ++col) {
    li(col, col) = 1.0 / l(col, col);
    for (std::size_t i = col + 1; i < r; ++i) {
      double s = 0.0;
      for (std::size_t j = col; j < i; ++j) s += l(i, j) * li(j, col);
      li(i, col) = -s / l(i, i);
    }
  }
  Matrix c = li * (kr * transpose(li));
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = i + 1; j < r; ++j) {
      const double v = 0.5 * (c(i, j) + c(j, i));
      c(i, j) = v;
      c(j, i) = v;
    }
  SymmetricEigen eig = jacobi_eigensolve(std::move(c));
  return eig.values.back();
}

double alpha_gpi(const ProbMeasure& zeta, const Generator& m) {
  const double gap = spectral_gap(symmetrise(m, zeta));
  const double rayleigh = alpha_gpi_rayleigh(zeta, m);
  if (std::abs(gap - rayleigh) > 1e-8 * std::max(1.0, gap))
    throw Error(ErrorCode::EigensolveFailure,
                "spectral gap and Rayleigh minimisation disagree: " + std::to_string(gap) +
                    " vs " + std::to_string(rayleigh));
  return gap;
}

namespace {

struct Grid2StateResult {
  double value = 0.0;
  double best_phi1 = 1.0;
  long long evaluations = 0;
};

Grid2StateResult glsi_grid_2state_impl(const ProbMeasure& zeta, const Generator& m,
                                       int grid_points) {
  const double p = zeta[0];
  const auto ratio_at = [&](double phi1) {
    const std::vector<double> phi{phi1, (1.0 - p * phi1) / (1.0 - p)};
    return glsi_ratio(zeta.weights(), phi, m.rates(),
                      std::numeric_limits<double>::infinity());
  };
  const double hi = 1.0 / p;
  Grid2StateResult out;
  out.value = std::numeric_limits<double>::infinity();
  int best = 1;
  for (int k = 1; k <= grid_points; ++k) {
    const double phi1 = hi * static_cast<double>(k) / static_cast<double>(grid_points + 1);
    const double v = ratio_at(phi1);
    ++out.evaluations;
    if (v < out.value) {
      out.value = v;
      out.best_phi1 = phi1;
      best = k;
    }
  }
  const double lo_bracket = hi * static_cast<double>(best - 1) / static_cast<double>(grid_points + 1);
  const double hi_bracket = hi * static_cast<double>(best + 1) / static_cast<double>(grid_points + 1);
  double refined_x = 0.0;
  const double refined =
      golden_section(ratio_at, std::max(lo_bracket, 1e-14 * hi),
                     std::min(hi_bracket, hi * (1.0 - 1e-14)), 1e-12 * hi, out.evaluations,
                     &refined_x);
  if (refined < out.value) {
    out.value = refined;
    out.best_phi1 = refined_x;
  }
  return out;
}

}  // namespace

double alpha_glsi_grid_2state(const ProbMeasure& zeta, const Generator& m, int grid_points) {
  detail::require_same_space(m.space(), zeta.space(), "alpha_glsi_grid_2state");
  if (zeta.size() != 2)
    throw Error(ErrorCode::InvalidArgument, "grid route is for two-state chains");
  return glsi_grid_2state_impl(zeta, m, grid_points).value;
}

GlsiEstimate alpha_glsi_estimate(const ProbMeasure& zeta, const Generator& m,
                                 const EstimateOptions& options) {
  detail::require_same_space(m.space(), zeta.space(), "alpha_glsi_estimate");
  const std::size_t n = zeta.size();
  const std::vector<double>& w = zeta.weights();

  const SymmetrisedGenerator s = symmetrise(m, zeta);
  const SpectralGapMode gap = spectral_gap_with_mode(s);
  const LowerBounds bounds = explicit_lower_bounds(zeta, m);

  GlsiEstimate est;
  est.lower = bounds.glsi_lower;
  est.upper = 2.0 * gap.gap;

  if (n == 2 && !options.force_simplex) {
    // One free coordinate; a dense grid plus golden-section refinement is
    // exact enough to double as the oracle family.
    const Grid2StateResult grid = glsi_grid_2state_impl(zeta, m, 2048);
    est.value = std::min(grid.value, est.upper);
    est.stats.restarts = 0;
    est.stats.converged_restarts = 1;
    est.stats.iterations = grid.evaluations;
    const double phi2 = (1.0 - w[0] * grid.best_phi1) / (1.0 - w[0]);
    est.stats.best_distance_from_one =
        std::sqrt(w[0] * (grid.best_phi1 - 1.0) * (grid.best_phi1 - 1.0) +
                  w[1] * (phi2 - 1.0) * (phi2 - 1.0));
    return est;
  }

  const auto objective = [&](const std::vector<double>& u) {
    if (spread_too_large(u)) return std::numeric_limits<double>::infinity();
    return glsi_ratio(w, exp_normalised(u, w), m.rates(), est.upper);
  };
  MultiStartResult ms = multi_start(objective, gap.mode, options, n);
  est.stats = ms.stats;
  est.stats.best_distance_from_one = distance_from_one(w, exp_normalised(ms.best_x, w));
  est.value = std::min(ms.best_value, est.upper);
  return est;
}

double alpha_slsi_estimate(const SymmetrisedGenerator& s, const EstimateOptions& options) {
  const std::size_t n = s.reference.size();
  const std::vector<double>& w = s.reference.weights();
  const SpectralGapMode gap = spectral_gap_with_mode(s);
  const double half_gap = 0.5 * gap.gap;

  const auto objective = [&](const std::vector<double>& u) {
    if (spread_too_large(u)) return std::numeric_limits<double>::infinity();
    const double umax = *std::max_element(u.begin(), u.end());
    std::vector<double> f(n);
    for (std::size_t i = 0; i < n; ++i) f[i] = std::exp(u[i] - umax);
    return slsi_ratio(w, f, s.sym.rates(), half_gap);
  };
  MultiStartResult ms = multi_start(objective, gap.mode, options, n);
  // The quadratic limit along the worst direction is itself an upper bound
  // for the infimum.
  return std::min(ms.best_value, half_gap);
}

LowerBounds explicit_lower_bounds(const ProbMeasure& zeta, const Generator& m) {
  detail::require_same_space(m.space(), zeta.space(), "explicit_lower_bounds");
  LowerBounds out;
  out.gpi_lower = zeta.min_weight() * m.min_positive_rate() / static_cast<double>(m.size());
  const double gap = spectral_gap(symmetrise(m, zeta));
  const double denom = 1.0 + 0.5 * std::log(1.0 / zeta.min_weight());
  out.glsi_lower = std::max(out.gpi_lower / denom, gap / denom);
  return out;
}

std::pair<ProbMeasure, Generator> tensor_product(
    const std::vector<std::pair<ProbMeasure, Generator>>& chains, const TensorOptions& options) {
  if (chains.empty())
    throw Error(ErrorCode::InvalidArgument, "tensor product needs at least one chain");
  const std::size_t d = chains.size();
  std::size_t total = 1;
  for (const auto& [zeta, gen] : chains) {
    detail::require_same_space(zeta.space(), gen.space(), "tensor_product");
    if (total > options.max_states / zeta.size())
      throw Error(ErrorCode::SizeOverflow,
                  "product space exceeds " + std::to_string(options.max_states) + " states");
    total *= zeta.size();
  }

  // Row-major multi-index over the factors, first factor slowest.
  std::vector<std::size_t> sizes(d);
  for (std::size_t i = 0; i < d; ++i) sizes[i] = chains[i].first.size();
  const auto decode = [&](std::size_t flat) {
    std::vector<std::size_t> idx(d);
    for (std::size_t i = d; i-- > 0;) {
      idx[i] = flat % sizes[i];
      flat /= sizes[i];
    }
    return idx;
  };

  std::vector<std::string> labels(total);
  std::vector<double> weights(total, 1.0);
  for (std::size_t x = 0; x < total; ++x) {
    const std::vector<std::size_t> idx = decode(x);
    std::string label;
    for (std::size_t i = 0; i < d; ++i) {
      if (i) label += "|";
      label += chains[i].first.space().labels()[idx[i]];
      weights[x] *= chains[i].first[idx[i]];
    }
    labels[x] = label;
  }

  Matrix rates(total, total);
  const double inv_d = 1.0 / static_cast<double>(d);
  for (std::size_t x = 0; x < total; ++x) {
    const std::vector<std::size_t> idx = decode(x);
    std::size_t stride = 1;
    for (std::size_t i = d; i-- > 0;) {
      const Generator& gi = chains[i].second;
      const std::size_t base = x - idx[i] * stride;  // x with digit i zeroed
      for (std::size_t v = 0; v < sizes[i]; ++v)
        rates(x, base + v * stride) += inv_d * gi(idx[i], v);
      stride *= sizes[i];
    }
  }

  StateSpace space(std::move(labels));
  return {ProbMeasure::normalized(space, weights), Generator(space, std::move(rates))};
}

double naive_rayleigh(const ProbMeasure& zeta, const Observable& f, const Generator& m) {
  detail::require_same_space(zeta.space(), f.space, "naive_rayleigh");
  detail::require_same_space(zeta.space(), m.space(), "naive_rayleigh");
  const std::vector<double> mf = mat_vec(m.rates(), f.values);
  double num = 0.0;
  for (std::size_t z = 0; z < zeta.size(); ++z) num -= zeta[z] * f.values[z] * mf[z];
  const double var = detail::variance(zeta.weights(), f.values);
  if (var <= 0.0) throw Error(ErrorCode::InvalidArgument, "naive quotient needs non-constant f");
  return num / var;
}

std::optional<NaiveWitness> naive_pi_probe(const ProbMeasure& zeta, const Generator& m) {
  detail::require_same_space(m.space(), zeta.space(), "naive_pi_probe");
  const ProbMeasure pi = steady_state(m);
  const std::size_t n = zeta.size();
  double tv = 0.0;
  for (std::size_t z = 0; z < n; ++z) tv += std::abs(zeta[z] - pi[z]);
  tv *= 0.5;
  if (tv <= 1e-8) return std::nullopt;

  // Scan the zeta-orthogonal basis h_k = e_k - zeta(k) 1. The pairing
  // (1, -M h_k)_zeta reduces to -(M^T zeta)(k), nonzero for some k whenever
  // zeta is not the steady state.
  const std::vector<double> mt_zeta = mat_vec(transpose(m.rates()), zeta.weights());
  std::size_t k = 0;
  for (std::size_t j = 1; j < n; ++j)
    if (std::abs(mt_zeta[j]) > std::abs(mt_zeta[k])) k = j;
  const double pairing = -mt_zeta[k];
  if (pairing == 0.0) return std::nullopt;  // unreachable past the TV gate

  std::vector<double> h(n, 0.0);
  h[k] = 1.0;
  for (std::size_t z = 0; z < n; ++z) h[z] -= zeta[k];
  const std::vector<double> mh = mat_vec(m.rates(), h);
  double quad = 0.0, norm = 0.0;
  for (std::size_t z = 0; z < n; ++z) {
    quad -= zeta[z] * h[z] * mh[z];
    norm += zeta[z] * h[z] * h[z];
  }
  // c * pairing = -(|quad| + norm) forces the quotient below -1.
  const double c = -(std::abs(quad) + norm) / pairing;
  std::vector<double> f(n);
  for (std::size_t z = 0; z < n; ++z) f[z] = c + h[z];

  NaiveWitness witness{Observable(zeta.space(), std::move(f)), 0.0, c};
  witness.ratio = (quad + c * pairing) / norm;
  return witness;
}

ConstantReport compute_constants(const ProbMeasure& zeta, const Generator& m,
                                 WhichConstants which, const EstimateOptions& options) {
  ConstantReport report;
  const SymmetrisedGenerator s = symmetrise(m, zeta);
  report.gpi = alpha_gpi(zeta, m);
  report.spectral_gap = report.gpi;
  const LowerBounds bounds = explicit_lower_bounds(zeta, m);
  report.explicit_gpi_lower = bounds.gpi_lower;
  report.glsi_lower = bounds.glsi_lower;
  report.glsi_upper = 2.0 * report.gpi;
  if (which == WhichConstants::Glsi || which == WhichConstants::All) {
    GlsiEstimate est = alpha_glsi_estimate(zeta, m, options);
    report.glsi_estimate = est.value;
    report.optimizer_stats = est.stats;
  }
  if (which == WhichConstants::Slsi || which == WhichConstants::All)
    report.slsi_estimate = alpha_slsi_estimate(s, options);
  return report;
}

std::vector<ContinuityRow> continuity_scan(const std::vector<ProbMeasure>& zeta_path,
                                           const Generator& m, const EstimateOptions& options) {
  std::vector<ContinuityRow> rows;
  rows.reserve(zeta_path.size());
  for (const ProbMeasure& zeta : zeta_path) {
    ContinuityRow row;
    row.gpi = alpha_gpi(zeta, m);
    row.glsi = alpha_glsi_estimate(zeta, m, options).value;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace mfi
