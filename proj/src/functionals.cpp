#include "mfi/functionals.hpp"

#include <cmath>
#include <iostream>

#include "mfi/errors.hpp"

namespace mfi {

namespace {

constexpr double kRatioFloor = 1e-300;

void check_ratio(double r) {
  if (r < kRatioFloor)
    throw Error(ErrorCode::UnderflowGuard, "density ratio below 1e-300");
}

// Phi(r) = r - 1 - log r evaluated from the ratio and the exact relative
// difference x = r - 1. Series below 1e-3 keeps the value accurate where the
// direct form cancels.
double phi_divergence(double ratio, double x) {
  if (std::abs(x) < 1e-3)
    return x * x * (1.0 / 2.0 - x * (1.0 / 3.0 - x * (1.0 / 4.0 - x / 5.0)));
  return x - std::log(ratio);
}

// Psi(phi) = phi log phi - phi + 1 for phi >= 0, with Psi(0) = 1 (the limit).
double psi_positive(double phi) {
  const double y = phi - 1.0;
  if (std::abs(y) < 1e-3)
    return y * y * (1.0 / 2.0 - y * (1.0 / 6.0 - y * (1.0 / 12.0 - y / 20.0)));
  if (phi == 0.0) return 1.0;
  return phi * std::log(phi) - phi + 1.0;
}

}  // namespace

namespace detail {

double variance(const std::vector<double>& w, const std::vector<double>& f) {
  // two-pass form; the textbook E[f^2] - E[f]^2 cancels catastrophically for
  // nearly constant f, which the optimizers probe all the time
  double mean = 0.0;
  for (std::size_t z = 0; z < w.size(); ++z) mean += w[z] * f[z];
  double var = 0.0;
  for (std::size_t z = 0; z < w.size(); ++z) {
    const double d = f[z] - mean;
    var += w[z] * d * d;
  }
  return var;
}

double entropy_of_density(const std::vector<double>& w, const std::vector<double>& phi) {
  // sum w phi log phi = sum w Psi(phi) + (mean - 1); the mean of a density is
  // 1 up to rounding and the Bregman form keeps small entropies exact.
  double h = 0.0, mean = 0.0;
  for (std::size_t z = 0; z < w.size(); ++z) {
    check_ratio(phi[z]);
    h += w[z] * psi_positive(phi[z]);
    mean += w[z] * phi[z];
  }
  return h + (mean - 1.0);
}

double centred_entropy(const std::vector<double>& w, const std::vector<double>& f) {
  double mean = 0.0;
  for (std::size_t z = 0; z < w.size(); ++z) {
    check_ratio(f[z]);
    mean += f[z] * w[z];
  }
  double h = 0.0, rel_mean = 0.0;
  for (std::size_t z = 0; z < w.size(); ++z) {
    const double rel = f[z] / mean;
    h += w[z] * psi_positive(rel);
    rel_mean += w[z] * rel;
  }
  return mean * (h + (rel_mean - 1.0));
}

double gen_dirichlet(const std::vector<double>& w, const std::vector<double>& f,
                     const Matrix& m) {
  const std::size_t n = w.size();
  double e = 0.0;
  for (std::size_t z = 0; z < n; ++z)
    for (std::size_t zp = 0; zp < n; ++zp) {
      if (z == zp) continue;  // diagonal integrand vanishes
      const double d = f[z] - f[zp];
      e += m(z, zp) * w[z] * d * d;
    }
  return 0.5 * e;
}

double gen_fisher(const std::vector<double>& w, const std::vector<double>& phi,
                  const Matrix& m) {
  const std::size_t n = w.size();
  double r = 0.0;
  for (std::size_t z = 0; z < n; ++z)
    for (std::size_t zp = 0; zp < n; ++zp) {
      if (z == zp || m(z, zp) == 0.0) continue;
      const double ratio = phi[zp] / phi[z];
      check_ratio(ratio);
      r += m(z, zp) * w[z] * phi[z] * phi_divergence(ratio, (phi[zp] - phi[z]) / phi[z]);
    }
  return r;
}

}  // namespace detail

double variance(const ProbMeasure& zeta, const Observable& f) {
  detail::require_same_space(zeta.space(), f.space, "variance");
  return detail::variance(zeta.weights(), f.values);
}

double relative_entropy(const ProbMeasure& zeta, const Density& phi) {
  detail::require_same_space(zeta.space(), phi.reference().space(), "relative_entropy");
  return detail::entropy_of_density(zeta.weights(), phi.values());
}

double centred_entropy(const ProbMeasure& zeta, const Observable& f) {
  detail::require_same_space(zeta.space(), f.space, "centred_entropy");
  for (double v : f.values)
    if (!(v > 0.0))
      throw Error(ErrorCode::NonPositiveValue, "centred entropy needs a strictly positive f");
  return detail::centred_entropy(zeta.weights(), f.values);
}

double gen_dirichlet(const ProbMeasure& zeta, const Observable& f, const Generator& m) {
  detail::require_same_space(zeta.space(), f.space, "gen_dirichlet");
  detail::require_same_space(zeta.space(), m.space(), "gen_dirichlet");
  return detail::gen_dirichlet(zeta.weights(), f.values, m.rates());
}

double gen_fisher(const ProbMeasure& zeta, const Density& phi, const Generator& m) {
  detail::require_same_space(zeta.space(), phi.reference().space(), "gen_fisher");
  detail::require_same_space(zeta.space(), m.space(), "gen_fisher");
  return detail::gen_fisher(zeta.weights(), phi.values(), m.rates());
}

double gen_fisher_unnormalised(const ProbMeasure& zeta, const Observable& f, const Generator& m) {
  detail::require_same_space(zeta.space(), f.space, "gen_fisher_unnormalised");
  detail::require_same_space(zeta.space(), m.space(), "gen_fisher_unnormalised");
  for (double v : f.values)
    if (!(v > 0.0))
      throw Error(ErrorCode::NonPositiveValue, "Fisher information needs a strictly positive f");
  return detail::gen_fisher(zeta.weights(), f.values, m.rates());
}

double gen_fisher_lambda(const ProbMeasure& zeta, const Observable& f, const Generator& m,
                         double lambda) {
  detail::require_same_space(zeta.space(), f.space, "gen_fisher_lambda");
  detail::require_same_space(zeta.space(), m.space(), "gen_fisher_lambda");
  if (!(lambda > 0.0) || !(lambda < 1.0))
    throw Error(ErrorCode::LambdaOutOfRange, "lambda must lie in (0,1)");
  for (double v : f.values)
    if (!(v > 0.0))
      throw Error(ErrorCode::NonPositiveValue, "Fisher information needs a strictly positive f");
  const std::size_t n = zeta.size();
  double r = 0.0;
  for (std::size_t z = 0; z < n; ++z)
    for (std::size_t zp = 0; zp < n; ++zp) {
      if (z == zp || m(z, zp) == 0.0) continue;
      const double ratio = f.values[zp] / f.values[z];
      check_ratio(ratio);
      r += m(z, zp) * zeta[z] * f.values[z] *
           (ratio - 1.0 - (std::pow(ratio, lambda) - 1.0) / lambda);
    }
  return r;
}

double classical_fisher(const ProbMeasure& pi, const Density& phi, const Generator& m) {
  detail::require_same_space(pi.space(), phi.reference().space(), "classical_fisher");
  detail::require_same_space(pi.space(), m.space(), "classical_fisher");
  const std::vector<double> residual = mat_vec(transpose(m.rates()), pi.weights());
  if (max_abs(residual) > 1e-8 * std::max(1.0, m.max_abs_rate()))
    std::cerr << "classical_fisher: reference measure is not the steady state "
                 "(residual "
              << max_abs(residual) << ")\n";
  const std::size_t n = pi.size();
  double r = 0.0;
  for (std::size_t z = 0; z < n; ++z)
    for (std::size_t zp = 0; zp < n; ++zp) {
      if (m(z, zp) == 0.0) continue;
      check_ratio(phi[zp]);
      r -= phi[z] * std::log(phi[zp]) * m(z, zp) * pi[z];
    }
  return r;
}

bool TaylorCheck::holds() const {
  const double d = std::abs(delta);
  return std::abs(actual - predicted) <= d * d * d * remainder_bound + 1e-18;
}

TaylorAudit taylor_audit(const ProbMeasure& zeta, const Observable& f, const Generator& m,
                         double delta) {
  detail::require_same_space(zeta.space(), f.space, "taylor_audit");
  detail::require_same_space(zeta.space(), m.space(), "taylor_audit");
  double mean = 0.0;
  for (std::size_t z = 0; z < zeta.size(); ++z) mean += zeta[z] * f.values[z];
  const double f_inf = max_abs(f.values);
  if (std::abs(mean) > 1e-12 * std::max(1.0, f_inf))
    throw Error(ErrorCode::InvalidArgument, "taylor_audit needs a centred observable");
  if (f_inf > 0.0 && std::abs(delta) > 0.5 / f_inf)
    throw Error(ErrorCode::DeltaTooLarge, "|delta| must be at most (1/2)/||f||_inf");

  std::vector<double> phi(zeta.size());
  for (std::size_t z = 0; z < zeta.size(); ++z) phi[z] = 1.0 + delta * f.values[z];

  const double n_states = static_cast<double>(zeta.size());
  TaylorAudit audit;
  audit.fisher.delta = delta;
  audit.fisher.predicted = delta * delta * detail::gen_dirichlet(zeta.weights(), f.values, m.rates());
  audit.fisher.actual = delta == 0.0 ? 0.0 : detail::gen_fisher(zeta.weights(), phi, m.rates());
  audit.fisher.remainder_bound = 3.0 * m.max_abs_rate() * n_states * f_inf * f_inf * f_inf;

  audit.entropy.delta = delta;
  audit.entropy.predicted = 0.5 * delta * delta * detail::variance(zeta.weights(), f.values);
  audit.entropy.actual =
      delta == 0.0 ? 0.0 : detail::entropy_of_density(zeta.weights(), phi);
  audit.entropy.remainder_bound = f_inf * f_inf * f_inf / 3.0;
  return audit;
}

}  // namespace mfi
