#include "mfi/dynamics.hpp"

#include <cmath>
#include <limits>

#include "mfi/errors.hpp"
#include "mfi/functionals.hpp"

namespace mfi {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

void check_probability_vector(const std::vector<double>& mu, std::size_t n, const char* name) {
  if (mu.size() != n)
    throw Error(ErrorCode::DimensionMismatch, std::string(name) + " length mismatch");
  double sum = 0.0;
  for (double v : mu) {
    if (v < 0.0)
      throw Error(ErrorCode::NonPositiveValue, std::string(name) + " has a negative entry");
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-12)
    throw Error(ErrorCode::InvalidArgument, std::string(name) + " must sum to 1");
}

void check_times(const std::vector<double>& times) {
  if (times.empty()) throw Error(ErrorCode::InvalidArgument, "empty time grid");
  if (times.front() < 0.0) throw Error(ErrorCode::InvalidArgument, "times must start at >= 0");
  for (std::size_t i = 1; i < times.size(); ++i)
    if (!(times[i] > times[i - 1]))
      throw Error(ErrorCode::InvalidArgument, "times must be strictly increasing");
}

std::vector<double> propagate(const Matrix& mt, double t, const std::vector<double>& mu0) {
  if (t == 0.0) return mu0;
  return mat_vec(expm(t * mt), mu0);
}

void check_snapshot(const std::vector<double>& mu, double t) {
  double sum = 0.0;
  for (double v : mu) sum += v;
  if (std::abs(sum - 1.0) > 1e-12)
    throw Error(ErrorCode::NumericalRankFailure, "propagated mass drifted beyond 1e-12");
  if (t > 0.0)
    for (double v : mu)
      if (!(v > 0.0))
        throw Error(ErrorCode::NumericalRankFailure, "snapshot lost positivity at t > 0");
}

}  // namespace

namespace detail {

double variance_of_ratio(const std::vector<double>& zeta, const std::vector<double>& mu) {
  double second = 0.0, mass = 0.0;
  for (std::size_t z = 0; z < zeta.size(); ++z) {
    second += mu[z] * mu[z] / zeta[z];
    mass += mu[z];
  }
  return second - mass * mass;
}

double entropy_of_ratio(const std::vector<double>& zeta, const std::vector<double>& mu) {
  double h = 0.0;
  for (std::size_t z = 0; z < zeta.size(); ++z) {
    if (mu[z] == 0.0) continue;  // 0 log 0 = 0
    h += mu[z] * std::log(mu[z] / zeta[z]);
  }
  return h;
}

}  // namespace detail

Trajectory evolve(const Generator& m, const std::vector<double>& mu0,
                  const std::vector<double>& times) {
  check_probability_vector(mu0, m.size(), "mu0");
  check_times(times);
  const Matrix mt = transpose(m.rates());
  Trajectory traj{m, times, {}};
  traj.states.reserve(times.size());
  for (double t : times) {
    std::vector<double> mu = propagate(mt, t, mu0);
    check_snapshot(mu, t);
    traj.states.push_back(std::move(mu));
  }
  return traj;
}

Trajectory evolve_rk4(const Generator& m, const std::vector<double>& mu0,
                      const std::vector<double>& times, double max_step) {
  check_probability_vector(mu0, m.size(), "mu0");
  check_times(times);
  const Matrix mt = transpose(m.rates());
  if (max_step <= 0.0) max_step = 0.01 / std::max(row_sum_norm(m.rates()), 1e-12);

  const auto rhs = [&mt](const std::vector<double>& x) { return mat_vec(mt, x); };
  const std::size_t n = m.size();
  std::vector<double> mu = mu0;
  double t = 0.0;

  Trajectory traj{m, times, {}};
  long long total_steps = 0;
  for (double target : times) {
    const double span = target - t;
    if (span > 0.0) {
      const double steps_needed = std::ceil(span / max_step);
      if (steps_needed > 5e7 || total_steps + static_cast<long long>(steps_needed) > 5e7)
        throw Error(ErrorCode::StepSizeUnderflow,
                    "fixed-step integrator would need more than 5e7 steps");
      const long long steps = static_cast<long long>(steps_needed);
      const double h = span / static_cast<double>(steps);
      for (long long s = 0; s < steps; ++s) {
        const std::vector<double> k1 = rhs(mu);
        std::vector<double> tmp(n);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = mu[i] + 0.5 * h * k1[i];
        const std::vector<double> k2 = rhs(tmp);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = mu[i] + 0.5 * h * k2[i];
        const std::vector<double> k3 = rhs(tmp);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = mu[i] + h * k3[i];
        const std::vector<double> k4 = rhs(tmp);
        for (std::size_t i = 0; i < n; ++i)
          mu[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
      }
      total_steps += steps;
      t = target;
    }
    traj.states.push_back(mu);
  }
  return traj;
}

namespace {

bool strictly_positive(const std::vector<double>& v) {
  for (double x : v)
    if (!(x > 0.0)) return false;
  return true;
}

std::vector<double> ratio_density(const std::vector<double>& zeta, const std::vector<double>& mu) {
  std::vector<double> phi(zeta.size());
  for (std::size_t z = 0; z < zeta.size(); ++z) phi[z] = mu[z] / zeta[z];
  return phi;
}

}  // namespace

DecayAudit dissipation_audit(const Generator& m, const std::vector<double>& mu0,
                             const std::vector<double>& zeta0, const std::vector<double>& times,
                             const AuditOptions& options) {
  check_probability_vector(mu0, m.size(), "mu0");
  check_probability_vector(zeta0, m.size(), "zeta0");
  if (!strictly_positive(zeta0))
    throw Error(ErrorCode::NonPositiveValue, "zeta0 must be strictly positive");
  check_times(times);

  const Matrix mt = transpose(m.rates());
  double min_spacing = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < times.size(); ++i)
    min_spacing = std::min(min_spacing, times[i] - times[i - 1]);
  const double fd_dt =
      options.fd_dt > 0.0 ? options.fd_dt
                          : std::min(1e-3, std::isfinite(min_spacing) ? min_spacing / 10.0 : 1e-3);

  DecayAudit audit;
  audit.times = times;
  const std::size_t count = times.size();
  audit.variance_series.resize(count);
  audit.entropy_series.resize(count);
  audit.var_dissipation.assign(count, kNan);
  audit.ent_dissipation.assign(count, kNan);
  audit.fd_variance.assign(count, kNan);
  audit.fd_entropy.assign(count, kNan);
  if (options.sample_alpha_gpi) audit.alpha_gpi_series.assign(count, kNan);
  if (options.sample_alpha_glsi) audit.alpha_glsi_series.assign(count, kNan);

  for (std::size_t i = 0; i < count; ++i) {
    const double t = times[i];
    const std::vector<double> mu = propagate(mt, t, mu0);
    const std::vector<double> zeta = propagate(mt, t, zeta0);
    check_snapshot(mu, t);
    check_snapshot(zeta, t);

    audit.variance_series[i] = detail::variance_of_ratio(zeta, mu);
    audit.entropy_series[i] = detail::entropy_of_ratio(zeta, mu);

    if (strictly_positive(mu)) {
      const std::vector<double> phi = ratio_density(zeta, mu);
      audit.var_dissipation[i] = -2.0 * detail::gen_dirichlet(zeta, phi, m.rates());
      audit.ent_dissipation[i] = -detail::gen_fisher(zeta, phi, m.rates());
      if (t - fd_dt > 0.0) {
        const std::vector<double> mu_lo = propagate(mt, t - fd_dt, mu0);
        const std::vector<double> mu_hi = propagate(mt, t + fd_dt, mu0);
        const std::vector<double> zeta_lo = propagate(mt, t - fd_dt, zeta0);
        const std::vector<double> zeta_hi = propagate(mt, t + fd_dt, zeta0);
        audit.fd_variance[i] = (detail::variance_of_ratio(zeta_hi, mu_hi) -
                                detail::variance_of_ratio(zeta_lo, mu_lo)) /
                               (2.0 * fd_dt);
        audit.fd_entropy[i] = (detail::entropy_of_ratio(zeta_hi, mu_hi) -
                               detail::entropy_of_ratio(zeta_lo, mu_lo)) /
                              (2.0 * fd_dt);
      }
    }

    if (options.sample_alpha_gpi || options.sample_alpha_glsi) {
      const ProbMeasure zt = ProbMeasure::normalized(m.space(), zeta);
      if (options.sample_alpha_gpi) audit.alpha_gpi_series[i] = alpha_gpi(zt, m);
      if (options.sample_alpha_glsi)
        audit.alpha_glsi_series[i] = alpha_glsi_estimate(zt, m, options.estimate).value;
    }
  }
  return audit;
}

DecayAudit decay_envelope(const Generator& m, const std::vector<double>& mu0,
                          const std::vector<double>& zeta0, const std::vector<double>& times,
                          double delta, const AuditOptions& options) {
  if (!(delta > 0.0) || !(delta < 1.0))
    throw Error(ErrorCode::InvalidArgument, "delta must lie in (0,1)");
  DecayAudit audit = dissipation_audit(m, mu0, zeta0, times, options);

  const Matrix mt = transpose(m.rates());
  double min_glsi_lower = std::numeric_limits<double>::infinity();
  double min_gap = std::numeric_limits<double>::infinity();
  for (double t : times) {
    if (t < delta) continue;
    const ProbMeasure zt = ProbMeasure::normalized(m.space(), propagate(mt, t, zeta0));
    const LowerBounds bounds = explicit_lower_bounds(zt, m);
    min_glsi_lower = std::min(min_glsi_lower, bounds.glsi_lower);
    min_gap = std::min(min_gap, spectral_gap(symmetrise(m, zt)));
  }
  if (!std::isfinite(min_glsi_lower))
    throw Error(ErrorCode::InvalidArgument, "no sample times at or beyond delta");
  audit.alpha_star_entropy = min_glsi_lower;
  audit.alpha_star_variance = 2.0 * min_gap;

  const double h0 = detail::entropy_of_ratio(zeta0, mu0);
  const double v0 = detail::variance_of_ratio(zeta0, mu0);
  audit.ent_envelope.resize(times.size());
  audit.var_envelope.resize(times.size());
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double decay_h = std::min(1.0, std::exp(-audit.alpha_star_entropy * (times[i] - delta)));
    const double decay_v = std::min(1.0, std::exp(-audit.alpha_star_variance * (times[i] - delta)));
    audit.ent_envelope[i] = h0 * decay_h;
    audit.var_envelope[i] = v0 * decay_v;
  }
  return audit;
}

}  // namespace mfi
