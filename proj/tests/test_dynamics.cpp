#include <doctest.h>

#include <cmath>

#include "mfi/dynamics.hpp"
#include "mfi/errors.hpp"
#include "support.hpp"

using namespace mfi;
using namespace testsupport;

namespace {
std::vector<double> linspace(double a, double b, std::size_t count) {
  std::vector<double> t(count);
  for (std::size_t i = 0; i < count; ++i)
    t[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(count - 1);
  return t;
}
}  // namespace

TEST_CASE("steady state is a fixed point of the flow") {
  const Generator six = six_state_chain(0.5);
  const ProbMeasure pi = steady_state(six);
  const Trajectory traj = evolve(six, pi.weights(), {0.0, 0.3, 1.7, 4.0});
  for (const std::vector<double>& state : traj.states)
    for (std::size_t z = 0; z < 6; ++z) CHECK(state[z] == doctest::Approx(pi[z]).epsilon(1e-11));
}

TEST_CASE("two-state relaxation closed form") {
  const Generator sym2 = birth_death_chain({1.0}, {1.0});
  const std::vector<double> times = linspace(0.0, 3.0, 13);
  const Trajectory traj = evolve(sym2, {1.0, 0.0}, times);
  for (std::size_t i = 0; i < times.size(); ++i)
    CHECK(traj.states[i][0] ==
          doctest::Approx(0.5 + 0.5 * std::exp(-2.0 * times[i])).epsilon(1e-12));
}

TEST_CASE("matrix exponential path agrees with the Runge-Kutta path") {
  Rng rng(71);
  const Generator g = random_chain(4, rng);
  std::vector<double> mu0{0.4, 0.3, 0.2, 0.1};
  const std::vector<double> times = linspace(0.0, 2.0, 9);
  const Trajectory a = evolve(g, mu0, times);
  const Trajectory b = evolve_rk4(g, mu0, times);
  for (std::size_t i = 0; i < times.size(); ++i)
    for (std::size_t z = 0; z < 4; ++z)
      CHECK(std::abs(a.states[i][z] - b.states[i][z]) < 1e-8);
}

TEST_CASE("mass conservation and positivity along stiff trajectories") {
  const Generator six = six_state_chain(0.025);
  const std::vector<double> times = linspace(0.0, 5.0, 26);
  const Trajectory traj = evolve(six, {1.0, 0.0, 0.0, 0.0, 0.0, 0.0}, times);
  for (std::size_t i = 0; i < times.size(); ++i) {
    double mass = 0.0;
    for (double v : traj.states[i]) mass += v;
    CHECK(std::abs(mass - 1.0) <= 1e-12);
    if (times[i] > 0.0)
      for (double v : traj.states[i]) CHECK(v > 0.0);
  }
}

TEST_CASE("semigroup property") {
  Rng rng(73);
  const Generator g = random_chain(3, rng);
  const std::vector<double> mu0{0.2, 0.5, 0.3};
  const double t1 = 0.7, t2 = 1.9;
  const Trajectory leg1 = evolve(g, mu0, {t1});
  const Trajectory leg2 = evolve(g, leg1.states[0], {t2 - t1});
  const Trajectory direct = evolve(g, mu0, {t2});
  for (std::size_t z = 0; z < 3; ++z)
    CHECK(std::abs(leg2.states[0][z] - direct.states[0][z]) < 1e-9);
}

TEST_CASE("step size underflow guard") {
  const Generator six = six_state_chain(1e-6);  // rates ~ 3e6
  CHECK_THROWS_AS(
      (void)evolve_rk4(six, {1.0, 0.0, 0.0, 0.0, 0.0, 0.0}, {0.0, 1000.0}), Error);
}

TEST_CASE("dissipation audit is identically zero for equal initial data") {
  const Generator cyclic = cyclic_chain(3);
  const std::vector<double> zeta0{0.5, 0.25, 0.25};
  const DecayAudit audit = dissipation_audit(cyclic, zeta0, zeta0, linspace(0.0, 2.0, 9));
  for (std::size_t i = 0; i < audit.times.size(); ++i) {
    CHECK(std::abs(audit.variance_series[i]) < 1e-12);
    CHECK(std::abs(audit.entropy_series[i]) < 1e-12);
    CHECK(std::abs(audit.var_dissipation[i]) < 1e-12);
    CHECK(std::abs(audit.ent_dissipation[i]) < 1e-12);
  }
}

TEST_CASE("finite differences match the dissipation identities") {
  const Generator cyclic = cyclic_chain(3);
  AuditOptions opts;
  opts.fd_dt = 1e-3;
  opts.sample_alpha_gpi = false;
  const DecayAudit audit = dissipation_audit(cyclic, {1.0, 0.0, 0.0}, {0.5, 0.25, 0.25},
                                             linspace(0.25, 3.0, 12), opts);
  for (std::size_t i = 0; i < audit.times.size(); ++i) {
    REQUIRE(std::isfinite(audit.fd_variance[i]));
    CHECK(std::abs(audit.fd_variance[i] - audit.var_dissipation[i]) <=
          1e-4 * std::abs(audit.var_dissipation[i]));
    CHECK(std::abs(audit.fd_entropy[i] - audit.ent_dissipation[i]) <=
          1e-4 * std::abs(audit.ent_dissipation[i]));
  }
}

TEST_CASE("variance and entropy decay monotonically") {
  const Generator six = six_state_chain(0.1);
  std::vector<double> mu0{0.3, 0.1, 0.1, 0.2, 0.1, 0.2};
  std::vector<double> zeta0(6, 1.0 / 6.0);
  AuditOptions opts;
  opts.sample_alpha_gpi = false;
  const DecayAudit audit = dissipation_audit(six, mu0, zeta0, linspace(0.0, 3.0, 31), opts);
  for (std::size_t i = 1; i < audit.times.size(); ++i) {
    CHECK(audit.variance_series[i] <= audit.variance_series[i - 1] + 1e-9);
    CHECK(audit.entropy_series[i] <= audit.entropy_series[i - 1] + 1e-9);
  }
}

TEST_CASE("decay envelope") {
  SUBCASE("trivial for equal initial data") {
    const Generator cyclic = cyclic_chain(3);
    const std::vector<double> zeta0{0.5, 0.25, 0.25};
    AuditOptions opts;
    opts.sample_alpha_gpi = false;
    const DecayAudit audit =
        decay_envelope(cyclic, zeta0, zeta0, linspace(0.0, 2.0, 9), 0.1, opts);
    for (std::size_t i = 0; i < audit.times.size(); ++i) {
      CHECK(audit.entropy_series[i] <= audit.ent_envelope[i] + 1e-12);
      CHECK(audit.variance_series[i] <= audit.var_envelope[i] + 1e-12);
    }
  }

  SUBCASE("two-state envelope with a positive rate") {
    const Generator two = birth_death_chain({1.4}, {0.6});
    AuditOptions opts;
    opts.sample_alpha_gpi = false;
    const DecayAudit audit =
        decay_envelope(two, {0.9, 0.1}, {0.3, 0.7}, linspace(0.0, 4.0, 17), 0.25, opts);
    CHECK(audit.alpha_star_entropy > 0.0);
    CHECK(audit.alpha_star_variance > 0.0);
    for (std::size_t i = 0; i < audit.times.size(); ++i) {
      CHECK(audit.entropy_series[i] <=
            audit.ent_envelope[i] * std::exp(1e-6) + 1e-14);
      CHECK(audit.variance_series[i] <=
            audit.var_envelope[i] * std::exp(1e-6) + 1e-14);
    }
  }

  SUBCASE("long-horizon decay rate dominates alpha_star") {
    const Generator cyclic = cyclic_chain(3);
    AuditOptions opts;
    opts.sample_alpha_gpi = false;
    const double gpi = alpha_gpi(steady_state(cyclic), cyclic);
    const double horizon = 20.0 / gpi;
    // fit the log slope over the tail, stopping before H reaches rounding noise
    const std::vector<double> times = linspace(0.15 * horizon, 0.5 * horizon, 9);
    const DecayAudit audit =
        decay_envelope(cyclic, {1.0, 0.0, 0.0}, {0.5, 0.25, 0.25}, times, 0.1, opts);
    const std::size_t i0 = 4, i1 = times.size() - 1;
    REQUIRE(audit.entropy_series[i1] > 1e-13);
    const double slope = (std::log(audit.entropy_series[i1]) - std::log(audit.entropy_series[i0])) /
                         (times[i1] - times[i0]);
    CHECK(-slope >= audit.alpha_star_entropy - 1e-9);
  }
}

TEST_CASE("constants converge along the flow") {
  const Generator cyclic = cyclic_chain(3);
  const ProbMeasure pi = steady_state(cyclic);
  AuditOptions opts;
  opts.sample_alpha_gpi = true;
  opts.sample_alpha_glsi = true;
  const DecayAudit audit = dissipation_audit(cyclic, {1.0, 0.0, 0.0}, {0.5, 0.25, 0.25},
                                             {0.0, 1.0, 3.0, 9.0}, opts);
  const double gpi_at_pi = alpha_gpi(pi, cyclic);
  const double glsi_at_pi = alpha_glsi_estimate(pi, cyclic).value;
  CHECK(std::abs(audit.alpha_gpi_series.back() - gpi_at_pi) < 1e-4);
  CHECK(std::abs(audit.alpha_glsi_series.back() - glsi_at_pi) < 0.02 * glsi_at_pi + 1e-4);
  // moving toward the steady state, the sampled constants approach the limit
  CHECK(std::abs(audit.alpha_gpi_series[2] - gpi_at_pi) <=
        std::abs(audit.alpha_gpi_series[1] - gpi_at_pi) + 1e-12);
}

TEST_CASE("input validation") {
  const Generator cyclic = cyclic_chain(3);
  CHECK_THROWS_AS((void)evolve(cyclic, {0.5, 0.5}, {0.0, 1.0}), Error);
  CHECK_THROWS_AS((void)evolve(cyclic, {0.7, 0.2, 0.2}, {0.0, 1.0}), Error);
  CHECK_THROWS_AS((void)evolve(cyclic, {1.0, 0.0, 0.0}, {1.0, 0.5}), Error);
  CHECK_THROWS_AS(
      (void)dissipation_audit(cyclic, {1.0, 0.0, 0.0}, {1.0, 0.0, 0.0}, {0.0, 1.0}), Error);
}
