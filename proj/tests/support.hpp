#pragma once

// Shared chain builders for the unit and acceptance suites.

#include <cstddef>
#include <vector>

#include "mfi/chain.hpp"
#include "mfi/coarse_graining.hpp"
#include "mfi/rng.hpp"

namespace testsupport {

using namespace mfi;

// Cyclic chain M(i, i+1) = 1, M(i, i) = -1.
inline Generator cyclic_chain(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    m(i, (i + 1) % n) = 1.0;
    m(i, i) = -1.0;
  }
  return Generator(StateSpace::indexed(n), std::move(m));
}

inline ProbMeasure skewed_three_state_measure() {
  return ProbMeasure(StateSpace::indexed(3), {0.5, 0.25, 0.25});
}

// Complete graph with unit rates: spectrum {0, -n}.
inline Generator complete_graph_chain(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m(i, j) = i == j ? -(static_cast<double>(n) - 1.0) : 1.0;
  return Generator(StateSpace::indexed(n), std::move(m));
}

// Birth-death chain; reversible with a product-form steady state.
inline Generator birth_death_chain(const std::vector<double>& up,
                                   const std::vector<double>& down) {
  const std::size_t n = up.size() + 1;
  Matrix m(n, n);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    m(i, i + 1) = up[i];
    m(i + 1, i) = down[i];
  }
  for (std::size_t i = 0; i < n; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) row += m(i, j);
    m(i, i) = -row;
  }
  return Generator(StateSpace::indexed(n), std::move(m));
}

inline Matrix six_state_fast_part() {
  Matrix q(6, 6);
  const double rows[6][6] = {{-3, 2, 1, 0, 0, 0}, {1, -3, 2, 0, 0, 0}, {2, 1, -3, 0, 0, 0},
                             {0, 0, 0, -3, 1, 2}, {0, 0, 0, 2, -3, 1}, {0, 0, 0, 1, 2, -3}};
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) q(i, j) = rows[i][j];
  return q;
}

inline Matrix six_state_slow_part() {
  Matrix g(6, 6);
  const double rows[6][6] = {{0, 0, 0, 0, 0, 0}, {0, -1, 0, 1, 0, 0}, {0, 0, -2, 0, 0, 2},
                             {0, 2, 0, -2, 0, 0}, {0, 0, 0, 0, 0, 0}, {0, 0, 1, 0, 0, -1}};
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) g(i, j) = rows[i][j];
  return g;
}

inline StateSpace six_state_space() {
  return StateSpace({"1", "2", "3", "4", "5", "6"});
}

inline CoarseGrainMap six_state_natural_map() {
  return CoarseGrainMap(six_state_space(), StateSpace({"a", "b"}), {0, 0, 0, 1, 1, 1});
}

inline CoarseGrainMap six_state_bad_map() {
  return CoarseGrainMap(six_state_space(), StateSpace({"a", "b"}), {0, 0, 1, 0, 1, 1});
}

inline MultiscaleChain six_state_multiscale() {
  return MultiscaleChain(six_state_fast_part(), six_state_slow_part(), six_state_natural_map());
}

inline Generator six_state_chain(double eps) { return six_state_multiscale().assemble(eps); }

// Closed-form steady state of the six-state chain.
inline std::vector<double> six_state_steady_state(double eps) {
  const double z = 42.0 + 27.0 * eps;
  return {(7 + 4 * eps) / z, (7 + 6 * eps) / z, (7 + 3 * eps) / z,
          (7 + 3 * eps) / z, (7 + 5 * eps) / z, (7 + 6 * eps) / z};
}

// Near-degenerate measure of the 2N-state cyclic example: weight eps/N on the
// two states just before the jumps of the step observable.
inline ProbMeasure two_n_measure(std::size_t half, double eps) {
  const std::size_t n = 2 * half;
  std::vector<double> w(n, 1.0 / static_cast<double>(half));
  w[half - 1] = eps / static_cast<double>(half);
  w[n - 1] = eps / static_cast<double>(half);
  return ProbMeasure::normalized(StateSpace::indexed(n), w);
}

inline Observable step_observable(std::size_t half) {
  const std::size_t n = 2 * half;
  std::vector<double> f(n, 1.0);
  for (std::size_t i = half; i < n; ++i) f[i] = -1.0;
  return Observable(StateSpace::indexed(n), std::move(f));
}

// Random irreducible generator: a guaranteed cycle plus random extra edges.
inline Generator random_chain(std::size_t n, Rng& rng) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, (i + 1) % n) = rng.uniform(0.2, 1.2);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j || m(i, j) > 0.0) continue;
      if (rng.next_double() < 0.5) m(i, j) = rng.uniform(0.1, 1.5);
    }
  for (std::size_t i = 0; i < n; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) row += m(i, j);
    m(i, i) = -row;
  }
  return Generator(StateSpace::indexed(n), std::move(m));
}

inline ProbMeasure random_measure(const StateSpace& space, Rng& rng) {
  std::vector<double> w(space.size());
  for (double& x : w) x = rng.uniform(0.05, 1.0);
  return ProbMeasure::normalized(space, w);
}

inline std::vector<double> random_centred_observable(const ProbMeasure& zeta, Rng& rng) {
  std::vector<double> f(zeta.size());
  double mean = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    f[i] = rng.uniform(-1.0, 1.0);
    mean += zeta[i] * f[i];
  }
  for (double& v : f) v -= mean;
  return f;
}

}  // namespace testsupport
