#include <doctest.h>

#include <cmath>
#include <functional>

#include "mfi/chain.hpp"
#include "mfi/errors.hpp"
#include "support.hpp"

using namespace mfi;
using namespace testsupport;

namespace {
bool throws_with(ErrorCode code, const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code() == code;
  }
  return false;
}
}  // namespace

TEST_CASE("validate_generator accepts the cyclic chain") {
  const Generator g = cyclic_chain(3);
  CHECK(g.min_positive_rate() == 1.0);
  CHECK(g.max_abs_rate() == 1.0);
  // re-validation round trip
  CHECK_NOTHROW(validate_generator(g.rates(), g.space()));
}

TEST_CASE("validate_generator rejects bad inputs") {
  const StateSpace two = StateSpace::indexed(2);
  CHECK(throws_with(ErrorCode::NotIrreducible, [&] { Generator(two, Matrix(2, 2)); }));

  Matrix neg(2, 2);
  neg(0, 1) = -0.5;
  neg(0, 0) = 0.5;
  neg(1, 0) = 1.0;
  neg(1, 1) = -1.0;
  CHECK(throws_with(ErrorCode::NegativeOffDiagonal, [&] { Generator(two, neg); }));

  Matrix bad_sum(2, 2);
  bad_sum(0, 0) = -1.0;
  bad_sum(0, 1) = 1.5;
  bad_sum(1, 0) = 1.0;
  bad_sum(1, 1) = -1.0;
  CHECK(throws_with(ErrorCode::RowSumNonzero, [&] { Generator(two, bad_sum); }));

  Matrix wrong_dim(3, 3);
  CHECK(throws_with(ErrorCode::DimensionMismatch, [&] { Generator(two, wrong_dim); }));
}

TEST_CASE("steady state of the symmetric two-state chain is uniform") {
  const Generator g = birth_death_chain({1.0}, {1.0});
  const ProbMeasure pi = steady_state(g);
  CHECK(pi[0] == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(pi[1] == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("steady state of the six-state chain matches the closed form") {
  const Generator g = six_state_chain(1.0);
  const ProbMeasure pi = steady_state(g);
  const std::vector<double> expected = six_state_steady_state(1.0);
  for (std::size_t i = 0; i < 6; ++i) CHECK(std::abs(pi[i] - expected[i]) < 1e-13);
  // (11, 13, 10, 10, 12, 13)/69 at eps = 1
  CHECK(pi[0] == doctest::Approx(11.0 / 69.0).epsilon(1e-13));
  CHECK(pi[5] == doctest::Approx(13.0 / 69.0).epsilon(1e-13));
}

TEST_CASE("steady-state residual stays below 1e-10 on random chains") {
  Rng rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const Generator g = random_chain(4, rng);
    const ProbMeasure pi = steady_state(g);
    const std::vector<double> r = mat_vec(transpose(g.rates()), pi.weights());
    CHECK(max_abs(r) <= 1e-10);
    for (std::size_t i = 0; i < pi.size(); ++i) CHECK(pi[i] > 0.0);
  }
}

TEST_CASE("is_reversible") {
  const Generator sym2 = birth_death_chain({1.0}, {1.0});
  CHECK(is_reversible(sym2, ProbMeasure::uniform(sym2.space())));

  const Generator six = six_state_chain(1.0);
  CHECK_FALSE(is_reversible(six, steady_state(six)));

  const Generator bd = birth_death_chain({2.0, 1.0, 0.5}, {1.0, 1.5, 2.0});
  const ProbMeasure pi = steady_state(bd);
  CHECK(is_reversible(bd, pi));
}

TEST_CASE("detailed balance implies stationarity") {
  const Generator bd = birth_death_chain({2.0, 1.0}, {0.7, 1.1});
  const ProbMeasure pi = steady_state(bd);
  REQUIRE(is_reversible(bd, pi));
  // any measure passing the reversibility test must be the steady state
  const std::vector<double> r = mat_vec(transpose(bd.rates()), pi.weights());
  CHECK(max_abs(r) < 1e-10);
}

TEST_CASE("measure and density validation") {
  const StateSpace s = StateSpace::indexed(3);
  CHECK_THROWS_AS(ProbMeasure(s, {0.5, 0.5, 0.5}), Error);   // bad mass
  CHECK_THROWS_AS(ProbMeasure(s, {1.0, 0.0, 0.0}), Error);   // zero entry
  const ProbMeasure zeta = skewed_three_state_measure();
  CHECK(zeta.min_weight() == 0.25);
  CHECK_THROWS_AS(Density(zeta, {2.0, 1.0, 1.0}), Error);    // mean != 1
  const Density phi(zeta, {0.5, 1.5, 1.5});
  CHECK(phi[0] == 0.5);
  const Density scaled = Density::normalized(zeta, {1.0, 3.0, 3.0});
  CHECK(scaled[0] == doctest::Approx(0.5).epsilon(1e-15));
}
