#pragma once

#include <vector>

#include "mfi/chain.hpp"

namespace mfi {

// var_zeta(f) = E[f^2] - E[f]^2
double variance(const ProbMeasure& zeta, const Observable& f);

// sum_z phi(z) log phi(z) zeta(z)
double relative_entropy(const ProbMeasure& zeta, const Density& phi);

// Ent_zeta(f) = sum f log f zeta - E[f] log E[f], for strictly positive f.
double centred_entropy(const ProbMeasure& zeta, const Observable& f);

// (1/2) sum_{z,z'} M(z,z') zeta(z) (f(z)-f(z'))^2
double gen_dirichlet(const ProbMeasure& zeta, const Observable& f, const Generator& m);

// sum_{z!=z'} M(z,z') zeta(z) phi(z) [r - 1 - log r], r = phi(z')/phi(z)
double gen_fisher(const ProbMeasure& zeta, const Density& phi, const Generator& m);

// 1-homogeneous extension of gen_fisher to arbitrary strictly positive vectors.
double gen_fisher_unnormalised(const ProbMeasure& zeta, const Observable& f, const Generator& m);

// Variant with [r - 1 - (r^lambda - 1)/lambda]; tends to gen_fisher as lambda -> 0.
double gen_fisher_lambda(const ProbMeasure& zeta, const Observable& f, const Generator& m,
                         double lambda);

// (phi, -M log phi)_pi. Equals gen_fisher when pi is the steady state of M;
// warns on stderr when it is not.
double classical_fisher(const ProbMeasure& pi, const Density& phi, const Generator& m);

struct TaylorCheck {
  double delta = 0.0;
  double predicted = 0.0;
  double actual = 0.0;
  double remainder_bound = 0.0;
  bool holds() const;
};

struct TaylorAudit {
  TaylorCheck fisher;   // R(1+delta f) vs delta^2 E(f)
  TaylorCheck entropy;  // H(1+delta f) vs delta^2 var(f)/2
};

// Quadratic-expansion audit for a centred observable; requires
// |delta| <= (1/2)/||f||_inf.
TaylorAudit taylor_audit(const ProbMeasure& zeta, const Observable& f, const Generator& m,
                         double delta);

namespace detail {
// Raw-vector versions used in optimizer hot paths; callers guarantee
// dimensions and positivity where required.
double variance(const std::vector<double>& w, const std::vector<double>& f);
double entropy_of_density(const std::vector<double>& w, const std::vector<double>& phi);
double gen_dirichlet(const std::vector<double>& w, const std::vector<double>& f, const Matrix& m);
double gen_fisher(const std::vector<double>& w, const std::vector<double>& phi, const Matrix& m);
double centred_entropy(const std::vector<double>& w, const std::vector<double>& f);
}  // namespace detail

}  // namespace mfi
