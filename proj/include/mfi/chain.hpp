#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "mfi/linalg.hpp"

namespace mfi {

class StateSpace {
 public:
  explicit StateSpace(std::vector<std::string> labels);
  // Labels "0", "1", ..., or "p0", "p1", ... with a prefix.
  static StateSpace indexed(std::size_t n, const std::string& prefix = "");

  std::size_t size() const { return labels_.size(); }
  const std::vector<std::string>& labels() const { return labels_; }
  std::optional<std::size_t> index_of(const std::string& label) const;

  bool operator==(const StateSpace& other) const { return labels_ == other.labels_; }
  bool operator!=(const StateSpace& other) const { return !(*this == other); }

 private:
  std::vector<std::string> labels_;
};

// Strictly positive probability vector on a state space.
class ProbMeasure {
 public:
  ProbMeasure(StateSpace space, std::vector<double> weights);
  static ProbMeasure normalized(StateSpace space, const std::vector<double>& positive_weights);
  static ProbMeasure uniform(StateSpace space);

  const StateSpace& space() const { return space_; }
  const std::vector<double>& weights() const { return weights_; }
  std::size_t size() const { return weights_.size(); }
  double operator[](std::size_t i) const { return weights_[i]; }
  double min_weight() const;

 private:
  StateSpace space_;
  std::vector<double> weights_;
};

struct Observable {
  Observable(StateSpace s, std::vector<double> v);
  StateSpace space;
  std::vector<double> values;
};

// Positive density with unit mean relative to its reference measure.
class Density {
 public:
  Density(ProbMeasure reference, std::vector<double> values);
  static Density normalized(const ProbMeasure& reference, const std::vector<double>& positive);
  static Density one(const ProbMeasure& reference);

  const ProbMeasure& reference() const { return reference_; }
  const std::vector<double>& values() const { return values_; }
  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }

 private:
  ProbMeasure reference_;
  std::vector<double> values_;
};

// Rate matrix of an irreducible continuous-time Markov chain: non-negative
// off-diagonal entries, zero row sums, strongly connected positivity graph.
class Generator {
 public:
  Generator(StateSpace space, Matrix rates);

  const StateSpace& space() const { return space_; }
  const Matrix& rates() const { return rates_; }
  std::size_t size() const { return space_.size(); }
  double operator()(std::size_t i, std::size_t j) const { return rates_(i, j); }

  double min_positive_rate() const;  // smallest positive entry
  double max_abs_rate() const;       // largest entry magnitude

 private:
  StateSpace space_;
  Matrix rates_;
};

Generator validate_generator(const Matrix& rates, const StateSpace& space);

// Unique strictly positive solution of M^T pi = 0, normalised to total mass 1.
ProbMeasure steady_state(const Generator& m);

// Detailed balance test: zeta(z) M(z,z') == zeta(z') M(z',z) for all pairs.
bool is_reversible(const Generator& m, const ProbMeasure& zeta);

namespace detail {
void require_same_space(const StateSpace& a, const StateSpace& b, const char* where);
// Strong connectivity of the positive off-diagonal pattern; returns an
// unreachable (from, to) pair when it fails.
std::optional<std::pair<std::size_t, std::size_t>> find_unreachable_pair(const Matrix& rates);
}  // namespace detail

}  // namespace mfi
