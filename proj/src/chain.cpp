#include "mfi/chain.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "mfi/errors.hpp"

namespace mfi {

StateSpace::StateSpace(std::vector<std::string> labels) : labels_(std::move(labels)) {
  if (labels_.size() < 2)
    throw Error(ErrorCode::InvalidArgument, "state space needs at least 2 states");
  std::set<std::string> seen(labels_.begin(), labels_.end());
  if (seen.size() != labels_.size())
    throw Error(ErrorCode::InvalidArgument, "state labels must be distinct");
}

StateSpace StateSpace::indexed(std::size_t n, const std::string& prefix) {
  std::vector<std::string> labels;
  labels.reserve(n);
  for (std::size_t i = 0; i < n; ++i) labels.push_back(prefix + std::to_string(i));
  return StateSpace(std::move(labels));
}

std::optional<std::size_t> StateSpace::index_of(const std::string& label) const {
  for (std::size_t i = 0; i < labels_.size(); ++i)
    if (labels_[i] == label) return i;
  return std::nullopt;
}

ProbMeasure::ProbMeasure(StateSpace space, std::vector<double> weights)
    : space_(std::move(space)), weights_(std::move(weights)) {
  if (weights_.size() != space_.size())
    throw Error(ErrorCode::DimensionMismatch, "measure length does not match state space");
  double sum = 0.0;
  for (double w : weights_) {
    if (!(w > 0.0))
      throw Error(ErrorCode::NonPositiveValue, "measure weights must be strictly positive");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-12)
    throw Error(ErrorCode::InvalidArgument, "measure weights must sum to 1");
}

ProbMeasure ProbMeasure::normalized(StateSpace space, const std::vector<double>& positive) {
  double sum = 0.0;
  for (double w : positive) {
    if (!(w > 0.0))
      throw Error(ErrorCode::NonPositiveValue, "weights must be strictly positive");
    sum += w;
  }
  std::vector<double> w = positive;
  for (double& v : w) v /= sum;
  return ProbMeasure(std::move(space), std::move(w));
}

ProbMeasure ProbMeasure::uniform(StateSpace space) {
  const std::size_t n = space.size();
  return ProbMeasure(std::move(space), std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

double ProbMeasure::min_weight() const {
  return *std::min_element(weights_.begin(), weights_.end());
}

Observable::Observable(StateSpace s, std::vector<double> v)
    : space(std::move(s)), values(std::move(v)) {
  if (values.size() != space.size())
    throw Error(ErrorCode::DimensionMismatch, "observable length does not match state space");
}

Density::Density(ProbMeasure reference, std::vector<double> values)
    : reference_(std::move(reference)), values_(std::move(values)) {
  if (values_.size() != reference_.size())
    throw Error(ErrorCode::DimensionMismatch, "density length does not match state space");
  double mean = 0.0;
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!(values_[i] > 0.0))
      throw Error(ErrorCode::NonPositiveValue, "density values must be strictly positive");
    mean += values_[i] * reference_[i];
  }
  if (std::abs(mean - 1.0) > 1e-12)
    throw Error(ErrorCode::InvalidArgument, "density must have unit mean under the reference");
}

Density Density::normalized(const ProbMeasure& reference, const std::vector<double>& positive) {
  if (positive.size() != reference.size())
    throw Error(ErrorCode::DimensionMismatch, "density length does not match state space");
  double mean = 0.0;
  for (std::size_t i = 0; i < positive.size(); ++i) {
    if (!(positive[i] > 0.0))
      throw Error(ErrorCode::NonPositiveValue, "density values must be strictly positive");
    mean += positive[i] * reference[i];
  }
  std::vector<double> v = positive;
  for (double& x : v) x /= mean;
  return Density(reference, std::move(v));
}

Density Density::one(const ProbMeasure& reference) {
  return Density(reference, std::vector<double>(reference.size(), 1.0));
}

namespace detail {

void require_same_space(const StateSpace& a, const StateSpace& b, const char* where) {
  if (a != b)
    throw Error(ErrorCode::DimensionMismatch, std::string(where) + ": state spaces differ");
}

namespace {
std::vector<bool> reachable_from_0(const Matrix& rates, bool reversed) {
  const std::size_t n = rates.rows();
  std::vector<bool> seen(n, false);
  std::vector<std::size_t> queue{0};
  seen[0] = true;
  while (!queue.empty()) {
    const std::size_t z = queue.back();
    queue.pop_back();
    for (std::size_t w = 0; w < n; ++w) {
      if (w == z || seen[w]) continue;
      const double rate = reversed ? rates(w, z) : rates(z, w);
      if (rate > 0.0) {
        seen[w] = true;
        queue.push_back(w);
      }
    }
  }
  return seen;
}
}  // namespace

std::optional<std::pair<std::size_t, std::size_t>> find_unreachable_pair(const Matrix& rates) {
  const std::vector<bool> fwd = reachable_from_0(rates, false);
  for (std::size_t z = 0; z < fwd.size(); ++z)
    if (!fwd[z]) return std::make_pair(std::size_t{0}, z);
  const std::vector<bool> bwd = reachable_from_0(rates, true);
  for (std::size_t z = 0; z < bwd.size(); ++z)
    if (!bwd[z]) return std::make_pair(z, std::size_t{0});
  return std::nullopt;
}

}  // namespace detail

Generator::Generator(StateSpace space, Matrix rates)
    : space_(std::move(space)), rates_(std::move(rates)) {
  const std::size_t n = space_.size();
  if (!rates_.square() || rates_.rows() != n)
    throw Error(ErrorCode::DimensionMismatch, "rate matrix must be " + std::to_string(n) + "x" +
                                                  std::to_string(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j && rates_(i, j) < 0.0)
        throw Error(ErrorCode::NegativeOffDiagonal,
                    "rate (" + space_.labels()[i] + " -> " + space_.labels()[j] + ") is negative");
  const double tol = 1e-12 * std::max(max_abs(rates_), 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += rates_(i, j);
    if (std::abs(s) > tol)
      throw Error(ErrorCode::RowSumNonzero,
                  "row sum at state " + space_.labels()[i] + " is " + std::to_string(s));
  }
  if (auto pair = detail::find_unreachable_pair(rates_))
    throw Error(ErrorCode::NotIrreducible, "state " + space_.labels()[pair->second] +
                                               " unreachable from " + space_.labels()[pair->first]);
}

double Generator::min_positive_rate() const {
  double m = 0.0;
  bool found = false;
  for (std::size_t i = 0; i < size(); ++i)
    for (std::size_t j = 0; j < size(); ++j)
      if (i != j && rates_(i, j) > 0.0 && (!found || rates_(i, j) < m)) {
        m = rates_(i, j);
        found = true;
      }
  return m;
}

double Generator::max_abs_rate() const { return max_abs(rates_); }

Generator validate_generator(const Matrix& rates, const StateSpace& space) {
  return Generator(space, rates);
}

ProbMeasure steady_state(const Generator& m) {
  const std::size_t n = m.size();
  const Matrix mt = transpose(m.rates());
  std::vector<double> v = nullspace_vector(mt);

  double sum = 0.0;
  for (double x : v) sum += x;
  if (sum == 0.0) throw Error(ErrorCode::NumericalRankFailure, "null vector has zero mass");
  for (double& x : v) x /= sum;

  // Polish through the bordered system (last row replaced by normalisation).
  Matrix b = mt;
  std::vector<double> rhs(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) b(n - 1, j) = 1.0;
  rhs[n - 1] = 1.0;
  LuFactor lu(b);
  v = lu.solve_refined(b, rhs);

  for (double x : v)
    if (!(x > 0.0))
      throw Error(ErrorCode::NumericalRankFailure, "steady state has a non-positive entry");
  const std::vector<double> residual = mat_vec(mt, v);
  if (max_abs(residual) > 1e-10)
    throw Error(ErrorCode::NumericalRankFailure, "steady-state residual above 1e-10");
  return ProbMeasure(m.space(), std::move(v));
}

bool is_reversible(const Generator& m, const ProbMeasure& zeta) {
  detail::require_same_space(m.space(), zeta.space(), "is_reversible");
  const std::size_t n = m.size();
  double scale = 0.0;
  for (std::size_t z = 0; z < n; ++z)
    for (std::size_t w = 0; w < n; ++w)
      if (z != w) scale = std::max(scale, std::abs(zeta[z] * m(z, w)));
  if (scale == 0.0) scale = 1.0;
  for (std::size_t z = 0; z < n; ++z)
    for (std::size_t w = z + 1; w < n; ++w)
      if (std::abs(zeta[z] * m(z, w) - zeta[w] * m(w, z)) > 1e-12 * scale) return false;
  return true;
}

}  // namespace mfi
