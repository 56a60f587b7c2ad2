#include "mfi/coarse_graining.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mfi/dynamics.hpp"
#include "mfi/errors.hpp"

namespace mfi {

CoarseGrainMap::CoarseGrainMap(StateSpace fine, StateSpace coarse,
                               std::vector<std::size_t> assignment)
    : fine_(std::move(fine)), coarse_(std::move(coarse)), assignment_(std::move(assignment)) {
  if (assignment_.size() != fine_.size())
    throw Error(ErrorCode::DimensionMismatch, "assignment length does not match fine space");
  level_sets_.resize(coarse_.size());
  for (std::size_t x = 0; x < assignment_.size(); ++x) {
    if (assignment_[x] >= coarse_.size())
      throw Error(ErrorCode::InvalidArgument, "assignment target out of range");
    level_sets_[assignment_[x]].push_back(x);
  }
  for (std::size_t y = 0; y < level_sets_.size(); ++y)
    if (level_sets_[y].empty())
      throw Error(ErrorCode::EmptyLevelSet, "cluster " + coarse_.labels()[y] + " is empty");
}

std::vector<double> pushforward(const CoarseGrainMap& map, const std::vector<double>& mu) {
  if (mu.size() != map.fine().size())
    throw Error(ErrorCode::DimensionMismatch, "pushforward input length mismatch");
  std::vector<double> hat(map.cluster_count(), 0.0);
  for (std::size_t x = 0; x < mu.size(); ++x) hat[map.cluster_of(x)] += mu[x];
  return hat;
}

ProbMeasure pushforward(const CoarseGrainMap& map, const ProbMeasure& mu) {
  detail::require_same_space(map.fine(), mu.space(), "pushforward");
  return ProbMeasure(map.coarse(), pushforward(map, mu.weights()));
}

namespace {

StateSpace restricted_space(const CoarseGrainMap& map, std::size_t y) {
  const std::vector<std::size_t>& level = map.level_set(y);
  if (level.size() < 2)
    throw Error(ErrorCode::RestrictionNotIrreducible,
                "cluster " + map.coarse().labels()[y] + " is a singleton; no internal dynamics");
  std::vector<std::string> labels;
  labels.reserve(level.size());
  for (std::size_t x : level) labels.push_back(map.fine().labels()[x]);
  return StateSpace(std::move(labels));
}

}  // namespace

std::vector<ProbMeasure> conditional_measures(const CoarseGrainMap& map, const ProbMeasure& rho) {
  detail::require_same_space(map.fine(), rho.space(), "conditional_measures");
  std::vector<ProbMeasure> out;
  out.reserve(map.cluster_count());
  for (std::size_t y = 0; y < map.cluster_count(); ++y) {
    const std::vector<std::size_t>& level = map.level_set(y);
    std::vector<std::string> labels;
    std::vector<double> weights;
    labels.reserve(level.size());
    weights.reserve(level.size());
    for (std::size_t x : level) {
      labels.push_back(map.fine().labels()[x]);
      weights.push_back(rho[x]);
    }
    if (labels.size() == 1)
      throw Error(ErrorCode::RestrictionNotIrreducible,
                  "cluster " + map.coarse().labels()[y] + " is a singleton");
    out.push_back(ProbMeasure::normalized(StateSpace(std::move(labels)), weights));
  }
  return out;
}

Generator restricted_generator(const Generator& m, const CoarseGrainMap& map, std::size_t y) {
  detail::require_same_space(map.fine(), m.space(), "restricted_generator");
  StateSpace space = restricted_space(map, y);
  const std::vector<std::size_t>& level = map.level_set(y);
  const std::size_t k = level.size();
  Matrix block(k, k);
  for (std::size_t a = 0; a < k; ++a) {
    double row = 0.0;
    for (std::size_t b = 0; b < k; ++b) {
      if (a == b) continue;
      block(a, b) = m(level[a], level[b]);
      row += block(a, b);
    }
    block(a, a) = -row;
  }
  try {
    return Generator(std::move(space), std::move(block));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::NotIrreducible)
      throw Error(ErrorCode::RestrictionNotIrreducible,
                  "restriction to cluster " + map.coarse().labels()[y] + " is not irreducible");
    throw;
  }
}

Generator coarse_grained_generator(const Generator& m, const CoarseGrainMap& map,
                                   const std::vector<double>& mu) {
  detail::require_same_space(map.fine(), m.space(), "coarse_grained_generator");
  if (mu.size() != map.fine().size())
    throw Error(ErrorCode::DimensionMismatch, "fine measure length mismatch");
  const std::size_t ny = map.cluster_count();

  std::vector<double> cluster_mass(ny, 0.0);
  for (std::size_t x = 0; x < mu.size(); ++x) {
    if (mu[x] < 0.0)
      throw Error(ErrorCode::NonPositiveValue, "fine measure has a negative entry");
    cluster_mass[map.cluster_of(x)] += mu[x];
  }
  for (std::size_t y = 0; y < ny; ++y)
    if (!(cluster_mass[y] > 0.0))
      throw Error(ErrorCode::ZeroClusterMass,
                  "cluster " + map.coarse().labels()[y] + " carries zero mass");

  Matrix hat(ny, ny);
  for (std::size_t x1 = 0; x1 < mu.size(); ++x1) {
    const std::size_t y1 = map.cluster_of(x1);
    const double weight = mu[x1] / cluster_mass[y1];
    for (std::size_t x2 = 0; x2 < mu.size(); ++x2)
      hat(y1, map.cluster_of(x2)) += m(x1, x2) * weight;
  }
  return Generator(map.coarse(), std::move(hat));
}

Generator effective_generator(const Generator& m, const CoarseGrainMap& map,
                              const ProbMeasure& rho) {
  detail::require_same_space(map.fine(), rho.space(), "effective_generator");
  return coarse_grained_generator(m, map, rho.weights());
}

Generator averaged_generator(const Generator& m, const CoarseGrainMap& map) {
  detail::require_same_space(map.fine(), m.space(), "averaged_generator");
  const std::size_t ny = map.cluster_count();
  Matrix av(ny, ny);
  for (std::size_t y = 0; y < ny; ++y) {
    const Generator restricted = restricted_generator(m, map, y);
    const ProbMeasure pi_y = steady_state(restricted);
    const std::vector<std::size_t>& level = map.level_set(y);
    for (std::size_t a = 0; a < level.size(); ++a)
      for (std::size_t x2 = 0; x2 < map.fine().size(); ++x2)
        av(y, map.cluster_of(x2)) += m(level[a], x2) * pi_y[a];
    // enforce an exact zero row sum; the diagonal picks up the residual
    double row = 0.0;
    for (std::size_t y2 = 0; y2 < ny; ++y2)
      if (y2 != y) row += av(y, y2);
    av(y, y) = -row;
  }
  return Generator(map.coarse(), std::move(av));
}

QualityReport quality_score(const Generator& m, const CoarseGrainMap& map) {
  detail::require_same_space(map.fine(), m.space(), "quality_score");
  const ProbMeasure rho = steady_state(m);
  const std::vector<ProbMeasure> conditionals = conditional_measures(map, rho);

  QualityReport report;
  report.alpha = std::numeric_limits<double>::infinity();
  for (std::size_t y = 0; y < map.cluster_count(); ++y) {
    Generator restricted = restricted_generator(m, map, y);
    const SymmetrisedGenerator sym = symmetrise(restricted, conditionals[y]);
    ClusterQuality q{map.coarse().labels()[y],
                     std::move(restricted),
                     conditionals[y],
                     spectral_gap(sym),
                     conditionals[y].min_weight(),
                     0.0,
                     0.0};
    q.glsi_upper = 2.0 * q.gap;
    q.ratio = q.gap / (2.0 + std::log(1.0 / q.conditional_min));
    report.alpha = std::min(report.alpha, q.ratio);
    report.clusters.push_back(std::move(q));
  }
  return report;
}

MultiscaleChain::MultiscaleChain(Matrix q, Matrix g, CoarseGrainMap map)
    : q_(std::move(q)), g_(std::move(g)), map_(std::move(map)) {
  const std::size_t n = map_.fine().size();
  if (!q_.square() || q_.rows() != n || !g_.square() || g_.rows() != n)
    throw Error(ErrorCode::DimensionMismatch, "Q and G must match the fine space");
  const double q_tol = 1e-12 * std::max(max_abs(q_), 1.0);
  const double g_tol = 1e-12 * std::max(max_abs(g_), 1.0);
  for (std::size_t x1 = 0; x1 < n; ++x1) {
    double q_row = 0.0, g_row = 0.0;
    for (std::size_t x2 = 0; x2 < n; ++x2) {
      q_row += q_(x1, x2);
      g_row += g_(x1, x2);
      const bool same_cluster = map_.cluster_of(x1) == map_.cluster_of(x2);
      if (!same_cluster && q_(x1, x2) != 0.0)
        throw Error(ErrorCode::InvalidArgument, "Q must be block diagonal under the map");
      if (same_cluster && x1 != x2 && g_(x1, x2) != 0.0)
        throw Error(ErrorCode::InvalidArgument,
                    "G diagonal blocks must be diagonal matrices");
      if (x1 != x2 && (q_(x1, x2) < 0.0 || g_(x1, x2) < 0.0))
        throw Error(ErrorCode::NegativeOffDiagonal, "Q and G need non-negative rates");
    }
    if (std::abs(q_row) > q_tol || std::abs(g_row) > g_tol)
      throw Error(ErrorCode::RowSumNonzero, "Q and G rows must sum to zero");
  }
  // each fast block must carry its own irreducible dynamics
  for (std::size_t y = 0; y < map_.cluster_count(); ++y) (void)fast_block_steady_state(y);
}

Generator MultiscaleChain::assemble(double eps) const {
  if (!(eps > 0.0)) throw Error(ErrorCode::InvalidArgument, "eps must be positive");
  const std::size_t n = map_.fine().size();
  Matrix l(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) l(i, j) = q_(i, j) / eps + g_(i, j);
  return Generator(map_.fine(), std::move(l));
}

ProbMeasure MultiscaleChain::fast_block_steady_state(std::size_t y) const {
  const std::vector<std::size_t>& level = map_.level_set(y);
  const std::size_t k = level.size();
  if (k < 2)
    throw Error(ErrorCode::RestrictionNotIrreducible,
                "fast block on cluster " + map_.coarse().labels()[y] + " is a singleton");
  std::vector<std::string> labels;
  for (std::size_t x : level) labels.push_back(map_.fine().labels()[x]);
  Matrix block(k, k);
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t b = 0; b < k; ++b) block(a, b) = q_(level[a], level[b]);
  try {
    return steady_state(Generator(StateSpace(std::move(labels)), std::move(block)));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::NotIrreducible)
      throw Error(ErrorCode::RestrictionNotIrreducible,
                  "fast block on cluster " + map_.coarse().labels()[y] + " is not irreducible");
    throw;
  }
}

Generator averaged_generator(const MultiscaleChain& ms) {
  const CoarseGrainMap& map = ms.map();
  const std::size_t ny = map.cluster_count();
  Matrix av(ny, ny);
  for (std::size_t y = 0; y < ny; ++y) {
    const ProbMeasure pi_y = ms.fast_block_steady_state(y);
    const std::vector<std::size_t>& level = map.level_set(y);
    for (std::size_t a = 0; a < level.size(); ++a)
      for (std::size_t x2 = 0; x2 < map.fine().size(); ++x2) {
        const std::size_t y2 = map.cluster_of(x2);
        if (y2 == y) continue;
        av(y, y2) += ms.slow()(level[a], x2) * pi_y[a];
      }
    double row = 0.0;
    for (std::size_t y2 = 0; y2 < ny; ++y2)
      if (y2 != y) row += av(y, y2);
    av(y, y) = -row;
  }
  return Generator(map.coarse(), std::move(av));
}

namespace {

// Canonical restricted-growth string of an assignment (first occurrences
// renumbered 0,1,2,...); identical for any relabeling of the clusters.
std::string canonical_encoding(const std::vector<std::size_t>& assignment) {
  std::vector<int> relabel(assignment.size(), -1);
  int next = 0;
  std::string enc;
  enc.reserve(assignment.size());
  for (std::size_t x = 0; x < assignment.size(); ++x) {
    if (relabel[assignment[x]] < 0) relabel[assignment[x]] = next++;
    enc.push_back(static_cast<char>('a' + relabel[assignment[x]]));
  }
  return enc;
}

}  // namespace

SearchResult clustering_search(const Generator& m, std::size_t k, const SearchOptions& options) {
  const std::size_t n = m.size();
  if (n > options.max_states)
    throw Error(ErrorCode::SearchSpaceTooLarge,
                "state space larger than the cap of " + std::to_string(options.max_states));
  if (k < 2 || k > n - 1)
    throw Error(ErrorCode::InvalidArgument, "cluster count must lie in [2, |X|-1]");

  SearchResult result;
  // Restricted growth strings: a[0] = 0, a[x] <= 1 + max(previous).
  std::vector<std::size_t> assignment(n, 0);
  const StateSpace coarse = StateSpace::indexed(k, "c");

  const std::function<void(std::size_t, std::size_t)> recurse = [&](std::size_t x,
                                                                    std::size_t used) {
    if (result.enumerated > options.budget)
      throw Error(ErrorCode::SearchSpaceTooLarge, "partition budget exhausted");
    if (x == n) {
      if (used != k) return;
      ++result.enumerated;
      std::vector<std::size_t> sizes(k, 0);
      for (std::size_t v : assignment) ++sizes[v];
      if (*std::min_element(sizes.begin(), sizes.end()) < 2) {
        ++result.rejected_singleton;
        return;
      }
      CoarseGrainMap map(m.space(), coarse, assignment);
      try {
        const QualityReport report = quality_score(m, map);
        result.ranked.push_back(
            ScoredPartition{std::move(map), report.alpha, canonical_encoding(assignment)});
      } catch (const Error& e) {
        if (e.code() == ErrorCode::RestrictionNotIrreducible)
          ++result.rejected_reducible;
        else
          throw;
      }
      return;
    }
    const std::size_t limit = std::min(used + 1, k);
    for (std::size_t c = 0; c < limit; ++c) {
      assignment[x] = c;
      recurse(x + 1, std::max(used, c + 1));
    }
  };
  assignment[0] = 0;
  recurse(1, 1);

  std::sort(result.ranked.begin(), result.ranked.end(),
            [](const ScoredPartition& a, const ScoredPartition& b) {
              if (a.alpha != b.alpha) return a.alpha > b.alpha;
              return a.encoding < b.encoding;
            });
  return result;
}

double tv_distance(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size())
    throw Error(ErrorCode::DimensionMismatch, "TV distance length mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
  return 0.5 * s;
}

std::vector<SweepRow> multiscale_error_sweep(const MultiscaleChain& ms,
                                             const std::vector<double>& eps_list,
                                             const std::vector<double>& mu0,
                                             const std::vector<double>& eta0,
                                             const std::vector<double>& times) {
  if (eps_list.empty()) throw Error(ErrorCode::InvalidArgument, "empty eps list");
  for (std::size_t i = 0; i < eps_list.size(); ++i) {
    if (!(eps_list[i] > 0.0)) throw Error(ErrorCode::InvalidArgument, "eps must be positive");
    if (i > 0 && !(eps_list[i] < eps_list[i - 1]))
      throw Error(ErrorCode::InvalidArgument, "eps values must be decreasing");
  }
  const Generator l_av = averaged_generator(ms);
  const ProbMeasure pi_av = steady_state(l_av);

  std::vector<SweepRow> rows;
  rows.reserve(eps_list.size());
  for (double eps : eps_list) {
    const Generator l_eps = ms.assemble(eps);
    const ProbMeasure rho_eps = steady_state(l_eps);
    const Generator n_eps = effective_generator(l_eps, ms.map(), rho_eps);

    const Trajectory fine = evolve(l_eps, mu0, times);
    const Trajectory coarse = evolve(n_eps, eta0, times);

    SweepRow row;
    row.eps = eps;
    for (std::size_t i = 0; i < times.size(); ++i) {
      const std::vector<double> hat = pushforward(ms.map(), fine.states[i]);
      row.sup_entropy =
          std::max(row.sup_entropy, detail::entropy_of_ratio(coarse.states[i], hat));
    }
    row.tv_error = tv_distance(pushforward(ms.map(), rho_eps.weights()), pi_av.weights());
    row.generator_distance = max_abs_diff(n_eps.rates(), l_av.rates());
    rows.push_back(row);
  }
  return rows;
}

double coarse_consistency_residual(const Generator& m, const CoarseGrainMap& map,
                                   const std::vector<double>& mu0,
                                   const std::vector<double>& times,
                                   int substeps_per_interval) {
  const Trajectory fine = evolve(m, mu0, times);
  const Matrix mt = transpose(m.rates());

  const auto fine_at = [&](double t) {
    if (t == 0.0) return mu0;
    return mat_vec(expm(t * mt), mu0);
  };
  const auto coarse_rhs = [&](double t, const std::vector<double>& hat) {
    const Generator m_hat = coarse_grained_generator(m, map, fine_at(t));
    return mat_vec(transpose(m_hat.rates()), hat);
  };

  std::vector<double> hat = pushforward(map, fine_at(times.front()));
  double residual = 0.0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (i > 0) {
      const double span = times[i] - times[i - 1];
      const int steps = std::max(1, substeps_per_interval);
      const double h = span / steps;
      for (int s = 0; s < steps; ++s) {
        const double ts = times[i - 1] + s * h;
        const std::vector<double> k1 = coarse_rhs(ts, hat);
        std::vector<double> tmp(hat.size());
        for (std::size_t j = 0; j < hat.size(); ++j) tmp[j] = hat[j] + 0.5 * h * k1[j];
        const std::vector<double> k2 = coarse_rhs(ts + 0.5 * h, tmp);
        for (std::size_t j = 0; j < hat.size(); ++j) tmp[j] = hat[j] + 0.5 * h * k2[j];
        const std::vector<double> k3 = coarse_rhs(ts + 0.5 * h, tmp);
        for (std::size_t j = 0; j < hat.size(); ++j) tmp[j] = hat[j] + h * k3[j];
        const std::vector<double> k4 = coarse_rhs(ts + h, tmp);
        for (std::size_t j = 0; j < hat.size(); ++j)
          hat[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
      }
    }
    const std::vector<double> reference = pushforward(map, fine.states[i]);
    for (std::size_t j = 0; j < hat.size(); ++j)
      residual = std::max(residual, std::abs(hat[j] - reference[j]));
  }
  return residual;
}

}  // namespace mfi
