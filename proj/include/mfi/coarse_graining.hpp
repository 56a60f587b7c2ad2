#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mfi/chain.hpp"
#include "mfi/constants.hpp"

namespace mfi {

// Surjection from fine states onto cluster labels. Level sets are the
// clusters; every cluster is nonempty and there are at least two.
class CoarseGrainMap {
 public:
  CoarseGrainMap(StateSpace fine, StateSpace coarse, std::vector<std::size_t> assignment);

  const StateSpace& fine() const { return fine_; }
  const StateSpace& coarse() const { return coarse_; }
  std::size_t cluster_of(std::size_t fine_index) const { return assignment_[fine_index]; }
  const std::vector<std::size_t>& assignment() const { return assignment_; }
  // Fine indices of cluster y, ascending.
  const std::vector<std::size_t>& level_set(std::size_t y) const { return level_sets_[y]; }
  std::size_t cluster_count() const { return coarse_.size(); }

 private:
  StateSpace fine_;
  StateSpace coarse_;
  std::vector<std::size_t> assignment_;
  std::vector<std::vector<std::size_t>> level_sets_;
};

std::vector<double> pushforward(const CoarseGrainMap& map, const std::vector<double>& mu);
ProbMeasure pushforward(const CoarseGrainMap& map, const ProbMeasure& mu);

// Conditionals rho(.|y) of a strictly positive measure, one per cluster, each
// living on the restricted state space of its level set.
std::vector<ProbMeasure> conditional_measures(const CoarseGrainMap& map, const ProbMeasure& rho);

// Block of M on a level set with the diagonal reset to the negative block row
// sums (the unique choice making the block a generator).
Generator restricted_generator(const Generator& m, const CoarseGrainMap& map, std::size_t y);

// Exact coarse-grained generator at a fine distribution mu:
// Mhat(y1,y2) = sum M(x1,x2) mu(x1|y1).
Generator coarse_grained_generator(const Generator& m, const CoarseGrainMap& map,
                                   const std::vector<double>& mu);

// Effective generator: the exact coarse-grained generator frozen at the
// steady state of M.
Generator effective_generator(const Generator& m, const CoarseGrainMap& map,
                              const ProbMeasure& rho);

// Averaged generator: rates averaged against the restricted generators' own
// steady states.
Generator averaged_generator(const Generator& m, const CoarseGrainMap& map);

struct ClusterQuality {
  std::string label;
  Generator restricted;
  ProbMeasure conditional;
  double gap = 0.0;              // spectral gap of the symmetrised restriction
  double conditional_min = 0.0;  // rho(.|y)_*
  double glsi_upper = 0.0;       // 2 * gap
  double ratio = 0.0;            // gap / (2 + log(1/conditional_min))
};

struct QualityReport {
  std::vector<ClusterQuality> clusters;
  double alpha = 0.0;  // min over clusters of ratio
};

QualityReport quality_score(const Generator& m, const CoarseGrainMap& map);

// Fast intra-cluster rates Q (block diagonal, each block irreducible) plus
// slow inter-cluster rates G; assembles L^eps = Q/eps + G.
class MultiscaleChain {
 public:
  MultiscaleChain(Matrix q, Matrix g, CoarseGrainMap map);

  const Matrix& fast() const { return q_; }
  const Matrix& slow() const { return g_; }
  const CoarseGrainMap& map() const { return map_; }
  Generator assemble(double eps) const;
  // Steady state of the fast block on cluster y.
  ProbMeasure fast_block_steady_state(std::size_t y) const;

 private:
  Matrix q_;
  Matrix g_;
  CoarseGrainMap map_;
};

// eps-free limit generator built from the fast blocks' steady states.
Generator averaged_generator(const MultiscaleChain& ms);

struct SearchOptions {
  std::size_t max_states = 12;
  std::uint64_t budget = 2000000;  // partitions examined before giving up
};

struct ScoredPartition {
  CoarseGrainMap map;
  double alpha = 0.0;
  std::string encoding;  // canonical restricted-growth string, e.g. "001011"
};

struct SearchResult {
  std::vector<ScoredPartition> ranked;  // descending alpha, ties by encoding
  std::uint64_t enumerated = 0;
  std::uint64_t rejected_singleton = 0;
  std::uint64_t rejected_reducible = 0;
};

// Exhaustive enumeration of unlabeled k-partitions, scored by quality alpha.
SearchResult clustering_search(const Generator& m, std::size_t k,
                               const SearchOptions& options = {});

struct SweepRow {
  double eps = 0.0;
  double sup_entropy = 0.0;         // sup_t H_{eta_t}(muhat_t / eta_t)
  double tv_error = 0.0;            // ||rhohat^eps - pi^av||_TV
  double generator_distance = 0.0;  // max-entry distance ||N^eps - L^av||
};

std::vector<SweepRow> multiscale_error_sweep(const MultiscaleChain& ms,
                                             const std::vector<double>& eps_list,
                                             const std::vector<double>& mu0,
                                             const std::vector<double>& eta0,
                                             const std::vector<double>& times);

// Max distance between pushforward(mu_t) and the solution of the exact
// coarse-grained equation integrated with Mhat sampled along the fine flow.
double coarse_consistency_residual(const Generator& m, const CoarseGrainMap& map,
                                   const std::vector<double>& mu0,
                                   const std::vector<double>& times,
                                   int substeps_per_interval = 64);

double tv_distance(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace mfi
