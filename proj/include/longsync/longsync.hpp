#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "longsync/block_matrix.hpp"
#include "longsync/numerics.hpp"
#include "longsync/sync_problem.hpp"

namespace longsync {

// Treatment of edges with no c-cycle support: either assume the worst
// (corruption level 1) or keep the previous estimate (0 before the first
// iteration).
enum class NoCyclePolicy { kSetCorruptionOne, kHoldPrevious };

struct LongSyncConfig {
  std::vector<int> lengths{3};
  std::vector<double> length_weights{1.0};  // convex; must sum to 1
  int iterations = 10;                      // T
  // Reweighting exponents; beta_at(t) falls back to min(2^t, beta_cap) when
  // the explicit schedule is empty.
  std::vector<double> beta;
  double beta_cap = 20.0;
  NoCyclePolicy policy = NoCyclePolicy::kSetCorruptionOne;
  bool keep_trace = false;
  // Cycle support below this is treated as starved; also the noise floor of
  // the closed forms' cancellations.
  double starvation_threshold = 1e-12;
  int naive_enumeration_limit = 12;

  static LongSyncConfig with_length(int c) {
    LongSyncConfig cfg;
    cfg.lengths = {c};
    cfg.length_weights = {1.0};
    return cfg;
  }
  static LongSyncConfig with_lengths(std::vector<int> cs, std::vector<double> lambdas) {
    LongSyncConfig cfg;
    cfg.lengths = std::move(cs);
    cfg.length_weights = std::move(lambdas);
    return cfg;
  }

  double beta_at(int t) const;
  void validate() const;
};

struct LongSyncState {
  WeightMatrix S;  // corruption estimates at t = T
  WeightMatrix W;  // edge weights at t = T + 1
  int t = 0;
  std::vector<std::pair<int, int>> starved_edges;  // at the final iteration
  std::vector<WeightMatrix> s_trace;               // S at each t if requested
};

// Vectorized corruption-level estimation over simple c-cycles via the closed
// forms; single length or a convex combination of lengths.
LongSyncState longsync_run(const SyncProblem& problem, const LongSyncConfig& cfg);
LongSyncState longsync_multilength(const SyncProblem& problem, const LongSyncConfig& cfg);

// Explicit cycle-enumeration reference. With quadratic mean it matches the
// vectorized path; with the plain mean it is the classic message-passing
// baseline.
LongSyncState cemp_naive(const SyncProblem& problem, const LongSyncConfig& cfg,
                         bool use_quadratic_mean);

// Frobenius-metric variant for invertible-matrix blocks; g(j,i) must equal
// g(i,j)^-1 on the support of `adjacency`.
LongSyncState longsync_linear_group(const BlockMatrix& g, const WeightMatrix& adjacency,
                                    const LongSyncConfig& cfg);

}  // namespace longsync
