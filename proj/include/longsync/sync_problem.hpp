#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <utility>
#include <vector>

#include "longsync/block_matrix.hpp"
#include "longsync/rotation.hpp"

namespace longsync {

// One synchronization instance: graph, observed relative rotations, and
// (for synthetic data) the ground truth and per-edge corruption levels.
// Edges are stored once with i < j; observation(j, i) is the transpose of
// observation(i, j).
struct SyncProblem {
  int n = 0;
  int d = 3;
  std::vector<std::pair<int, int>> edges;  // sorted, i < j
  std::vector<Rotation> observations;      // R_ij for edges[k]
  std::optional<std::vector<Rotation>> ground_truth;   // size n
  std::optional<std::vector<double>> true_corruption;  // aligned with edges
  std::uint64_t seed = 0;

  int edge_count() const { return static_cast<int>(edges.size()); }
  int edge_index(int i, int j) const;  // -1 if absent
  bool has_edge(int i, int j) const { return edge_index(i, j) >= 0; }
  Rotation observation(int i, int j) const;

  WeightMatrix adjacency() const;
  BlockMatrix observation_matrix() const;
  std::vector<std::vector<int>> neighbor_lists() const;

  // Checks the transpose link, rotation validity, and (when ground truth is
  // present) that stored corruption levels match the chordal distances.
  void validate(const NumericsConfig& cfg = default_numerics()) const;

  void rebuild_index();

 private:
  mutable std::vector<std::int64_t> index_keys_;  // sorted i*n+j for lookup
  mutable std::vector<int> index_vals_;
};

// Uniform corruption model: Erdos-Renyi graph with keep probability p; each
// edge observes the clean relative rotation w.p. q_g, otherwise an
// independent Haar draw.
SyncProblem gen_ucm(int n, double p, double q_g, std::uint64_t seed);

// UCM followed by a uniform random equal-size bisection with intra-cluster
// edges removed; the result is bipartite.
SyncProblem gen_ubcm(int n, double p, double q_g, std::uint64_t seed);

// Corruption sampler: returns the observed rotation for a bad edge given the
// clean relative rotation (must differ from it).
using CorruptionSampler =
    std::function<Rotation(std::mt19937_64&, const Rotation& clean)>;

// Arbitrary corrupted-edge placement over a caller-specified edge set.
SyncProblem gen_adversarial(int n, const std::vector<std::pair<int, int>>& edge_set,
                            const std::vector<std::pair<int, int>>& bad_edges,
                            const CorruptionSampler& sampler, std::uint64_t seed);

struct CorruptionStats {
  double lambda = 0.0;  // max over edges of bad/total simple c-cycle fraction
  std::vector<long long> per_edge_total;  // aligned with problem.edges
  std::vector<long long> per_edge_bad;
  int edges_without_cycles = 0;
};

// Exact good/bad cycle counts by simple-path enumeration. Requires
// true_corruption. The default enumeration limits keep runtime small; pass
// limit_override to loosen them deliberately.
CorruptionStats compute_lambda(const SyncProblem& problem, int c,
                               int limit_override = -1);

// Neighbor-set Jaccard index on edges, zero elsewhere.
WeightMatrix jaccard_matrix(const SyncProblem& problem);

}  // namespace longsync
