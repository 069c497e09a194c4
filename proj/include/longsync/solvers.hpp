#pragma once

#include <cstdint>
#include <vector>

#include "longsync/block_matrix.hpp"
#include "longsync/rotation.hpp"
#include "longsync/sync_problem.hpp"

namespace longsync {

struct RotationAssignment {
  std::vector<Rotation> rotations;  // one per node
  std::vector<int> component;       // connected-component label per node
  std::vector<bool> solved;         // true for nodes in the largest component
  int largest_component = 0;
};

// Maximum-weight spanning forest (Kruskal, ties broken by edge order), then
// per-component propagation R_i = R_ij R_j from an identity-fixed root (the
// lowest-index node of each component). Nodes outside the largest component
// keep their per-component solution but are flagged unsolved.
RotationAssignment mst_init(const SyncProblem& problem, const WeightMatrix& edge_weights);

// Deterministic random spanning forest; baseline init that uses no cycle
// information.
RotationAssignment random_tree_init(const SyncProblem& problem, std::uint64_t seed);

// Weighted chordal mean of unit quaternions: sign-align to the
// highest-weight member, accumulate weighted outer products, take the
// dominant eigenvector.
Rotation weighted_quat_mean(const std::vector<Rotation>& rotations,
                            const std::vector<double>& weights);

struct WeiszfeldConfig {
  int max_iters = 50;
  double tol = 1e-10;       // stop when the update angle drops below this
  double distance_floor = 1e-9;
};

// Geodesic median by Weiszfeld iterations in the tangent space.
Rotation weiszfeld_l1_mean(const std::vector<Rotation>& rotations, const Rotation& init,
                           const WeiszfeldConfig& cfg = WeiszfeldConfig{});

struct IrlsConfig {
  int max_iters = 100;
  double sigma_decay = 0.9;
  double sigma_floor_rad = M_PI / 180.0;  // 1 degree
  double tol = 1e-10;                     // mean update angle
};

// Graph-wide IRLS with the Geman-McClure loss on geodesic residuals.
// Jacobi sweeps: every node is re-estimated from the previous iterate, so
// results do not depend on node order. Optional prior edge weights multiply
// the robust weights.
RotationAssignment irls_gm(const SyncProblem& problem, const RotationAssignment& init,
                           const WeightMatrix* prior_edge_weights,
                           const IrlsConfig& cfg = IrlsConfig{});

// Symmetric-normalized-Laplacian spectral clustering with seeded k-means++
// (20 restarts, best inertia). Deterministic given the seed.
std::vector<int> spectral_cluster(const WeightMatrix& similarity, int k, std::uint64_t seed);

// K = max(2, round(0.6 sqrt(n p))) with p = 2|E| / (n (n-1)).
int default_cluster_count(int n, int edge_count);

}  // namespace longsync
