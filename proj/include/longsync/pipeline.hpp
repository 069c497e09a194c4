#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "longsync/evaluation.hpp"
#include "longsync/longsync.hpp"
#include "longsync/solvers.hpp"
#include "longsync/sync_problem.hpp"

namespace longsync {

struct PipelineOptions {
  int k_override = -1;  // <= 0: K = max(2, round(0.6 sqrt(n p)))
  bool use_jaccard = true;
  int prune_degree = 4;          // nodes need this many good incident edges
  double prune_corruption = 0.1; // threshold below which an edge counts as good
  std::uint64_t seed = 0;
  LongSyncConfig intra_cfg = LongSyncConfig::with_length(3);
  LongSyncConfig inter_cfg = LongSyncConfig::with_length(4);
  IrlsConfig irls;
};

struct ClusterPlan {
  int k = 0;
  std::vector<int> labels;  // one per node
  std::vector<std::vector<int>> cluster_nodes;
  // cluster pair (k < l) -> indices of spanning edges in the parent problem
  std::map<std::pair<int, int>, std::vector<int>> inter_edges;
};

enum class NodeStatus { kSolved, kPruned, kUnsolvedDisconnected };

struct ClusterSolution {
  std::vector<int> nodes;           // solved nodes, global ids
  std::vector<Rotation> rotations;  // aligned with `nodes`
  std::vector<int> pruned;          // dropped by the degree rule
  std::vector<int> unsolved;        // dropped with small components
  WeightMatrix edge_weights;        // LongSync weights on the subgraph (global ids)
  WeightMatrix corruption;          // LongSync corruption estimates (global ids)
};

struct StitchResult {
  std::vector<Rotation> cluster_rotation;  // per cluster; identity when unavailable
  std::vector<bool> cluster_stitched;
  std::vector<Rotation> final_rotations;   // per node (valid where status == solved)
  std::vector<NodeStatus> status;
};

struct InterClusterEstimate {
  Rotation rotation;
  int support = 0;        // number of candidate edges
  bool available = false;
  bool weighted = false;  // false when the 4-cycle weighting fell back to uniform
  // corruption estimates of the spanning edges: (parent edge index, s)
  std::vector<std::pair<int, double>> edge_corruption;
};

struct PipelineReport {
  ClusterPlan plan;
  std::vector<double> stage_seconds;  // 5 stages
  std::vector<NodeStatus> status;
  std::vector<Rotation> final_rotations;
  std::vector<double> edge_corruption;  // per parent edge; NaN when never estimated
  std::optional<ErrorSummary> errors;   // present when ground truth is available
  int n_solved = 0, n_pruned = 0, n_unsolved = 0;
};

SyncProblem make_subproblem(const SyncProblem& parent, const std::vector<int>& nodes,
                            std::vector<int>* edge_map = nullptr);

ClusterPlan partition(const SyncProblem& problem, bool use_jaccard, std::uint64_t seed,
                      int k_override = -1);

ClusterSolution refine_cluster(const SyncProblem& parent, const std::vector<int>& nodes,
                               const PipelineOptions& opts);

// Estimate the relative rotation between two solved clusters from their
// spanning edges, weighting the candidates by a bipartite 4-cycle run.
InterClusterEstimate inter_cluster_rotation(const SyncProblem& parent,
                                            const ClusterPlan& plan,
                                            const std::vector<ClusterSolution>& solutions,
                                            int k, int l, const PipelineOptions& opts);

StitchResult stitch_and_merge(const SyncProblem& parent, const ClusterPlan& plan,
                              const std::map<std::pair<int, int>, InterClusterEstimate>& pair_rotations,
                              const std::vector<ClusterSolution>& solutions,
                              const PipelineOptions& opts);

PipelineReport run_pipeline(const SyncProblem& problem, const PipelineOptions& opts);

}  // namespace longsync
