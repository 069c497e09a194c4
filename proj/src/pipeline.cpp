#include "longsync/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>
#include <stdexcept>

#include "longsync/rng.hpp"

namespace longsync {

namespace {

double seconds_since(const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<int> largest_component(int n, const std::vector<std::pair<int, int>>& edges,
                                   const std::vector<char>& keep) {
  std::vector<std::vector<int>> adj(n);
  for (const auto& [i, j] : edges) {
    if (keep[i] && keep[j]) {
      adj[i].push_back(j);
      adj[j].push_back(i);
    }
  }
  std::vector<int> comp(n, -1);
  int best_comp = -1, best_size = 0, c = 0;
  for (int s = 0; s < n; ++s) {
    if (!keep[s] || comp[s] >= 0) continue;
    int size = 0;
    std::queue<int> q;
    q.push(s);
    comp[s] = c;
    while (!q.empty()) {
      int v = q.front();
      q.pop();
      ++size;
      for (int w : adj[v]) {
        if (comp[w] < 0) {
          comp[w] = c;
          q.push(w);
        }
      }
    }
    if (size > best_size) {
      best_size = size;
      best_comp = c;
    }
    ++c;
  }
  std::vector<int> out;
  for (int v = 0; v < n; ++v) {
    if (keep[v] && comp[v] == best_comp) out.push_back(v);
  }
  return out;
}

}  // namespace

SyncProblem make_subproblem(const SyncProblem& parent, const std::vector<int>& nodes,
                            std::vector<int>* edge_map) {
  std::vector<int> sorted = nodes;
  std::sort(sorted.begin(), sorted.end());
  std::vector<int> local(parent.n, -1);
  for (size_t k = 0; k < sorted.size(); ++k) local[sorted[k]] = static_cast<int>(k);

  SyncProblem sub;
  sub.n = static_cast<int>(sorted.size());
  sub.d = parent.d;
  sub.seed = parent.seed;
  if (parent.ground_truth) {
    sub.ground_truth.emplace();
    for (int g : sorted) sub.ground_truth->push_back((*parent.ground_truth)[g]);
  }
  if (parent.true_corruption) sub.true_corruption.emplace();
  if (edge_map) edge_map->clear();
  for (int e = 0; e < parent.edge_count(); ++e) {
    const auto& [i, j] = parent.edges[e];
    if (local[i] < 0 || local[j] < 0) continue;
    sub.edges.emplace_back(local[i], local[j]);
    sub.observations.push_back(parent.observations[e]);
    if (parent.true_corruption) sub.true_corruption->push_back((*parent.true_corruption)[e]);
    if (edge_map) edge_map->push_back(e);
  }
  sub.rebuild_index();
  return sub;
}

ClusterPlan partition(const SyncProblem& problem, bool use_jaccard, std::uint64_t seed,
                      int k_override) {
  ClusterPlan plan;
  plan.k = k_override > 0 ? k_override
                          : default_cluster_count(problem.n, problem.edge_count());
  if (plan.k == 1) {
    plan.labels.assign(problem.n, 0);
  } else {
    const WeightMatrix sim =
        use_jaccard ? jaccard_matrix(problem) : problem.adjacency();
    plan.labels = spectral_cluster(sim, plan.k, seed);
  }
  plan.cluster_nodes.assign(plan.k, {});
  for (int i = 0; i < problem.n; ++i) plan.cluster_nodes[plan.labels[i]].push_back(i);
  for (int e = 0; e < problem.edge_count(); ++e) {
    const auto& [i, j] = problem.edges[e];
    int a = plan.labels[i], b = plan.labels[j];
    if (a == b) continue;
    if (a > b) std::swap(a, b);
    plan.inter_edges[{a, b}].push_back(e);
  }
  return plan;
}

ClusterSolution refine_cluster(const SyncProblem& parent, const std::vector<int>& nodes,
                               const PipelineOptions& opts) {
  ClusterSolution out;
  out.edge_weights = WeightMatrix::Zero(parent.n, parent.n);
  out.corruption = WeightMatrix::Constant(parent.n, parent.n,
                                          std::numeric_limits<double>::quiet_NaN());
  if (nodes.empty()) return out;

  std::vector<int> edge_map;
  const SyncProblem sub = make_subproblem(parent, nodes, &edge_map);
  std::vector<int> sorted = nodes;
  std::sort(sorted.begin(), sorted.end());
  if (sub.edges.empty()) {
    out.unsolved = sorted;
    return out;
  }

  const LongSyncState state = longsync_run(sub, opts.intra_cfg);
  for (int e = 0; e < sub.edge_count(); ++e) {
    const auto& [li, lj] = sub.edges[e];
    const auto& [gi, gj] = parent.edges[edge_map[e]];
    out.edge_weights(gi, gj) = out.edge_weights(gj, gi) = state.W(li, lj);
    out.corruption(gi, gj) = out.corruption(gj, gi) = state.S(li, lj);
  }

  // degree rule: a node survives with >= prune_degree incident edges whose
  // estimated corruption is below prune_corruption
  std::vector<int> good_degree(sub.n, 0);
  for (int e = 0; e < sub.edge_count(); ++e) {
    const auto& [li, lj] = sub.edges[e];
    if (state.S(li, lj) < opts.prune_corruption) {
      ++good_degree[li];
      ++good_degree[lj];
    }
  }
  std::vector<char> keep(sub.n, 0);
  for (int v = 0; v < sub.n; ++v) keep[v] = good_degree[v] >= opts.prune_degree;
  for (int v = 0; v < sub.n; ++v) {
    if (!keep[v]) out.pruned.push_back(sorted[v]);
  }

  const std::vector<int> survivors = largest_component(sub.n, sub.edges, keep);
  std::vector<char> in_survivors(sub.n, 0);
  for (int v : survivors) in_survivors[v] = 1;
  for (int v = 0; v < sub.n; ++v) {
    if (keep[v] && !in_survivors[v]) out.unsolved.push_back(sorted[v]);
  }
  if (survivors.empty()) return out;

  std::vector<int> survivors_global;
  for (int v : survivors) survivors_global.push_back(sorted[v]);
  std::vector<int> edge_map2;
  const SyncProblem solve_sub = make_subproblem(sub, survivors, &edge_map2);
  WeightMatrix w2 = WeightMatrix::Zero(solve_sub.n, solve_sub.n);
  for (int e = 0; e < solve_sub.edge_count(); ++e) {
    const auto& [a, b] = solve_sub.edges[e];
    const auto& [la, lb] = sub.edges[edge_map2[e]];
    w2(a, b) = w2(b, a) = state.W(la, lb);
  }
  const RotationAssignment init = mst_init(solve_sub, w2);
  const RotationAssignment refined = irls_gm(solve_sub, init, &w2, opts.irls);
  for (int v = 0; v < solve_sub.n; ++v) {
    if (!refined.solved[v]) {
      out.unsolved.push_back(survivors_global[v]);
      continue;
    }
    out.nodes.push_back(survivors_global[v]);
    out.rotations.push_back(refined.rotations[v]);
  }
  return out;
}

InterClusterEstimate inter_cluster_rotation(const SyncProblem& parent,
                                            const ClusterPlan& plan,
                                            const std::vector<ClusterSolution>& solutions,
                                            int k, int l, const PipelineOptions& opts) {
  InterClusterEstimate out;
  auto it = plan.inter_edges.find({std::min(k, l), std::max(k, l)});
  if (it == plan.inter_edges.end()) return out;

  std::vector<int> pos_k(parent.n, -1), pos_l(parent.n, -1);
  for (size_t idx = 0; idx < solutions[k].nodes.size(); ++idx)
    pos_k[solutions[k].nodes[idx]] = static_cast<int>(idx);
  for (size_t idx = 0; idx < solutions[l].nodes.size(); ++idx)
    pos_l[solutions[l].nodes[idx]] = static_cast<int>(idx);

  // usable spanning edges: both endpoints solved
  std::vector<int> usable;
  std::vector<int> involved;
  for (int e : it->second) {
    const auto& [i, j] = parent.edges[e];
    const int p = plan.labels[i] == k ? i : j;  // endpoint in cluster k
    const int q = plan.labels[i] == k ? j : i;
    if (pos_k[p] < 0 || pos_l[q] < 0) continue;
    usable.push_back(e);
    involved.push_back(i);
    involved.push_back(j);
  }
  if (usable.empty()) return out;
  std::sort(involved.begin(), involved.end());
  involved.erase(std::unique(involved.begin(), involved.end()), involved.end());

  // bipartite weighting over the spanning edges only
  std::vector<int> local(parent.n, -1);
  for (size_t idx = 0; idx < involved.size(); ++idx) local[involved[idx]] = static_cast<int>(idx);
  SyncProblem bip;
  bip.n = static_cast<int>(involved.size());
  bip.d = parent.d;
  bip.seed = parent.seed;
  std::vector<std::pair<int, std::pair<int, int>>> ordered;  // (local edge, parent edge)
  for (int e : usable) {
    const auto& [i, j] = parent.edges[e];
    int a = local[i], b = local[j];
    if (a > b) std::swap(a, b);
    ordered.push_back({e, {a, b}});
  }
  std::sort(ordered.begin(), ordered.end(),
            [](const auto& x, const auto& y) { return x.second < y.second; });
  std::vector<int> bip_parent_edge;
  for (const auto& [e, ab] : ordered) {
    bip.edges.push_back(ab);
    const auto& [i, j] = parent.edges[e];
    bip.observations.push_back(local[i] == ab.first ? parent.observations[e]
                                                    : parent.observations[e].inverse());
    bip_parent_edge.push_back(e);
  }
  bip.rebuild_index();

  WeightMatrix weights_mat;
  bool all_starved = true;
  {
    const LongSyncState st = longsync_run(bip, opts.inter_cfg);
    weights_mat = st.W;
    all_starved = st.starved_edges.size() == bip.edges.size();
    for (int b = 0; b < bip.edge_count(); ++b) {
      const auto& [bi, bj] = bip.edges[b];
      out.edge_corruption.emplace_back(bip_parent_edge[b], st.S(bi, bj));
    }
  }

  std::vector<Rotation> candidates;
  std::vector<double> weights;
  std::vector<std::pair<int, double>> edge_s;
  for (size_t idx = 0; idx < usable.size(); ++idx) {
    const int e = usable[idx];
    const auto& [i, j] = parent.edges[e];
    const int p = plan.labels[i] == k ? i : j;
    const int q = plan.labels[i] == k ? j : i;
    const Rotation& rp = solutions[k].rotations[pos_k[p]];
    const Rotation& rq = solutions[l].rotations[pos_l[q]];
    candidates.push_back(Rotation::unchecked(rp.matrix().transpose() *
                                             parent.observation(p, q).matrix() *
                                             rq.matrix()));
    const double w = all_starved ? 1.0 : weights_mat(local[i], local[j]);
    weights.push_back(std::max(w, 0.0));
  }
  double wsum = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (wsum <= 0.0) {
    std::fill(weights.begin(), weights.end(), 1.0);
    all_starved = true;
  }

  const Rotation init = weighted_quat_mean(candidates, weights);
  out.rotation = candidates.size() == 1 ? candidates[0]
                                        : weiszfeld_l1_mean(candidates, init);
  out.support = static_cast<int>(candidates.size());
  out.available = true;
  out.weighted = !all_starved;
  return out;
}

StitchResult stitch_and_merge(
    const SyncProblem& parent, const ClusterPlan& plan,
    const std::map<std::pair<int, int>, InterClusterEstimate>& pair_rotations,
    const std::vector<ClusterSolution>& solutions, const PipelineOptions& opts) {
  StitchResult out;
  const int k = plan.k;
  out.cluster_rotation.assign(k, Rotation::identity(parent.d));
  out.cluster_stitched.assign(k, false);
  out.final_rotations.assign(parent.n, Rotation::identity(parent.d));
  out.status.assign(parent.n, NodeStatus::kUnsolvedDisconnected);

  for (int c = 0; c < k; ++c) {
    for (int v : solutions[c].pruned) out.status[v] = NodeStatus::kPruned;
  }

  if (k == 1) {
    out.cluster_stitched[0] = !solutions[0].nodes.empty();
  } else {
    // cluster-level synchronization over the available pair rotations
    SyncProblem cluster_graph;
    cluster_graph.n = k;
    cluster_graph.d = parent.d;
    cluster_graph.seed = parent.seed;
    for (const auto& [pair, est] : pair_rotations) {
      if (!est.available) continue;
      cluster_graph.edges.push_back(pair);
      cluster_graph.observations.push_back(est.rotation);
    }
    cluster_graph.rebuild_index();
    if (!cluster_graph.edges.empty()) {
      WeightMatrix w;
      LongSyncConfig cg_cfg = LongSyncConfig::with_length(3);
      cg_cfg.iterations = opts.intra_cfg.iterations;
      const LongSyncState st = longsync_run(cluster_graph, cg_cfg);
      w = st.W;
      const RotationAssignment init = mst_init(cluster_graph, w);
      const RotationAssignment solved = irls_gm(cluster_graph, init, &w, opts.irls);
      for (int c = 0; c < k; ++c) {
        if (!solved.solved[c] || solutions[c].nodes.empty()) continue;
        out.cluster_stitched[c] = true;
        out.cluster_rotation[c] =
            Rotation::unchecked(solved.rotations[c].matrix().transpose());
      }
    } else if (!solutions.empty()) {
      // nothing to stitch; keep the largest solved cluster only
      int best = -1, best_size = 0;
      for (int c = 0; c < k; ++c) {
        if (static_cast<int>(solutions[c].nodes.size()) > best_size) {
          best_size = static_cast<int>(solutions[c].nodes.size());
          best = c;
        }
      }
      if (best >= 0) out.cluster_stitched[best] = true;
    }
  }

  for (int c = 0; c < k; ++c) {
    if (!out.cluster_stitched[c]) continue;
    // R_final = R_hat * R_c^T
    const Eigen::MatrixXd rct = out.cluster_rotation[c].matrix().transpose();
    for (size_t idx = 0; idx < solutions[c].nodes.size(); ++idx) {
      const int v = solutions[c].nodes[idx];
      out.final_rotations[v] =
          Rotation::unchecked(solutions[c].rotations[idx].matrix() * rct);
      out.status[v] = NodeStatus::kSolved;
    }
  }
  return out;
}

PipelineReport run_pipeline(const SyncProblem& problem, const PipelineOptions& opts) {
  PipelineReport report;
  report.stage_seconds.assign(5, 0.0);
  report.edge_corruption.assign(problem.edges.size(),
                                std::numeric_limits<double>::quiet_NaN());

  auto t0 = std::chrono::steady_clock::now();
  report.plan = partition(problem, opts.use_jaccard, opts.seed, opts.k_override);
  report.stage_seconds[0] = seconds_since(t0);

  t0 = std::chrono::steady_clock::now();
  std::vector<ClusterSolution> solutions;
  solutions.reserve(report.plan.k);
  for (int c = 0; c < report.plan.k; ++c) {
    solutions.push_back(refine_cluster(problem, report.plan.cluster_nodes[c], opts));
  }
  for (int e = 0; e < problem.edge_count(); ++e) {
    const auto& [i, j] = problem.edges[e];
    for (const auto& sol : solutions) {
      const double s = sol.corruption(i, j);
      if (!std::isnan(s)) {
        report.edge_corruption[e] = s;
        break;
      }
    }
  }
  report.stage_seconds[1] = seconds_since(t0);

  t0 = std::chrono::steady_clock::now();
  std::map<std::pair<int, int>, InterClusterEstimate> pair_rotations;
  for (const auto& [pair, edges] : report.plan.inter_edges) {
    pair_rotations[pair] = inter_cluster_rotation(problem, report.plan, solutions,
                                                  pair.first, pair.second, opts);
    for (const auto& [e, sv] : pair_rotations[pair].edge_corruption) {
      if (std::isnan(report.edge_corruption[e])) report.edge_corruption[e] = sv;
    }
  }
  report.stage_seconds[2] = seconds_since(t0);

  t0 = std::chrono::steady_clock::now();
  StitchResult stitched =
      stitch_and_merge(problem, report.plan, pair_rotations, solutions, opts);
  report.stage_seconds[3] = seconds_since(t0);

  t0 = std::chrono::steady_clock::now();
  report.status = stitched.status;
  report.final_rotations = stitched.final_rotations;
  for (NodeStatus s : report.status) {
    if (s == NodeStatus::kSolved) ++report.n_solved;
    else if (s == NodeStatus::kPruned) ++report.n_pruned;
    else ++report.n_unsolved;
  }
  if (problem.ground_truth && report.n_solved > 0) {
    std::vector<bool> mask(problem.n, false);
    for (int i = 0; i < problem.n; ++i) mask[i] = report.status[i] == NodeStatus::kSolved;
    const Rotation q = align(report.final_rotations, *problem.ground_truth, mask);
    report.errors = error_summary(report.final_rotations, *problem.ground_truth, q, mask);
  }
  report.stage_seconds[4] = seconds_since(t0);
  return report;
}

}  // namespace longsync
