#include "longsync/longsync.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "longsync/cycle_forms.hpp"
#include "longsync/rotation.hpp"

namespace longsync {

double LongSyncConfig::beta_at(int t) const {
  if (!beta.empty()) {
    if (t < static_cast<int>(beta.size())) return beta[static_cast<size_t>(t)];
    return beta.back();
  }
  return std::min(std::pow(2.0, t), beta_cap);
}

void LongSyncConfig::validate() const {
  if (lengths.empty() || lengths.size() != length_weights.size()) {
    throw std::invalid_argument("LongSyncConfig: lengths/weights mismatch");
  }
  double sum = 0.0;
  for (double l : length_weights) {
    if (l < 0.0) throw std::invalid_argument("LongSyncConfig: negative length weight");
    sum += l;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw std::invalid_argument("LongSyncConfig: length weights must sum to 1");
  }
  for (int c : lengths) {
    if (c < 3 || c > 6) throw std::invalid_argument("LongSyncConfig: lengths must be in 3..6");
  }
  if (iterations < 0) throw std::invalid_argument("LongSyncConfig: negative iteration count");
  for (int t = 0; t <= iterations; ++t) {
    if (beta_at(t) <= 0.0) throw std::invalid_argument("LongSyncConfig: beta must be positive");
  }
}

namespace {

void update_weights(WeightMatrix& w, const WeightMatrix& a, const WeightMatrix& s,
                    double beta, double underflow) {
  w = (a.array() * (-beta * s.array()).exp()).matrix();
  w = (w.array().abs() < underflow).select(0.0, w);
}

LongSyncState run_vectorized(const WeightMatrix& a, const BlockMatrix& r,
                             const std::vector<std::pair<int, int>>& edges,
                             const LongSyncConfig& cfg) {
  cfg.validate();
  if (edges.empty()) throw std::invalid_argument("longsync: graph has no edges");
  const int n = static_cast<int>(a.rows());
  const int d = r.block_dim();

  LongSyncState state;
  state.W = a;
  state.S = WeightMatrix::Zero(n, n);
  WeightMatrix prev_s = WeightMatrix::Zero(n, n);

  for (int t = 0; t <= cfg.iterations; ++t) {
    WeightMatrix acc = WeightMatrix::Zero(n, n);
    std::vector<char> supported(edges.size(), 0);
    // h = g / (d f) is scale-free in the weights, so normalize by the largest
    // entry; otherwise exp(-beta s) shrinks every path product toward the
    // closed forms' cancellation noise and support tests become meaningless.
    const double scale = state.W.maxCoeff();
    const WeightMatrix w_norm = scale > 0.0 ? (state.W / scale).eval() : state.W;
    for (size_t ci = 0; ci < cfg.lengths.size(); ++ci) {
      const double lam = cfg.length_weights[ci];
      if (lam == 0.0) continue;
      const CycleFormResult forms = f_g_closed_form(w_norm, r, cfg.lengths[ci]);
      for (size_t e = 0; e < edges.size(); ++e) {
        const auto& [i, j] = edges[e];
        const double f = forms.f(i, j);
        if (f <= cfg.starvation_threshold) continue;
        supported[e] = 1;
        const double inner =
            (forms.g.block(i, j).array() * r.block(i, j).array()).sum();
        acc(i, j) += lam * inner / (d * f);
      }
    }
    state.starved_edges.clear();
    for (size_t e = 0; e < edges.size(); ++e) {
      const auto& [i, j] = edges[e];
      double s;
      if (!supported[e]) {
        state.starved_edges.emplace_back(i, j);
        s = cfg.policy == NoCyclePolicy::kSetCorruptionOne ? 1.0 : prev_s(i, j);
      } else {
        const double pre = std::clamp(1.0 - acc(i, j), 0.0, 1.0);
        s = std::sqrt(pre);
      }
      state.S(i, j) = state.S(j, i) = s;
    }
    if (cfg.keep_trace) state.s_trace.push_back(state.S);
    update_weights(state.W, a, state.S, cfg.beta_at(t),
                   default_numerics().weight_underflow);
    prev_s = state.S;
    state.t = t;
  }
  return state;
}

}  // namespace

LongSyncState longsync_run(const SyncProblem& problem, const LongSyncConfig& cfg) {
  return run_vectorized(problem.adjacency(), problem.observation_matrix(),
                        problem.edges, cfg);
}

LongSyncState longsync_multilength(const SyncProblem& problem, const LongSyncConfig& cfg) {
  return run_vectorized(problem.adjacency(), problem.observation_matrix(),
                        problem.edges, cfg);
}

LongSyncState cemp_naive(const SyncProblem& problem, const LongSyncConfig& cfg,
                         bool use_quadratic_mean) {
  cfg.validate();
  if (cfg.lengths.size() != 1) {
    throw std::invalid_argument("cemp_naive: single cycle length only");
  }
  const int c = cfg.lengths[0];
  if (problem.edges.empty()) throw std::invalid_argument("cemp_naive: graph has no edges");
  if (c >= 4 && problem.n > cfg.naive_enumeration_limit) {
    throw std::invalid_argument("cemp_naive: enumeration limit exceeded for c >= 4");
  }
  const int n = problem.n;
  const int d = problem.d;
  const auto nbr = problem.neighbor_lists();
  const BlockMatrix r = problem.observation_matrix();

  // Per edge: the list of simple ij,c-paths, each as (inconsistency d_L,
  // indices of the path's c-1 edges). d_L is fixed; only weights change.
  struct Cycle {
    double d_l;
    std::vector<int> path_edges;
  };
  std::vector<std::vector<Cycle>> cycles(problem.edges.size());
  std::vector<char> visited(n, 0);
  for (int e = 0; e < problem.edge_count(); ++e) {
    const auto& [i, j] = problem.edges[e];
    visited.assign(n, 0);
    visited[i] = visited[j] = 1;
    std::vector<int> path_edges;
    Eigen::MatrixXd prod = Eigen::MatrixXd::Identity(d, d);
    auto dfs = [&](auto&& self, int cur, int depth, const Eigen::MatrixXd& acc) -> void {
      if (depth == c - 2) {
        const int k = problem.edge_index(cur, j);
        if (k < 0) return;
        path_edges.push_back(k);
        Eigen::MatrixXd full = acc * r.block(cur, j);
        const double inner = (full.array() * r.block(problem.edges[e].first,
                                                     problem.edges[e].second)
                                                 .array())
                                 .sum();
        Cycle cy;
        cy.d_l = std::sqrt(std::max(0.0, 1.0 - inner / d));
        cy.path_edges = path_edges;
        cycles[e].push_back(std::move(cy));
        path_edges.pop_back();
        return;
      }
      for (int nxt : nbr[cur]) {
        if (visited[nxt]) continue;
        const int k = problem.edge_index(cur, nxt);
        visited[nxt] = 1;
        path_edges.push_back(k);
        Eigen::MatrixXd next_acc = acc * r.block(cur, nxt);
        self(self, nxt, depth + 1, next_acc);
        path_edges.pop_back();
        visited[nxt] = 0;
      }
    };
    dfs(dfs, i, 0, prod);
  }

  LongSyncState state;
  std::vector<double> edge_weight(problem.edges.size(), 1.0);
  std::vector<double> s(problem.edges.size(), 0.0);
  std::vector<double> prev(problem.edges.size(), 0.0);
  state.S = WeightMatrix::Zero(n, n);

  for (int t = 0; t <= cfg.iterations; ++t) {
    state.starved_edges.clear();
    // same weight normalization as the vectorized path
    double scale = 0.0;
    for (double w : edge_weight) scale = std::max(scale, w);
    if (scale <= 0.0) scale = 1.0;
    for (int e = 0; e < problem.edge_count(); ++e) {
      double z = 0.0, num = 0.0;
      for (const Cycle& cy : cycles[e]) {
        double w_l = 1.0;
        for (int k : cy.path_edges) w_l *= edge_weight[static_cast<size_t>(k)] / scale;
        z += w_l;
        num += w_l * (use_quadratic_mean ? cy.d_l * cy.d_l : cy.d_l);
      }
      if (z <= cfg.starvation_threshold) {
        state.starved_edges.push_back(problem.edges[e]);
        s[e] = cfg.policy == NoCyclePolicy::kSetCorruptionOne ? 1.0 : prev[e];
      } else if (use_quadratic_mean) {
        s[e] = std::sqrt(std::clamp(num / z, 0.0, 1.0));
      } else {
        s[e] = std::min(num / z, 1.0);
      }
    }
    const double beta = cfg.beta_at(t);
    for (int e = 0; e < problem.edge_count(); ++e) {
      prev[e] = s[e];
      edge_weight[e] = std::exp(-beta * s[e]);
      if (edge_weight[e] < default_numerics().weight_underflow) edge_weight[e] = 0.0;
      const auto& [i, j] = problem.edges[e];
      state.S(i, j) = state.S(j, i) = s[e];
    }
    if (cfg.keep_trace) state.s_trace.push_back(state.S);
    state.t = t;
  }
  state.W = WeightMatrix::Zero(n, n);
  for (int e = 0; e < problem.edge_count(); ++e) {
    const auto& [i, j] = problem.edges[e];
    state.W(i, j) = state.W(j, i) = edge_weight[e];
  }
  return state;
}

LongSyncState longsync_linear_group(const BlockMatrix& g, const WeightMatrix& adjacency,
                                    const LongSyncConfig& cfg) {
  cfg.validate();
  const int n = g.block_count();
  const int d = g.block_dim();
  if (adjacency.rows() != n || adjacency.cols() != n) {
    throw std::invalid_argument("longsync_linear_group: adjacency size mismatch");
  }
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (adjacency(i, j) != 0.0) {
        edges.emplace_back(i, j);
        if (std::abs(g.block(i, j).determinant()) < 1e-12) {
          throw std::domain_error("longsync_linear_group: singular block on an edge");
        }
      }
    }
  }
  if (edges.empty()) throw std::invalid_argument("longsync_linear_group: graph has no edges");

  // The weighted sum of ||G_L||^2 over paths vectorizes through the
  // Kronecker squares H_ij = G_ij (x) G_ij: products along a path satisfy
  // H_L = G_L (x) G_L, and v^T H_L v = ||G_L||_F^2 for v = vec(I).
  BlockMatrix h(n, d * d);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j || adjacency(i, j) == 0.0) continue;
      const auto gij = g.block(i, j);
      auto hij = h.block(i, j);
      for (int a = 0; a < d; ++a)
        for (int c2 = 0; c2 < d; ++c2)
          for (int b = 0; b < d; ++b)
            for (int e2 = 0; e2 < d; ++e2)
              hij(a * d + c2, b * d + e2) = gij(a, b) * gij(c2, e2);
    }
  }
  Eigen::VectorXd vec_id = Eigen::VectorXd::Zero(d * d);
  for (int a = 0; a < d; ++a) vec_id(a * d + a) = 1.0;

  LongSyncState state;
  state.W = adjacency;
  state.S = WeightMatrix::Zero(n, n);
  WeightMatrix prev_s = WeightMatrix::Zero(n, n);

  for (int t = 0; t <= cfg.iterations; ++t) {
    WeightMatrix acc = WeightMatrix::Zero(n, n);
    std::vector<char> supported(edges.size(), 0);
    const double scale = state.W.maxCoeff();
    const WeightMatrix w_norm = scale > 0.0 ? (state.W / scale).eval() : state.W;
    for (size_t ci = 0; ci < cfg.lengths.size(); ++ci) {
      const double lam = cfg.length_weights[ci];
      if (lam == 0.0) continue;
      const int c = cfg.lengths[ci];
      const CycleFormResult on_w = f_g_closed_form(w_norm, g, c);
      const CycleFormResult on_h = f_g_closed_form(w_norm, h, c);
      for (size_t e = 0; e < edges.size(); ++e) {
        const auto& [i, j] = edges[e];
        const double f = on_w.f(i, j);
        if (f <= cfg.starvation_threshold) continue;
        supported[e] = 1;
        const double norms = vec_id.dot(on_h.g.block(i, j) * vec_id);
        const double gobs =
            (on_w.g.block(i, j).array() * g.block(i, j).array()).sum();
        const double own = g.block(i, j).squaredNorm();
        acc(i, j) += lam * ((norms - 2.0 * gobs) / f + own);
      }
    }
    state.starved_edges.clear();
    for (size_t e = 0; e < edges.size(); ++e) {
      const auto& [i, j] = edges[e];
      double s;
      if (!supported[e]) {
        state.starved_edges.emplace_back(i, j);
        s = cfg.policy == NoCyclePolicy::kSetCorruptionOne ? 1.0 : prev_s(i, j);
      } else {
        s = std::sqrt(std::max(0.0, acc(i, j)));
      }
      state.S(i, j) = state.S(j, i) = s;
    }
    if (cfg.keep_trace) state.s_trace.push_back(state.S);
    update_weights(state.W, adjacency, state.S, cfg.beta_at(t),
                   default_numerics().weight_underflow);
    prev_s = state.S;
    state.t = t;
  }
  return state;
}

}  // namespace longsync
