#include "longsync/sync_problem.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "longsync/rng.hpp"

namespace longsync {

void SyncProblem::rebuild_index() {
  index_keys_.clear();
  index_vals_.clear();
  index_keys_.reserve(edges.size());
  index_vals_.reserve(edges.size());
  for (int k = 0; k < edge_count(); ++k) {
    index_keys_.push_back(static_cast<std::int64_t>(edges[k].first) * n + edges[k].second);
    index_vals_.push_back(k);
  }
}

int SyncProblem::edge_index(int i, int j) const {
  if (i == j || i < 0 || j < 0 || i >= n || j >= n) return -1;
  if (i > j) std::swap(i, j);
  if (index_keys_.size() != edges.size()) {
    const_cast<SyncProblem*>(this)->rebuild_index();
  }
  const std::int64_t key = static_cast<std::int64_t>(i) * n + j;
  auto it = std::lower_bound(index_keys_.begin(), index_keys_.end(), key);
  if (it == index_keys_.end() || *it != key) return -1;
  return index_vals_[static_cast<size_t>(it - index_keys_.begin())];
}

Rotation SyncProblem::observation(int i, int j) const {
  const int k = edge_index(i, j);
  if (k < 0) throw std::out_of_range("SyncProblem::observation: edge not present");
  if (i < j) return observations[k];
  return observations[k].inverse();
}

WeightMatrix SyncProblem::adjacency() const {
  WeightMatrix a = WeightMatrix::Zero(n, n);
  for (const auto& [i, j] : edges) a(i, j) = a(j, i) = 1.0;
  return a;
}

BlockMatrix SyncProblem::observation_matrix() const {
  BlockMatrix r(n, d);
  for (int k = 0; k < edge_count(); ++k) {
    const auto& [i, j] = edges[k];
    r.block(i, j) = observations[k].matrix();
    r.block(j, i) = observations[k].matrix().transpose();
  }
  return r;
}

std::vector<std::vector<int>> SyncProblem::neighbor_lists() const {
  std::vector<std::vector<int>> nbr(n);
  for (const auto& [i, j] : edges) {
    nbr[i].push_back(j);
    nbr[j].push_back(i);
  }
  for (auto& v : nbr) std::sort(v.begin(), v.end());
  return nbr;
}

void SyncProblem::validate(const NumericsConfig& cfg) const {
  if (n < 2) throw std::invalid_argument("SyncProblem: need n >= 2");
  if (observations.size() != edges.size()) {
    throw std::invalid_argument("SyncProblem: observation count mismatch");
  }
  for (int k = 0; k < edge_count(); ++k) {
    const auto& [i, j] = edges[k];
    if (i < 0 || j >= n || i >= j) throw std::invalid_argument("SyncProblem: bad edge");
    if (k > 0 && !(edges[k - 1] < edges[k])) {
      throw std::invalid_argument("SyncProblem: edges must be sorted and unique");
    }
    Rotation::from_matrix(observations[k].matrix(), cfg);
  }
  if (ground_truth) {
    if (static_cast<int>(ground_truth->size()) != n) {
      throw std::invalid_argument("SyncProblem: ground truth size mismatch");
    }
    if (true_corruption) {
      for (int k = 0; k < edge_count(); ++k) {
        const auto& [i, j] = edges[k];
        const Rotation clean = Rotation::unchecked(
            (*ground_truth)[i].matrix() * (*ground_truth)[j].matrix().transpose());
        const double s = chordal_distance(observations[k], clean);
        if (std::abs(s - (*true_corruption)[k]) > 1e-12) {
          throw std::invalid_argument("SyncProblem: stored corruption level mismatch");
        }
      }
    }
  }
}

namespace {

SyncProblem finish_instance(int n, int d, std::uint64_t seed,
                            std::vector<std::pair<int, int>> edges,
                            std::vector<Rotation> observations,
                            std::vector<Rotation> truth) {
  SyncProblem p;
  p.n = n;
  p.d = d;
  p.seed = seed;
  p.edges = std::move(edges);
  p.observations = std::move(observations);
  p.true_corruption.emplace();
  p.true_corruption->reserve(p.edges.size());
  for (int k = 0; k < p.edge_count(); ++k) {
    const auto& [i, j] = p.edges[k];
    const Rotation clean =
        Rotation::unchecked(truth[i].matrix() * truth[j].matrix().transpose());
    p.true_corruption->push_back(chordal_distance(p.observations[k], clean));
  }
  p.ground_truth = std::move(truth);
  p.rebuild_index();
  return p;
}

}  // namespace

SyncProblem gen_ucm(int n, double p, double q_g, std::uint64_t seed) {
  if (n < 2) throw std::invalid_argument("gen_ucm: need n >= 2");
  if (p <= 0.0 || p > 1.0 || q_g < 0.0 || q_g > 1.0) {
    throw std::invalid_argument("gen_ucm: need 0 < p <= 1 and 0 <= q_g <= 1");
  }
  auto rng = make_rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<Rotation> truth;
  truth.reserve(n);
  for (int i = 0; i < n; ++i) truth.push_back(haar_sample(rng));

  std::vector<std::pair<int, int>> edges;
  std::vector<Rotation> obs;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (p < 1.0 && unif(rng) >= p) continue;
      edges.emplace_back(i, j);
      if (unif(rng) < q_g) {
        obs.push_back(Rotation::unchecked(truth[i].matrix() * truth[j].matrix().transpose()));
      } else {
        obs.push_back(haar_sample(rng));
      }
    }
  }
  return finish_instance(n, 3, seed, std::move(edges), std::move(obs), std::move(truth));
}

SyncProblem gen_ubcm(int n, double p, double q_g, std::uint64_t seed) {
  SyncProblem base = gen_ucm(n, p, q_g, seed);
  // uniform random bisection, drawn from a continuation of the same seed
  auto rng = make_rng(derive_seed(seed, 0x62697061));
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<char> side(n, 0);
  for (int idx = 0; idx < n / 2; ++idx) side[perm[idx]] = 1;

  SyncProblem out;
  out.n = n;
  out.d = base.d;
  out.seed = seed;
  out.ground_truth = base.ground_truth;
  out.true_corruption.emplace();
  for (int k = 0; k < base.edge_count(); ++k) {
    const auto& [i, j] = base.edges[k];
    if (side[i] == side[j]) continue;
    out.edges.emplace_back(i, j);
    out.observations.push_back(base.observations[k]);
    out.true_corruption->push_back((*base.true_corruption)[k]);
  }
  out.rebuild_index();
  return out;
}

SyncProblem gen_adversarial(int n, const std::vector<std::pair<int, int>>& edge_set,
                            const std::vector<std::pair<int, int>>& bad_edges,
                            const CorruptionSampler& sampler, std::uint64_t seed) {
  if (n < 2) throw std::invalid_argument("gen_adversarial: need n >= 2");
  auto rng = make_rng(seed);
  std::vector<Rotation> truth;
  truth.reserve(n);
  for (int i = 0; i < n; ++i) truth.push_back(haar_sample(rng));

  std::vector<std::pair<int, int>> edges;
  edges.reserve(edge_set.size());
  for (auto [i, j] : edge_set) {
    if (i == j || i < 0 || j >= n || j < 0 || i >= n) {
      throw std::invalid_argument("gen_adversarial: bad edge id");
    }
    if (i > j) std::swap(i, j);
    edges.emplace_back(i, j);
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

  std::vector<char> bad(edges.size(), 0);
  for (auto [i, j] : bad_edges) {
    if (i > j) std::swap(i, j);
    auto it = std::lower_bound(edges.begin(), edges.end(), std::make_pair(i, j));
    if (it == edges.end() || *it != std::make_pair(i, j)) {
      throw std::invalid_argument("gen_adversarial: bad edge not in edge set");
    }
    bad[static_cast<size_t>(it - edges.begin())] = 1;
  }

  std::vector<Rotation> obs;
  obs.reserve(edges.size());
  for (size_t k = 0; k < edges.size(); ++k) {
    const auto& [i, j] = edges[k];
    const Rotation clean =
        Rotation::unchecked(truth[i].matrix() * truth[j].matrix().transpose());
    if (bad[k]) {
      const Rotation corrupted = sampler(rng, clean);
      if (chordal_distance(corrupted, clean) <= 0.0) {
        throw std::invalid_argument("gen_adversarial: sampler returned the clean rotation");
      }
      obs.push_back(corrupted);
    } else {
      obs.push_back(clean);
    }
  }
  return finish_instance(n, 3, seed, std::move(edges), std::move(obs), std::move(truth));
}

CorruptionStats compute_lambda(const SyncProblem& problem, int c, int limit_override) {
  if (!problem.true_corruption) {
    throw std::invalid_argument("compute_lambda: needs true corruption levels");
  }
  const int limit = limit_override > 0 ? limit_override : (c == 3 ? 40 : 14);
  if (problem.n > limit) {
    throw std::invalid_argument("compute_lambda: enumeration limit exceeded");
  }
  const int n = problem.n;
  std::vector<char> bad_edge(problem.edges.size(), 0);
  for (int k = 0; k < problem.edge_count(); ++k) {
    // clean-edge chordal values carry sqrt-of-rounding noise ~1e-8
    bad_edge[k] = (*problem.true_corruption)[k] > 1e-6;
  }
  const auto nbr = problem.neighbor_lists();

  CorruptionStats stats;
  stats.per_edge_total.assign(problem.edges.size(), 0);
  stats.per_edge_bad.assign(problem.edges.size(), 0);

  std::vector<char> visited(n, 0);
  for (int e = 0; e < problem.edge_count(); ++e) {
    const auto& [i, j] = problem.edges[e];
    visited.assign(n, 0);
    visited[i] = visited[j] = 1;
    long long total = 0, badc = 0;
    auto dfs = [&](auto&& self, int cur, int depth, bool has_bad) -> void {
      if (depth == c - 2) {
        const int k = problem.edge_index(cur, j);
        if (k < 0) return;
        ++total;
        if (has_bad || bad_edge[k]) ++badc;
        return;
      }
      for (int nxt : nbr[cur]) {
        if (visited[nxt]) continue;
        const int k = problem.edge_index(cur, nxt);
        visited[nxt] = 1;
        self(self, nxt, depth + 1, has_bad || bad_edge[k]);
        visited[nxt] = 0;
      }
    };
    dfs(dfs, i, 0, false);
    stats.per_edge_total[e] = total;
    stats.per_edge_bad[e] = badc;
    if (total == 0) {
      ++stats.edges_without_cycles;
    } else {
      stats.lambda = std::max(stats.lambda, static_cast<double>(badc) / total);
    }
  }
  return stats;
}

WeightMatrix jaccard_matrix(const SyncProblem& problem) {
  const auto nbr = problem.neighbor_lists();
  WeightMatrix out = WeightMatrix::Zero(problem.n, problem.n);
  for (const auto& [i, j] : problem.edges) {
    std::vector<int> inter;
    std::set_intersection(nbr[i].begin(), nbr[i].end(), nbr[j].begin(), nbr[j].end(),
                          std::back_inserter(inter));
    const size_t uni = nbr[i].size() + nbr[j].size() - inter.size();
    const double val = uni == 0 ? 0.0 : static_cast<double>(inter.size()) / uni;
    out(i, j) = out(j, i) = val;
  }
  return out;
}

}  // namespace longsync
