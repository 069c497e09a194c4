#include "longsync/solvers.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>
#include <stdexcept>

#include "longsync/rng.hpp"

namespace longsync {

namespace {

struct UnionFind {
  std::vector<int> parent, rank_;
  explicit UnionFind(int n) : parent(n), rank_(n, 0) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  int find(int x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (rank_[a] < rank_[b]) std::swap(a, b);
    parent[b] = a;
    if (rank_[a] == rank_[b]) ++rank_[a];
    return true;
  }
};

RotationAssignment propagate_forest(const SyncProblem& problem,
                                    const std::vector<int>& tree_edges) {
  const int n = problem.n;
  std::vector<std::vector<std::pair<int, int>>> tree_adj(n);  // (nbr, edge idx)
  for (int e : tree_edges) {
    const auto& [i, j] = problem.edges[e];
    tree_adj[i].emplace_back(j, e);
    tree_adj[j].emplace_back(i, e);
  }

  RotationAssignment out;
  out.rotations.assign(n, Rotation::identity(problem.d));
  out.component.assign(n, -1);
  out.solved.assign(n, false);

  int comp = 0;
  std::vector<int> comp_size;
  for (int root = 0; root < n; ++root) {
    if (out.component[root] >= 0) continue;
    out.component[root] = comp;
    out.rotations[root] = Rotation::identity(problem.d);
    int size = 1;
    std::queue<int> q;
    q.push(root);
    while (!q.empty()) {
      const int j = q.front();
      q.pop();
      for (const auto& [i, e] : tree_adj[j]) {
        if (out.component[i] >= 0) continue;
        out.component[i] = comp;
        // R_i = R_ij R_j
        out.rotations[i] = Rotation::unchecked(
            problem.observation(i, j).matrix() * out.rotations[j].matrix());
        ++size;
        q.push(i);
      }
    }
    comp_size.push_back(size);
    ++comp;
  }
  const int largest = static_cast<int>(
      std::max_element(comp_size.begin(), comp_size.end()) - comp_size.begin());
  out.largest_component = largest;
  for (int i = 0; i < n; ++i) out.solved[i] = (out.component[i] == largest);
  return out;
}

}  // namespace

RotationAssignment mst_init(const SyncProblem& problem, const WeightMatrix& edge_weights) {
  if (problem.n < 1) throw std::invalid_argument("mst_init: empty problem");
  std::vector<int> order(problem.edges.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    const auto& ea = problem.edges[a];
    const auto& eb = problem.edges[b];
    const double wa = edge_weights(ea.first, ea.second);
    const double wb = edge_weights(eb.first, eb.second);
    if (wa != wb) return wa > wb;
    return ea < eb;  // lexicographic tie break
  });
  UnionFind uf(problem.n);
  std::vector<int> tree;
  for (int e : order) {
    const auto& [i, j] = problem.edges[e];
    if (uf.unite(i, j)) tree.push_back(e);
  }
  return propagate_forest(problem, tree);
}

RotationAssignment random_tree_init(const SyncProblem& problem, std::uint64_t seed) {
  auto rng = make_rng(seed);
  std::vector<int> order(problem.edges.size());
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  UnionFind uf(problem.n);
  std::vector<int> tree;
  for (int e : order) {
    const auto& [i, j] = problem.edges[e];
    if (uf.unite(i, j)) tree.push_back(e);
  }
  return propagate_forest(problem, tree);
}

Rotation weighted_quat_mean(const std::vector<Rotation>& rotations,
                            const std::vector<double>& weights) {
  if (rotations.empty() || rotations.size() != weights.size()) {
    throw std::invalid_argument("weighted_quat_mean: input size mismatch");
  }
  double wmax = 0.0;
  size_t ref = 0;
  for (size_t k = 0; k < weights.size(); ++k) {
    if (weights[k] < 0.0) throw std::invalid_argument("weighted_quat_mean: negative weight");
    if (weights[k] > wmax) {
      wmax = weights[k];
      ref = k;
    }
  }
  if (wmax == 0.0) throw std::invalid_argument("weighted_quat_mean: all weights zero");

  const UnitQuaternion qref = UnitQuaternion::from_rotation(rotations[ref]);
  Eigen::Vector4d vref(qref.w, qref.x, qref.y, qref.z);
  Eigen::Matrix4d m = Eigen::Matrix4d::Zero();
  for (size_t k = 0; k < rotations.size(); ++k) {
    if (weights[k] == 0.0) continue;
    const UnitQuaternion q = UnitQuaternion::from_rotation(rotations[k]);
    Eigen::Vector4d v(q.w, q.x, q.y, q.z);
    if (v.dot(vref) < 0) v = -v;
    m += weights[k] * v * v.transpose();
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(m);
  const Eigen::Vector4d top = es.eigenvectors().col(3);  // largest eigenvalue
  UnitQuaternion q{top(0), top(1), top(2), top(3)};
  return q.canonical().to_rotation();
}

Rotation weiszfeld_l1_mean(const std::vector<Rotation>& rotations, const Rotation& init,
                           const WeiszfeldConfig& cfg) {
  if (rotations.empty()) throw std::invalid_argument("weiszfeld_l1_mean: empty input");
  Eigen::Matrix3d x = init.matrix();
  for (int it = 0; it < cfg.max_iters; ++it) {
    Eigen::Vector3d delta = Eigen::Vector3d::Zero();
    double wsum = 0.0;
    for (const Rotation& r : rotations) {
      const Eigen::Vector3d v = so3_log(x.transpose() * r.matrix());
      const double dist = std::max(v.norm(), cfg.distance_floor);
      delta += v / dist;
      wsum += 1.0 / dist;
    }
    delta /= wsum;
    x = x * so3_exp(delta);
    if (delta.norm() < cfg.tol) break;
  }
  return project_to_rotation(x);
}

RotationAssignment irls_gm(const SyncProblem& problem, const RotationAssignment& init,
                           const WeightMatrix* prior_edge_weights, const IrlsConfig& cfg) {
  const int n = problem.n;
  if (static_cast<int>(init.rotations.size()) != n) {
    throw std::invalid_argument("irls_gm: init does not cover the graph");
  }
  const int m = problem.edge_count();

  std::vector<Eigen::Matrix3d> obs(m);
  std::vector<double> prior(m, 1.0);
  for (int e = 0; e < m; ++e) {
    obs[e] = problem.observations[e].matrix();
    if (prior_edge_weights) {
      const auto& [i, j] = problem.edges[e];
      prior[e] = (*prior_edge_weights)(i, j);
    }
  }
  std::vector<std::vector<std::pair<int, int>>> nbr(n);  // (neighbor, edge)
  for (int e = 0; e < m; ++e) {
    const auto& [i, j] = problem.edges[e];
    nbr[i].emplace_back(j, e);
    nbr[j].emplace_back(i, e);
  }

  std::vector<Eigen::Matrix3d> rot(n);
  for (int i = 0; i < n; ++i) rot[i] = init.rotations[i].matrix();

  std::vector<double> theta(m, 0.0);
  auto residuals = [&]() {
    for (int e = 0; e < m; ++e) {
      const auto& [i, j] = problem.edges[e];
      if (!init.solved[i] || !init.solved[j]) {
        theta[e] = 0.0;
        continue;
      }
      const Eigen::Matrix3d rel = rot[i] * rot[j].transpose();
      const double c = std::clamp(((obs[e].transpose() * rel).trace() - 1.0) / 2.0, -1.0, 1.0);
      theta[e] = std::acos(c);
    }
  };
  residuals();

  std::vector<double> active;
  for (int e = 0; e < m; ++e) {
    const auto& [i, j] = problem.edges[e];
    if (init.solved[i] && init.solved[j]) active.push_back(theta[e]);
  }
  double sigma = cfg.sigma_floor_rad;
  if (!active.empty()) {
    std::nth_element(active.begin(), active.begin() + active.size() / 2, active.end());
    sigma = std::max(active[active.size() / 2], cfg.sigma_floor_rad);
  }

  std::vector<Eigen::Matrix3d> next(n);
  for (int it = 0; it < cfg.max_iters; ++it) {
    const double s2 = sigma * sigma;
    double update_sum = 0.0;
    int update_count = 0;
    for (int i = 0; i < n; ++i) next[i] = rot[i];
    for (int i = 0; i < n; ++i) {
      if (!init.solved[i]) continue;
      Eigen::Vector3d delta = Eigen::Vector3d::Zero();
      double wsum = 0.0;
      for (const auto& [j, e] : nbr[i]) {
        if (!init.solved[j]) continue;
        const double t2 = theta[e] * theta[e];
        const double gm = s2 / (s2 + t2);
        const double u = gm * gm * prior[e];
        if (u == 0.0) continue;
        // target for node i from neighbor j
        Eigen::Matrix3d target;
        if (problem.edges[e].first == i) {
          target.noalias() = obs[e] * rot[j];
        } else {
          target.noalias() = obs[e].transpose() * rot[j];
        }
        delta += u * so3_log(rot[i].transpose() * target);
        wsum += u;
      }
      if (wsum <= 0.0) continue;
      delta /= wsum;
      next[i] = rot[i] * so3_exp(delta);
      update_sum += delta.norm();
      ++update_count;
    }
    rot.swap(next);
    residuals();
    sigma = std::max(sigma * cfg.sigma_decay, cfg.sigma_floor_rad);
    if (update_count == 0 || update_sum / update_count < cfg.tol) break;
  }

  RotationAssignment out = init;
  for (int i = 0; i < n; ++i) {
    out.rotations[i] = init.solved[i] ? project_to_rotation(rot[i])
                                      : init.rotations[i];
  }
  return out;
}

int default_cluster_count(int n, int edge_count) {
  if (n < 2) return 1;
  const double p = 2.0 * edge_count / (static_cast<double>(n) * (n - 1));
  return std::max(2, static_cast<int>(std::lround(0.6 * std::sqrt(n * p))));
}

namespace {

double kmeans_once(const Eigen::MatrixXd& rows, int k, std::uint64_t seed,
                   std::vector<int>& labels) {
  const int n = static_cast<int>(rows.rows());
  auto rng = make_rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  // k-means++ seeding
  Eigen::MatrixXd centers(k, rows.cols());
  std::vector<double> dist2(n, std::numeric_limits<double>::max());
  int first = static_cast<int>(unif(rng) * n) % n;
  centers.row(0) = rows.row(first);
  for (int c = 1; c < k; ++c) {
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
      const double d2 = (rows.row(i) - centers.row(c - 1)).squaredNorm();
      dist2[i] = std::min(dist2[i], d2);
      total += dist2[i];
    }
    int pick = n - 1;
    if (total > 0) {
      double target = unif(rng) * total, run = 0.0;
      for (int i = 0; i < n; ++i) {
        run += dist2[i];
        if (run >= target) {
          pick = i;
          break;
        }
      }
    }
    centers.row(c) = rows.row(pick);
  }

  labels.assign(n, 0);
  double inertia = 0.0;
  for (int iter = 0; iter < 100; ++iter) {
    bool changed = false;
    inertia = 0.0;
    for (int i = 0; i < n; ++i) {
      int best = 0;
      double bd = (rows.row(i) - centers.row(0)).squaredNorm();
      for (int c = 1; c < k; ++c) {
        const double d2 = (rows.row(i) - centers.row(c)).squaredNorm();
        if (d2 < bd) {
          bd = d2;
          best = c;
        }
      }
      if (labels[i] != best) {
        labels[i] = best;
        changed = true;
      }
      inertia += bd;
    }
    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, rows.cols());
    std::vector<int> counts(k, 0);
    for (int i = 0; i < n; ++i) {
      sums.row(labels[i]) += rows.row(i);
      ++counts[labels[i]];
    }
    for (int c = 0; c < k; ++c) {
      if (counts[c] > 0) centers.row(c) = sums.row(c) / counts[c];
    }
    if (!changed) break;
  }
  return inertia;
}

}  // namespace

std::vector<int> spectral_cluster(const WeightMatrix& similarity, int k, std::uint64_t seed) {
  const int n = static_cast<int>(similarity.rows());
  if (k < 1 || k > n) throw std::invalid_argument("spectral_cluster: need 1 <= k <= n");
  if (k == 1) return std::vector<int>(n, 0);

  Eigen::VectorXd deg = similarity.rowwise().sum();
  Eigen::VectorXd dinv(n);
  for (int i = 0; i < n; ++i) dinv(i) = deg(i) > 0 ? 1.0 / std::sqrt(deg(i)) : 0.0;
  WeightMatrix lap = WeightMatrix::Identity(n, n) -
                     (dinv.asDiagonal() * similarity * dinv.asDiagonal());
  lap = 0.5 * (lap + lap.transpose());

  Eigen::SelfAdjointEigenSolver<WeightMatrix> es(lap);
  Eigen::MatrixXd rows = es.eigenvectors().leftCols(k);
  for (int i = 0; i < n; ++i) {
    const double nv = rows.row(i).norm();
    if (nv > 0) rows.row(i) /= nv;
  }

  std::vector<int> best_labels, labels;
  double best_inertia = std::numeric_limits<double>::max();
  for (int restart = 0; restart < 20; ++restart) {
    const double inertia = kmeans_once(rows, k, derive_seed(seed, restart), labels);
    if (inertia < best_inertia) {
      best_inertia = inertia;
      best_labels = labels;
    }
  }
  // canonical labels by first appearance
  std::vector<int> remap(k, -1);
  int next = 0;
  for (int& l : best_labels) {
    if (remap[l] < 0) remap[l] = next++;
    l = remap[l];
  }
  return best_labels;
}

}  // namespace longsync
