#include "longsync/cycle_forms.hpp"

#include <cmath>
#include <stdexcept>

#include "longsync/rng.hpp"
#include "longsync/rotation.hpp"

namespace longsync {

namespace {

void check_inputs(const WeightMatrix& w, const BlockMatrix& r) {
  const int n = r.block_count();
  if (w.rows() != n || w.cols() != n) {
    throw std::invalid_argument("cycle forms: weight/block size mismatch");
  }
  for (int i = 0; i < n; ++i) {
    if (w(i, i) != 0.0) throw std::invalid_argument("cycle forms: weight diagonal must be zero");
    for (int j = i + 1; j < n; ++j) {
      if (w(i, j) < 0.0 || std::abs(w(i, j) - w(j, i)) > 1e-12) {
        throw std::invalid_argument("cycle forms: weights must be symmetric and nonnegative");
      }
    }
  }
}

BlockMatrix mul(const BlockMatrix& a, const BlockMatrix& b) { return block_multiply(a, b); }

// diag(src) * x and x * diag(src), using only the diagonal blocks of src.
BlockMatrix bd_left(const BlockMatrix& src, const BlockMatrix& x) {
  const int n = x.block_count(), d = x.block_dim();
  BlockMatrix out(n, d);
  for (int i = 0; i < n; ++i) {
    const auto di = src.block(i, i);
    for (int j = 0; j < n; ++j) out.block(i, j).noalias() = di * x.block(i, j);
  }
  return out;
}

BlockMatrix bd_right(const BlockMatrix& x, const BlockMatrix& src) {
  const int n = x.block_count(), d = x.block_dim();
  BlockMatrix out(n, d);
  for (int j = 0; j < n; ++j) {
    const auto dj = src.block(j, j);
    for (int i = 0; i < n; ++i) out.block(i, j).noalias() = x.block(i, j) * dj;
  }
  return out;
}

// out(i,j) = x(i,j) * y(j,i) * z(i,j)
BlockMatrix tri3(const BlockMatrix& x, const BlockMatrix& y, const BlockMatrix& z) {
  const int n = x.block_count(), d = x.block_dim();
  BlockMatrix out(n, d);
  Eigen::MatrixXd t(d, d);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      t.noalias() = x.block(i, j) * y.block(j, i);
      out.block(i, j).noalias() = t * z.block(i, j);
    }
  }
  return out;
}

BlockMatrix sand(const BlockMatrix& x, const BlockMatrix& y) { return tri3(x, y, x); }

// out(i,j) = sum_x [p(i,x) p(x,j)] p(j,i) [p(i,x) p(x,j)], pruned by the
// weight support.
BlockMatrix psand(const BlockMatrix& p, const WeightMatrix& w) {
  const int n = p.block_count(), d = p.block_dim();
  BlockMatrix out(n, d);
  Eigen::MatrixXd u(d, d), t(d, d), acc(d, d);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (w(j, i) == 0.0) continue;
      const auto mid = p.block(j, i);
      acc.setZero();
      bool any = false;
      for (int x = 0; x < n; ++x) {
        if (w(i, x) == 0.0 || w(x, j) == 0.0) continue;
        u.noalias() = p.block(i, x) * p.block(x, j);
        t.noalias() = u * mid;
        acc.noalias() += t * u;
        any = true;
      }
      if (any) out.block(i, j) = acc;
    }
  }
  return out;
}

BlockMatrix lift_scaled(const WeightMatrix& m, const BlockMatrix& r, double scale) {
  const int n = r.block_count(), d = r.block_dim();
  BlockMatrix out(n, d);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (m(i, j) != 0.0) out.block(i, j) = (scale * m(i, j)) * r.block(i, j);
  return out;
}

void add_scaled(BlockMatrix& acc, const BlockMatrix& x, double s) {
  acc.dense() += s * x.dense();
}

// hadamard with a scalar mask: blocks m(i,j) * x(i,j)
BlockMatrix mask_blocks(const WeightMatrix& m, const BlockMatrix& x) {
  return lift_hadamard(m, x);
}

CycleFormResult forms_c3(const WeightMatrix& w, const BlockMatrix& p) {
  return {w * w, mul(p, p)};
}

CycleFormResult forms_c4(const WeightMatrix& w, const BlockMatrix& r, const BlockMatrix& p) {
  const WeightMatrix w2 = w * w;
  const Eigen::VectorXd d2 = w2.diagonal();
  const WeightMatrix wo3 = w.array().cube().matrix();

  WeightMatrix f = w2 * w;
  f -= d2.asDiagonal() * w;
  f -= w * d2.asDiagonal();
  f += wo3;

  const BlockMatrix p2 = mul(p, p);
  BlockMatrix g = mul(p2, p);
  add_scaled(g, bd_left(p2, p), -1.0);
  add_scaled(g, bd_right(p, p2), -1.0);
  add_scaled(g, lift_scaled(wo3, r, 1.0), 1.0);
  return {std::move(f), std::move(g)};
}

CycleFormResult forms_c5(const WeightMatrix& w, const BlockMatrix& r, const BlockMatrix& p) {
  const WeightMatrix w2 = w * w;
  const WeightMatrix w3 = w2 * w;
  const Eigen::VectorXd d2 = w2.diagonal();
  const Eigen::VectorXd d3 = w3.diagonal();
  const WeightMatrix wo2 = w.cwiseProduct(w);
  const WeightMatrix wo3 = wo2.cwiseProduct(w);

  WeightMatrix f = w2 * w2;
  f -= w * d3.asDiagonal();
  f -= d3.asDiagonal() * w;
  f -= d2.asDiagonal() * w2;
  f -= w2 * d2.asDiagonal();
  f -= w * (d2.asDiagonal() * w);
  f += wo3 * w;
  f += w * wo3;
  f += 3.0 * wo2.cwiseProduct(w2);

  const BlockMatrix p2 = mul(p, p);
  const BlockMatrix p3 = mul(p2, p);
  const BlockMatrix pw3 = lift_scaled(wo3, r, 1.0);

  BlockMatrix g = mul(p2, p2);
  add_scaled(g, bd_right(p, p3), -1.0);
  add_scaled(g, bd_left(p3, p), -1.0);
  add_scaled(g, bd_left(p2, p2), -1.0);
  add_scaled(g, bd_right(p2, p2), -1.0);
  add_scaled(g, mul(bd_right(p, p2), p), -1.0);
  add_scaled(g, mul(pw3, p), 1.0);
  add_scaled(g, mul(p, pw3), 1.0);
  add_scaled(g, mask_blocks(wo2, p2), 2.0);
  add_scaled(g, sand(p, p2), 1.0);
  return {std::move(f), std::move(g)};
}

CycleFormResult forms_c6(const WeightMatrix& w, const BlockMatrix& r, const BlockMatrix& p) {
  const WeightMatrix w2 = w * w;
  const WeightMatrix w3 = w2 * w;
  const WeightMatrix w4 = w2 * w2;
  const Eigen::VectorXd d2 = w2.diagonal();
  const Eigen::VectorXd d3 = w3.diagonal();
  const Eigen::VectorXd d4 = w4.diagonal();
  const WeightMatrix wo2 = w.cwiseProduct(w);
  const WeightMatrix wo3 = wo2.cwiseProduct(w);
  const WeightMatrix wo5 = wo3.cwiseProduct(wo2);
  const WeightMatrix wo2sq = wo2 * wo2;
  const Eigen::VectorXd dq = wo2sq.diagonal();
  const Eigen::VectorXd d2sq = d2.cwiseProduct(d2);
  const Eigen::VectorXd dwdw = (w * (d2.asDiagonal() * w)).diagonal();

  WeightMatrix f = w4 * w;
  f -= w * d4.asDiagonal();
  f -= d4.asDiagonal() * w;
  f -= w2 * d3.asDiagonal();
  f -= d3.asDiagonal() * w2;
  f -= w * (d3.asDiagonal() * w);
  f -= w3 * d2.asDiagonal();
  f -= d2.asDiagonal() * w3;
  f -= w * (d2.asDiagonal() * w2);
  f -= w2 * (d2.asDiagonal() * w);
  f += wo3 * w2;
  f += w2 * wo3;
  f += w * (wo3 * w);
  const WeightMatrix cross2 = wo2.cwiseProduct(w2);
  f += 3.0 * (cross2 * w);
  f += 3.0 * (w * cross2);
  f += 3.0 * wo2.cwiseProduct(w3);
  f += 3.0 * w.cwiseProduct(w2).cwiseProduct(w2);
  f -= 4.0 * w.cwiseProduct(wo2sq);
  f -= 4.0 * (wo3 * d2.asDiagonal());
  f -= 4.0 * (d2.asDiagonal() * wo3);
  f += 2.0 * (d2sq.asDiagonal() * w);
  f += 2.0 * (w * d2sq.asDiagonal());
  f += d2.asDiagonal() * (w * d2.asDiagonal());
  f += dwdw.asDiagonal() * w;
  f += w * dwdw.asDiagonal();
  f -= 2.0 * (dq.asDiagonal() * w);
  f -= 2.0 * (w * dq.asDiagonal());
  f += 4.0 * wo5;

  const BlockMatrix p2 = mul(p, p);
  const BlockMatrix p3 = mul(p2, p);
  const BlockMatrix p4 = mul(p2, p2);
  const BlockMatrix pw3 = lift_scaled(wo3, r, 1.0);
  const BlockMatrix lh2 = mask_blocks(wo2, p2);
  const BlockMatrix sd2 = sand(p, p2);

  BlockMatrix g = mul(p4, p);
  add_scaled(g, bd_right(p, p4), -1.0);
  add_scaled(g, bd_left(p4, p), -1.0);
  add_scaled(g, bd_right(p2, p3), -1.0);
  add_scaled(g, bd_left(p3, p2), -1.0);
  add_scaled(g, mul(bd_right(p, p3), p), -1.0);
  add_scaled(g, bd_right(p3, p2), -1.0);
  add_scaled(g, bd_left(p2, p3), -1.0);
  add_scaled(g, mul(bd_right(p, p2), p2), -1.0);
  add_scaled(g, mul(p2, bd_left(p2, p)), -1.0);
  add_scaled(g, mul(pw3, p2), 1.0);
  add_scaled(g, mul(p2, pw3), 1.0);
  add_scaled(g, mul(p, mul(pw3, p)), 1.0);
  add_scaled(g, mul(lh2, p), 2.0);
  add_scaled(g, mul(p, lh2), 2.0);
  add_scaled(g, mul(sd2, p), 1.0);
  add_scaled(g, mul(p, sd2), 1.0);
  add_scaled(g, mask_blocks(wo2, p3), 2.0);
  add_scaled(g, sand(p, p3), 1.0);
  add_scaled(g, tri3(p, p2, p2), 1.0);
  add_scaled(g, sand(p2, p), 1.0);
  add_scaled(g, tri3(p2, p2, p), 1.0);
  add_scaled(g, psand(p, w), -1.0);

  // all scalar-lifted corrections collapse into one lift
  WeightMatrix lifted = -3.0 * w.cwiseProduct(wo2sq);
  lifted -= 4.0 * (wo3 * d2.asDiagonal());
  lifted -= 4.0 * (d2.asDiagonal() * wo3);
  lifted -= 2.0 * (dq.asDiagonal() * w);
  lifted -= 2.0 * (w * dq.asDiagonal());
  lifted += 2.0 * (d2sq.asDiagonal() * w);
  lifted += 2.0 * (w * d2sq.asDiagonal());
  lifted += d2.asDiagonal() * (w * d2.asDiagonal());
  lifted += dwdw.asDiagonal() * w;
  lifted += w * dwdw.asDiagonal();
  lifted += 4.0 * wo5;
  add_scaled(g, lift_scaled(lifted, r, 1.0), 1.0);

  return {std::move(f), std::move(g)};
}

}  // namespace

CycleFormResult f_g_closed_form(const WeightMatrix& w, const BlockMatrix& r, int c) {
  check_inputs(w, r);
  const BlockMatrix p = lift_hadamard(w, r);
  CycleFormResult out;
  switch (c) {
    case 3: out = forms_c3(w, p); break;
    case 4: out = forms_c4(w, r, p); break;
    case 5: out = forms_c5(w, r, p); break;
    case 6: out = forms_c6(w, r, p); break;
    default:
      throw std::invalid_argument(
          "f_g_closed_form: supported cycle lengths are 3..6 (longer cycles "
          "have no tractable closed form here)");
  }
  // paths are defined for i != j only
  const int n = r.block_count();
  for (int i = 0; i < n; ++i) {
    out.f(i, i) = 0.0;
    out.g.block(i, i).setZero();
  }
  return out;
}

CycleFormResult f_g_bruteforce(const WeightMatrix& w, const BlockMatrix& r, int c,
                               int enumeration_limit) {
  check_inputs(w, r);
  const int n = r.block_count(), d = r.block_dim();
  if (n > enumeration_limit) {
    throw std::invalid_argument("f_g_bruteforce: enumeration limit exceeded");
  }
  if (c < 3 || c > n) {
    throw std::invalid_argument("f_g_bruteforce: need 3 <= c <= n");
  }
  CycleFormResult out{WeightMatrix::Zero(n, n), BlockMatrix(n, d)};

  std::vector<char> visited(n, 0);
  // stack of partial block products; prod[m] = product of the first m steps
  std::vector<Eigen::MatrixXd> prod(static_cast<size_t>(c), Eigen::MatrixXd(d, d));
  std::vector<double> weight(static_cast<size_t>(c), 0.0);

  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      visited.assign(n, 0);
      visited[i] = visited[j] = 1;
      double f_acc = 0.0;
      Eigen::MatrixXd g_acc = Eigen::MatrixXd::Zero(d, d);
      prod[0] = Eigen::MatrixXd::Identity(d, d);
      weight[0] = 1.0;

      // depth m = number of intermediates chosen; cur = last node on the path
      auto dfs = [&](auto&& self, int cur, int m) -> void {
        if (m == c - 2) {
          const double wc = w(cur, j);
          if (wc == 0.0) return;
          const double total = weight[m] * wc;
          f_acc += total;
          g_acc.noalias() += (weight[m] * prod[m]) * (wc * r.block(cur, j));
          return;
        }
        for (int k = 0; k < n; ++k) {
          if (visited[k]) continue;
          const double we = w(cur, k);
          if (we == 0.0) continue;
          visited[k] = 1;
          weight[m + 1] = weight[m] * we;
          prod[m + 1].noalias() = prod[m] * r.block(cur, k);
          self(self, k, m + 1);
          visited[k] = 0;
        }
      };
      dfs(dfs, i, 0);
      out.f(i, j) = f_acc;
      out.g.block(i, j) = g_acc;
    }
  }
  return out;
}

CycleFormStats cycle_form_stats(int c) {
  switch (c) {
    case 3: return {3, 1, 1, 1, 0};
    case 4: return {4, 4, 4, 2, 0};
    case 5: return {5, 9, 10, 6, 0};
    case 6: return {6, 28, 34, 12, 1};
    default: throw std::invalid_argument("cycle_form_stats: c must be 3..6");
  }
}

VerifyFormsReport verify_forms(std::uint64_t seed, int trials, int n_min, int n_max,
                               const std::vector<int>& c_set, double tol) {
  VerifyFormsReport report;
  for (int c : c_set) {
    VerifyFormsEntry entry;
    entry.c = c;
    entry.trials = trials;
    for (int t = 0; t < trials; ++t) {
      auto rng = make_rng(derive_seed(seed, static_cast<std::uint64_t>(c) * 10007 + t));
      std::uniform_int_distribution<int> pick_n(n_min, n_max);
      std::uniform_real_distribution<double> unif(0.0, 1.0);
      const int n = std::max(pick_n(rng), c);
      const int d = 3;
      const double p_edge = 0.5 + 0.5 * unif(rng);
      WeightMatrix w = WeightMatrix::Zero(n, n);
      BlockMatrix r(n, d);
      for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
          if (unif(rng) > p_edge) continue;
          const double we = unif(rng);
          w(i, j) = w(j, i) = we;
          const Rotation rot = haar_sample(rng, d);
          r.block(i, j) = rot.matrix();
          r.block(j, i) = rot.matrix().transpose();
        }
      }
      const CycleFormResult closed = f_g_closed_form(w, r, c);
      const CycleFormResult brute = f_g_bruteforce(w, r, c, n);
      entry.max_f_error =
          std::max(entry.max_f_error, (closed.f - brute.f).cwiseAbs().maxCoeff());
      entry.max_g_error = std::max(
          entry.max_g_error, (closed.g.dense() - brute.g.dense()).cwiseAbs().maxCoeff());
    }
    entry.pass = entry.max_f_error < tol && entry.max_g_error < tol;
    report.all_pass = report.all_pass && entry.pass;
    report.per_c.push_back(entry);
  }
  return report;
}

}  // namespace longsync
