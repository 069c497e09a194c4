#include "longsync/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace longsync {

namespace {

std::vector<int> selected_nodes(size_t n_est, size_t n_truth, const std::vector<bool>& mask) {
  const size_t n = std::min(n_est, n_truth);
  std::vector<int> sel;
  for (size_t i = 0; i < n; ++i) {
    if (mask.empty() || (i < mask.size() && mask[i])) sel.push_back(static_cast<int>(i));
  }
  return sel;
}

}  // namespace

Rotation align(const std::vector<Rotation>& estimates, const std::vector<Rotation>& truth,
               const std::vector<bool>& mask) {
  const auto sel = selected_nodes(estimates.size(), truth.size(), mask);
  if (sel.empty()) throw std::invalid_argument("align: no common nodes");
  const int d = estimates[sel[0]].dim();

  auto weighted_polar = [&](const std::vector<double>& w) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(d, d);
    for (size_t k = 0; k < sel.size(); ++k) {
      m += w[k] * (estimates[sel[k]].matrix().transpose() * truth[sel[k]].matrix());
    }
    return project_to_rotation(m);
  };

  std::vector<double> w(sel.size(), 1.0);
  Rotation q = weighted_polar(w);
  for (int it = 0; it < 30; ++it) {
    for (size_t k = 0; k < sel.size(); ++k) {
      const double res =
          (estimates[sel[k]].matrix() * q.matrix() - truth[sel[k]].matrix()).norm();
      w[k] = 1.0 / std::max(res, 1e-9);
    }
    q = weighted_polar(w);
  }
  return q;
}

ErrorSummary error_summary(const std::vector<Rotation>& estimates,
                           const std::vector<Rotation>& truth, const Rotation& r_align,
                           const std::vector<bool>& mask) {
  const auto sel = selected_nodes(estimates.size(), truth.size(), mask);
  ErrorSummary out;
  out.n_evaluated = static_cast<int>(sel.size());
  if (sel.empty()) return out;
  out.per_node_deg.reserve(sel.size());
  double sum = 0.0;
  for (int i : sel) {
    const Rotation aligned =
        Rotation::unchecked(estimates[i].matrix() * r_align.matrix());
    const double deg = geodesic_angle(aligned, truth[i]) * 180.0 / M_PI;
    out.per_node_deg.push_back(deg);
    sum += deg;
  }
  out.mean_deg = sum / out.per_node_deg.size();
  std::vector<double> sorted = out.per_node_deg;
  std::sort(sorted.begin(), sorted.end());
  const size_t h = sorted.size() / 2;
  out.median_deg = sorted.size() % 2 == 1 ? sorted[h] : 0.5 * (sorted[h - 1] + sorted[h]);
  return out;
}

}  // namespace longsync
