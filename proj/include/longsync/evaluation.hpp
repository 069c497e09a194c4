#pragma once

#include <vector>

#include "longsync/rotation.hpp"

namespace longsync {

struct ErrorSummary {
  double mean_deg = 0.0;
  double median_deg = 0.0;
  std::vector<double> per_node_deg;
  int n_evaluated = 0;
};

// Global rotation that aligns the estimates with the truth: closed-form l2
// polar initialization, then IRLS on the l1-of-Frobenius objective.
// `mask[i]` selects the nodes that participate; empty mask = all nodes.
Rotation align(const std::vector<Rotation>& estimates, const std::vector<Rotation>& truth,
               const std::vector<bool>& mask = {});

// Per-node geodesic errors in degrees after applying r_align to the
// estimates, with mean and median over the evaluated nodes.
ErrorSummary error_summary(const std::vector<Rotation>& estimates,
                           const std::vector<Rotation>& truth, const Rotation& r_align,
                           const std::vector<bool>& mask = {});

}  // namespace longsync
