#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "longsync/evaluation.hpp"
#include "longsync/longsync.hpp"
#include "longsync/solvers.hpp"
#include "longsync/sync_problem.hpp"

namespace longsync {

// One full run of the synthetic protocol: edge weighting (or a random tree),
// spanning-tree initialization, robust refinement, gauge alignment, error
// metrics.
struct MethodSpec {
  enum class Kind { kIrls, kCempIrls, kLongSyncIrls };
  Kind kind = Kind::kIrls;
  int c = 3;
  std::string name;  // canonical display name
};

// Accepts "irls", "cemp+irls", "longsync+irls", "longsync4+irls", ...
// Throws std::invalid_argument on unknown names.
MethodSpec parse_method(const std::string& text, int default_c = 3);

struct MethodRun {
  MethodSpec spec;
  RotationAssignment assignment;
  std::optional<ErrorSummary> errors;  // when ground truth is present
  double runtime_s = 0.0;
  int n_solved = 0;
};

MethodRun run_method(const SyncProblem& problem, const MethodSpec& spec,
                     std::uint64_t seed, const IrlsConfig& irls = IrlsConfig{});

}  // namespace longsync
