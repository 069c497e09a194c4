#include "longsync/experiment.hpp"

#include <chrono>
#include <stdexcept>

namespace longsync {

MethodSpec parse_method(const std::string& text, int default_c) {
  MethodSpec spec;
  std::string base = text;
  // strip an embedded cycle length, e.g. "longsync5+irls"
  std::string digits;
  std::string cleaned;
  for (char ch : base) {
    if (ch >= '0' && ch <= '9') digits += ch;
    else cleaned += ch;
  }
  spec.c = digits.empty() ? default_c : std::stoi(digits);
  if (cleaned == "irls") {
    spec.kind = MethodSpec::Kind::kIrls;
    spec.name = "irls";
  } else if (cleaned == "cemp+irls") {
    spec.kind = MethodSpec::Kind::kCempIrls;
    spec.name = "cemp" + std::to_string(spec.c) + "+irls";
  } else if (cleaned == "longsync+irls") {
    spec.kind = MethodSpec::Kind::kLongSyncIrls;
    spec.name = "longsync" + std::to_string(spec.c) + "+irls";
  } else {
    throw std::invalid_argument("unknown method: " + text);
  }
  return spec;
}

MethodRun run_method(const SyncProblem& problem, const MethodSpec& spec,
                     std::uint64_t seed, const IrlsConfig& irls) {
  MethodRun run;
  run.spec = spec;
  const auto t0 = std::chrono::steady_clock::now();

  RotationAssignment init;
  switch (spec.kind) {
    case MethodSpec::Kind::kIrls:
      init = random_tree_init(problem, seed);
      break;
    case MethodSpec::Kind::kCempIrls: {
      LongSyncConfig cfg = LongSyncConfig::with_length(spec.c);
      const LongSyncState state = cemp_naive(problem, cfg, /*use_quadratic_mean=*/false);
      init = mst_init(problem, state.W);
      break;
    }
    case MethodSpec::Kind::kLongSyncIrls: {
      LongSyncConfig cfg = LongSyncConfig::with_length(spec.c);
      const LongSyncState state = longsync_run(problem, cfg);
      init = mst_init(problem, state.W);
      break;
    }
  }
  run.assignment = irls_gm(problem, init, nullptr, irls);
  run.runtime_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  for (bool s : run.assignment.solved) run.n_solved += s ? 1 : 0;
  if (problem.ground_truth && run.n_solved > 0) {
    std::vector<bool> mask(run.assignment.solved.begin(), run.assignment.solved.end());
    const Rotation q = align(run.assignment.rotations, *problem.ground_truth, mask);
    run.errors =
        error_summary(run.assignment.rotations, *problem.ground_truth, q, mask);
  }
  return run;
}

}  // namespace longsync
