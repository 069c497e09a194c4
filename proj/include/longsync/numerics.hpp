#pragma once

namespace longsync {

// Central tolerances. Every module validates against these rather than
// scattering magic numbers.
struct NumericsConfig {
  double orthogonality_tol = 1e-9;   // ||R^T R - I||_F for a valid rotation
  double determinant_tol = 1e-9;     // |det R - 1|
  double quaternion_norm_tol = 1e-12;
  double starvation_threshold = 1e-12;  // cycle support below this counts as none
  double weight_underflow = 1e-300;     // edge weights below this flush to zero
};

inline const NumericsConfig& default_numerics() {
  static const NumericsConfig cfg{};
  return cfg;
}

// Global switch for internal kernel parallelism (Eigen). 1 = fully sequential,
// 0 = library default. Trial-level parallelism is controlled separately by the
// callers and always aggregates deterministically.
void set_num_threads(int n);
int num_threads();

}  // namespace longsync
