#pragma once

#include <cstdint>
#include <vector>

#include "longsync/block_matrix.hpp"

namespace longsync {

// f(i,j): weighted count of simple ij,c-paths (weight = product of path edge
// weights, the closing edge ij excluded).
// g(i,j): the matching weighted sum of ordered block products along the paths.
struct CycleFormResult {
  WeightMatrix f;
  BlockMatrix g;
};

// Operation accounting for the closed forms. `summands` counts additive terms,
// `dense_multiplies` counts dn x dn products, `cubic_kernels` counts the
// remaining O(n^3 d^3) non-gemm contractions.
struct CycleFormStats {
  int c = 0;
  int summands_f = 0;
  int summands_g = 0;
  int dense_multiplies = 0;
  int cubic_kernels = 0;
};

// Closed form for c in {3,4,5,6}. Requires w symmetric, zero diagonal,
// nonnegative; r must carry valid group blocks wherever w is nonzero with
// r(j,i) = r(i,j)^-1. Exact up to floating rounding.
CycleFormResult f_g_closed_form(const WeightMatrix& w, const BlockMatrix& r, int c);

// Reference semantics by DFS over ordered tuples of distinct intermediate
// nodes. Any c >= 3, n <= enumeration_limit.
CycleFormResult f_g_bruteforce(const WeightMatrix& w, const BlockMatrix& r, int c,
                               int enumeration_limit = 12);

CycleFormStats cycle_form_stats(int c);

struct VerifyFormsEntry {
  int c = 0;
  int trials = 0;
  double max_f_error = 0.0;
  double max_g_error = 0.0;
  bool pass = true;
};

struct VerifyFormsReport {
  std::vector<VerifyFormsEntry> per_c;
  bool all_pass = true;
};

// Randomized cross-validation of closed forms against the enumeration oracle:
// random graphs, random weights in [0,1], random Haar rotation blocks.
VerifyFormsReport verify_forms(std::uint64_t seed, int trials, int n_min, int n_max,
                               const std::vector<int>& c_set, double tol = 1e-9);

}  // namespace longsync
