#pragma once

#include <Eigen/Core>
#include <utility>
#include <vector>

namespace longsync {

// n x n matrix of scalars. Used for adjacency, edge weights, corruption
// estimates and the scalar cycle-count outputs.
using WeightMatrix = Eigen::MatrixXd;

// Dense n x n grid of d x d blocks stored as one contiguous dn x dn matrix.
class BlockMatrix {
 public:
  BlockMatrix() = default;
  BlockMatrix(int n, int d)
      : n_(n), d_(d), data_(Eigen::MatrixXd::Zero(n * d, n * d)) {}

  static BlockMatrix wrap(int n, int d, Eigen::MatrixXd data);

  int block_count() const { return n_; }
  int block_dim() const { return d_; }

  Eigen::Block<Eigen::MatrixXd> block(int i, int j) {
    return data_.block(i * d_, j * d_, d_, d_);
  }
  Eigen::Block<const Eigen::MatrixXd> block(int i, int j) const {
    return data_.block(i * d_, j * d_, d_, d_);
  }

  Eigen::MatrixXd& dense() { return data_; }
  const Eigen::MatrixXd& dense() const { return data_; }

 private:
  int n_ = 0, d_ = 0;
  Eigen::MatrixXd data_;
};

// (w kron 1_d) hadamard r : scales block (i,j) by w(i,j).
BlockMatrix lift_hadamard(const WeightMatrix& w, const BlockMatrix& r);

// result(i,j) = Frobenius inner product of blocks x(i,j) and y(i,j).
WeightMatrix block_inner(const BlockMatrix& x, const BlockMatrix& y);

// x multiplied by itself k times as a dn x dn matrix; k >= 1.
BlockMatrix block_power(const BlockMatrix& x, int k);

BlockMatrix block_multiply(const BlockMatrix& x, const BlockMatrix& y);

// Keeps the scalar diagonal / the d x d diagonal blocks, zeroes the rest.
WeightMatrix diag_extract(const WeightMatrix& w);
BlockMatrix block_diag_extract(const BlockMatrix& x);

WeightMatrix hadamard_mul(const WeightMatrix& a, const WeightMatrix& b);
WeightMatrix hadamard_pow(const WeightMatrix& a, double k);
BlockMatrix hadamard_mul(const BlockMatrix& a, const BlockMatrix& b);
BlockMatrix hadamard_pow(const BlockMatrix& a, double k);

// Elementwise division. 0/0 is defined as 0 and the entry is recorded in
// `zero_over_zero` (when non-null) so callers can treat unsupported entries
// explicitly instead of propagating NaN.
WeightMatrix hadamard_div(const WeightMatrix& num, const WeightMatrix& den,
                          std::vector<std::pair<int, int>>* zero_over_zero = nullptr);

}  // namespace longsync
