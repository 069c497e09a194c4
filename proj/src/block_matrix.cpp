#include "longsync/block_matrix.hpp"

#include <cmath>
#include <stdexcept>

namespace longsync {

BlockMatrix BlockMatrix::wrap(int n, int d, Eigen::MatrixXd data) {
  if (data.rows() != n * d || data.cols() != n * d) {
    throw std::invalid_argument("BlockMatrix::wrap: shape mismatch");
  }
  BlockMatrix b;
  b.n_ = n;
  b.d_ = d;
  b.data_ = std::move(data);
  return b;
}

BlockMatrix lift_hadamard(const WeightMatrix& w, const BlockMatrix& r) {
  const int n = r.block_count(), d = r.block_dim();
  if (w.rows() != n || w.cols() != n) {
    throw std::invalid_argument("lift_hadamard: size mismatch");
  }
  BlockMatrix out(n, d);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (w(i, j) != 0.0) out.block(i, j) = w(i, j) * r.block(i, j);
  return out;
}

WeightMatrix block_inner(const BlockMatrix& x, const BlockMatrix& y) {
  const int n = x.block_count(), d = x.block_dim();
  if (y.block_count() != n || y.block_dim() != d) {
    throw std::invalid_argument("block_inner: size mismatch");
  }
  WeightMatrix out(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      out(i, j) = (x.block(i, j).array() * y.block(i, j).array()).sum();
  return out;
}

BlockMatrix block_multiply(const BlockMatrix& x, const BlockMatrix& y) {
  if (x.block_count() != y.block_count() || x.block_dim() != y.block_dim()) {
    throw std::invalid_argument("block_multiply: size mismatch");
  }
  return BlockMatrix::wrap(x.block_count(), x.block_dim(), x.dense() * y.dense());
}

BlockMatrix block_power(const BlockMatrix& x, int k) {
  if (k < 1) throw std::invalid_argument("block_power: k must be >= 1");
  BlockMatrix out = x;
  for (int i = 1; i < k; ++i) out = block_multiply(out, x);
  return out;
}

WeightMatrix diag_extract(const WeightMatrix& w) {
  WeightMatrix out = WeightMatrix::Zero(w.rows(), w.cols());
  out.diagonal() = w.diagonal();
  return out;
}

BlockMatrix block_diag_extract(const BlockMatrix& x) {
  BlockMatrix out(x.block_count(), x.block_dim());
  for (int i = 0; i < x.block_count(); ++i) out.block(i, i) = x.block(i, i);
  return out;
}

WeightMatrix hadamard_mul(const WeightMatrix& a, const WeightMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw std::invalid_argument("hadamard_mul: size mismatch");
  }
  return a.cwiseProduct(b);
}

WeightMatrix hadamard_pow(const WeightMatrix& a, double k) {
  return a.array().pow(k).matrix();
}

BlockMatrix hadamard_mul(const BlockMatrix& a, const BlockMatrix& b) {
  if (a.block_count() != b.block_count() || a.block_dim() != b.block_dim()) {
    throw std::invalid_argument("hadamard_mul: size mismatch");
  }
  return BlockMatrix::wrap(a.block_count(), a.block_dim(),
                           a.dense().cwiseProduct(b.dense()));
}

BlockMatrix hadamard_pow(const BlockMatrix& a, double k) {
  return BlockMatrix::wrap(a.block_count(), a.block_dim(),
                           a.dense().array().pow(k).matrix());
}

WeightMatrix hadamard_div(const WeightMatrix& num, const WeightMatrix& den,
                          std::vector<std::pair<int, int>>* zero_over_zero) {
  if (num.rows() != den.rows() || num.cols() != den.cols()) {
    throw std::invalid_argument("hadamard_div: size mismatch");
  }
  WeightMatrix out(num.rows(), num.cols());
  for (int i = 0; i < num.rows(); ++i) {
    for (int j = 0; j < num.cols(); ++j) {
      if (den(i, j) == 0.0) {
        if (num(i, j) == 0.0) {
          out(i, j) = 0.0;
          if (zero_over_zero) zero_over_zero->emplace_back(i, j);
        } else {
          throw std::domain_error("hadamard_div: nonzero numerator over zero denominator");
        }
      } else {
        out(i, j) = num(i, j) / den(i, j);
      }
    }
  }
  return out;
}

}  // namespace longsync
