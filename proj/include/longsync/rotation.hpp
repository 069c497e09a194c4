#pragma once

#include <Eigen/Core>
#include <random>

#include "longsync/numerics.hpp"

namespace longsync {

// An element of SO(d). Construction validates orthogonality and det = +1;
// values are immutable afterwards.
class Rotation {
 public:
  Rotation() : m_(Eigen::Matrix3d::Identity()) {}

  static Rotation identity(int d);
  // Validates against cfg; throws std::invalid_argument on failure.
  static Rotation from_matrix(const Eigen::MatrixXd& m,
                              const NumericsConfig& cfg = default_numerics());
  // d = 3 only. axis need not be normalized.
  static Rotation axis_angle(const Eigen::Vector3d& axis, double angle);

  const Eigen::MatrixXd& matrix() const { return m_; }
  int dim() const { return static_cast<int>(m_.rows()); }
  Rotation inverse() const { return Rotation(m_.transpose().eval()); }

  Rotation operator*(const Rotation& o) const { return Rotation((m_ * o.m_).eval()); }

  // Unvalidated wrap for matrices already known to be in SO(d).
  static Rotation unchecked(Eigen::MatrixXd m) { return Rotation(std::move(m)); }

 private:
  explicit Rotation(Eigen::MatrixXd m) : m_(std::move(m)) {}
  Eigen::MatrixXd m_;
};

struct UnitQuaternion {
  double w = 1, x = 0, y = 0, z = 0;

  // Canonical sign: w >= 0; ties broken on x, then y, then z.
  UnitQuaternion canonical() const;
  static UnitQuaternion from_rotation(const Rotation& r);  // d = 3
  Rotation to_rotation() const;
  double norm() const;
};

// sqrt(max(0, 1 - <r1, r2>_F / d)); bi-invariant.
double chordal_distance(const Rotation& r1, const Rotation& r2);

// Rotation angle of r1^T r2 in [0, pi]; d = 3 only.
double geodesic_angle(const Rotation& r1, const Rotation& r2);

// Haar-uniform sample via QR of a Gaussian matrix with R-diagonal sign fix,
// then determinant correction into SO(d).
Rotation haar_sample(std::mt19937_64& rng, int d = 3);

// Nearest rotation in Frobenius norm (orthogonal polar factor with
// determinant sign correction). Throws std::domain_error on rank-deficient
// input.
Rotation project_to_rotation(const Eigen::MatrixXd& m);

// so(3) helpers used by the averaging solvers.
Eigen::Matrix3d so3_exp(const Eigen::Vector3d& w);
Eigen::Vector3d so3_log(const Eigen::Matrix3d& r);

}  // namespace longsync
