#include "longsync/rotation.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "longsync/numerics.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace longsync {

namespace {
int g_threads = 0;
}

void set_num_threads(int n) {
  g_threads = n;
#ifdef _OPENMP
  Eigen::setNbThreads(n <= 0 ? 0 : n);
#endif
}

int num_threads() { return g_threads; }

Rotation Rotation::identity(int d) {
  return Rotation(Eigen::MatrixXd::Identity(d, d));
}

Rotation Rotation::from_matrix(const Eigen::MatrixXd& m, const NumericsConfig& cfg) {
  if (m.rows() != m.cols() || m.rows() < 1) {
    throw std::invalid_argument("rotation matrix must be square");
  }
  const int d = static_cast<int>(m.rows());
  const double ortho_err =
      (m.transpose() * m - Eigen::MatrixXd::Identity(d, d)).norm();
  if (ortho_err > cfg.orthogonality_tol) {
    throw std::invalid_argument("matrix is not orthogonal within tolerance");
  }
  if (std::abs(m.determinant() - 1.0) > cfg.determinant_tol) {
    throw std::invalid_argument("matrix determinant is not +1 within tolerance");
  }
  return Rotation(m);
}

Rotation Rotation::axis_angle(const Eigen::Vector3d& axis, double angle) {
  const double nrm = axis.norm();
  if (nrm == 0.0) return Rotation::identity(3);
  return Rotation(Eigen::MatrixXd(so3_exp(axis / nrm * angle)));
}

double chordal_distance(const Rotation& r1, const Rotation& r2) {
  if (r1.dim() != r2.dim()) {
    throw std::invalid_argument("chordal_distance: dimension mismatch");
  }
  const double inner = (r1.matrix().array() * r2.matrix().array()).sum();
  return std::sqrt(std::max(0.0, 1.0 - inner / r1.dim()));
}

double geodesic_angle(const Rotation& r1, const Rotation& r2) {
  if (r1.dim() != 3 || r2.dim() != 3) {
    throw std::invalid_argument("geodesic_angle requires d = 3");
  }
  const double tr = (r1.matrix().transpose() * r2.matrix()).trace();
  const double c = std::clamp((tr - 1.0) / 2.0, -1.0, 1.0);
  return std::acos(c);
}

Rotation haar_sample(std::mt19937_64& rng, int d) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXd a(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) a(i, j) = gauss(rng);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
  Eigen::MatrixXd q = qr.householderQ();
  Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int i = 0; i < d; ++i) {
    if (r(i, i) < 0) q.col(i) = -q.col(i);
  }
  if (q.determinant() < 0) q.col(d - 1) = -q.col(d - 1);
  return Rotation::unchecked(std::move(q));
}

Rotation project_to_rotation(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols()) {
    throw std::domain_error("project_to_rotation: matrix must be square");
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  if (sv(sv.size() - 1) <= sv(0) * 1e-13 || sv(0) == 0.0) {
    throw std::domain_error("project_to_rotation: rank-deficient input");
  }
  Eigen::MatrixXd u = svd.matrixU();
  Eigen::MatrixXd v = svd.matrixV();
  const int d = static_cast<int>(m.rows());
  Eigen::VectorXd diag = Eigen::VectorXd::Ones(d);
  if ((u * v.transpose()).determinant() < 0) diag(d - 1) = -1.0;
  return Rotation::unchecked(u * diag.asDiagonal() * v.transpose());
}

UnitQuaternion UnitQuaternion::canonical() const {
  UnitQuaternion q = *this;
  bool flip = q.w < 0;
  if (q.w == 0) {
    if (q.x != 0) flip = q.x < 0;
    else if (q.y != 0) flip = q.y < 0;
    else flip = q.z < 0;
  }
  if (flip) { q.w = -q.w; q.x = -q.x; q.y = -q.y; q.z = -q.z; }
  return q;
}

double UnitQuaternion::norm() const {
  return std::sqrt(w * w + x * x + y * y + z * z);
}

UnitQuaternion UnitQuaternion::from_rotation(const Rotation& r) {
  if (r.dim() != 3) throw std::invalid_argument("quaternion requires d = 3");
  const auto& m = r.matrix();
  UnitQuaternion q;
  const double tr = m.trace();
  // Shepperd's method: pick the largest pivot for stability.
  if (tr > 0) {
    double s = std::sqrt(tr + 1.0) * 2.0;
    q.w = 0.25 * s;
    q.x = (m(2, 1) - m(1, 2)) / s;
    q.y = (m(0, 2) - m(2, 0)) / s;
    q.z = (m(1, 0) - m(0, 1)) / s;
  } else if (m(0, 0) > m(1, 1) && m(0, 0) > m(2, 2)) {
    double s = std::sqrt(1.0 + m(0, 0) - m(1, 1) - m(2, 2)) * 2.0;
    q.w = (m(2, 1) - m(1, 2)) / s;
    q.x = 0.25 * s;
    q.y = (m(0, 1) + m(1, 0)) / s;
    q.z = (m(0, 2) + m(2, 0)) / s;
  } else if (m(1, 1) > m(2, 2)) {
    double s = std::sqrt(1.0 + m(1, 1) - m(0, 0) - m(2, 2)) * 2.0;
    q.w = (m(0, 2) - m(2, 0)) / s;
    q.x = (m(0, 1) + m(1, 0)) / s;
    q.y = 0.25 * s;
    q.z = (m(1, 2) + m(2, 1)) / s;
  } else {
    double s = std::sqrt(1.0 + m(2, 2) - m(0, 0) - m(1, 1)) * 2.0;
    q.w = (m(1, 0) - m(0, 1)) / s;
    q.x = (m(0, 2) + m(2, 0)) / s;
    q.y = (m(1, 2) + m(2, 1)) / s;
    q.z = 0.25 * s;
  }
  const double n = q.norm();
  q.w /= n; q.x /= n; q.y /= n; q.z /= n;
  return q.canonical();
}

Rotation UnitQuaternion::to_rotation() const {
  const double n = norm();
  const double w0 = w / n, x0 = x / n, y0 = y / n, z0 = z / n;
  Eigen::Matrix3d m;
  m << 1 - 2 * (y0 * y0 + z0 * z0), 2 * (x0 * y0 - z0 * w0), 2 * (x0 * z0 + y0 * w0),
       2 * (x0 * y0 + z0 * w0), 1 - 2 * (x0 * x0 + z0 * z0), 2 * (y0 * z0 - x0 * w0),
       2 * (x0 * z0 - y0 * w0), 2 * (y0 * z0 + x0 * w0), 1 - 2 * (x0 * x0 + y0 * y0);
  return Rotation::unchecked(Eigen::MatrixXd(m));
}

Eigen::Matrix3d so3_exp(const Eigen::Vector3d& w) {
  const double theta = w.norm();
  Eigen::Matrix3d k;
  k << 0, -w.z(), w.y(),
       w.z(), 0, -w.x(),
       -w.y(), w.x(), 0;
  if (theta < 1e-8) {
    return Eigen::Matrix3d::Identity() + k + 0.5 * k * k;
  }
  return Eigen::Matrix3d::Identity() + std::sin(theta) / theta * k +
         (1.0 - std::cos(theta)) / (theta * theta) * k * k;
}

Eigen::Vector3d so3_log(const Eigen::Matrix3d& r) {
  const double c = std::clamp((r.trace() - 1.0) / 2.0, -1.0, 1.0);
  const double theta = std::acos(c);
  Eigen::Vector3d v(r(2, 1) - r(1, 2), r(0, 2) - r(2, 0), r(1, 0) - r(0, 1));
  if (theta < 1e-8) return 0.5 * v;
  if (M_PI - theta < 1e-6) {
    // Near pi the antisymmetric part degenerates; recover the axis from the
    // symmetric part.
    Eigen::Vector3d axis;
    axis.x() = std::sqrt(std::max(0.0, (r(0, 0) + 1.0) / 2.0));
    axis.y() = std::sqrt(std::max(0.0, (r(1, 1) + 1.0) / 2.0));
    axis.z() = std::sqrt(std::max(0.0, (r(2, 2) + 1.0) / 2.0));
    if (v.x() < 0) axis.x() = -axis.x();
    if (v.y() < 0) axis.y() = -axis.y();
    if (v.z() < 0) axis.z() = -axis.z();
    if (axis.norm() == 0) axis = Eigen::Vector3d::UnitX();
    return axis.normalized() * theta;
  }
  return theta / (2.0 * std::sin(theta)) * v;
}

}  // namespace longsync
