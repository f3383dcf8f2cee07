#pragma once

#include "trackstride/error.hpp"

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <Eigen/LU>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace trackstride {

/// Canonical representative of a projective matrix: Frobenius norm 1 and
/// h(2,2) >= 0 (when h(2,2) == 0 the first nonzero entry is made positive).
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, 3, 3> canonical_homography(const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  Eigen::Matrix<Scalar, 3, 3> h = m / m.norm();
  Scalar sign_entry = h(2, 2);
  if (sign_entry == Scalar(0)) {
    for (int i = 0; i < 9 && sign_entry == Scalar(0); ++i) sign_entry = h(i / 3, i % 3);
  }
  if (sign_entry < Scalar(0)) h = -h;
  return h;
}

/// Invertible plane-to-plane projective map, stored in canonical form.
template <typename Scalar>
class HomographyT {
 public:
  using Matrix3 = Eigen::Matrix<Scalar, 3, 3>;
  using Vector2 = Eigen::Matrix<Scalar, 2, 1>;

  /// Throws Error{RankDeficient} when the matrix is singular (|det| <= 1e-12
  /// after normalization) or has non-finite entries.
  explicit HomographyT(const Matrix3& m) {
    if (!m.allFinite() || m.norm() == Scalar(0)) {
      throw Error(ErrorCode::RankDeficient, "homography entries must be finite and nonzero");
    }
    h_ = canonical_homography(m);
    if (!(std::abs(h_.determinant()) > Scalar(1e-12))) {
      throw Error(ErrorCode::RankDeficient, "homography is singular");
    }
  }

  static HomographyT identity() { return HomographyT(Matrix3::Identity()); }

  const Matrix3& matrix() const { return h_; }
  Scalar operator()(int r, int c) const { return h_(r, c); }

  HomographyT inverse() const { return HomographyT(h_.inverse()); }

  /// Maps p; throws Error{PointAtInfinity} when |w'| < 1e-12.
  Vector2 map(const Vector2& p) const {
    const Eigen::Matrix<Scalar, 3, 1> q = h_ * p.homogeneous();
    if (std::abs(q.z()) < Scalar(1e-12)) {
      throw Error(ErrorCode::PointAtInfinity, "point maps to the line at infinity");
    }
    return q.hnormalized();
  }

 private:
  Matrix3 h_;
};

using Homography = HomographyT<double>;

/// Similarity that moves the centroid of the columns of pts to the origin and
/// scales their mean distance from it to sqrt(2).
template <typename Scalar>
Eigen::Matrix<Scalar, 3, 3> hartley_normalization(const Eigen::Matrix<Scalar, 2, Eigen::Dynamic>& pts) {
  const Eigen::Matrix<Scalar, 2, 1> c = pts.rowwise().mean();
  const Scalar mean_dist = (pts.colwise() - c).colwise().norm().mean();
  const Scalar s = mean_dist > Scalar(0) ? std::sqrt(Scalar(2)) / mean_dist : Scalar(1);
  Eigen::Matrix<Scalar, 3, 3> t;
  t << s, 0, -s * c.x(), 0, s, -s * c.y(), 0, 0, 1;
  return t;
}

/// Smallest triangle area over all triples of columns.
template <typename Scalar>
Scalar min_triangle_area(const Eigen::Matrix<Scalar, 2, Eigen::Dynamic>& pts) {
  Scalar best = std::numeric_limits<Scalar>::infinity();
  const auto n = pts.cols();
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j)
      for (Eigen::Index k = j + 1; k < n; ++k) {
        const Eigen::Matrix<Scalar, 2, 1> u = pts.col(j) - pts.col(i);
        const Eigen::Matrix<Scalar, 2, 1> v = pts.col(k) - pts.col(i);
        best = std::min(best, std::abs(u.x() * v.y() - u.y() * v.x()) / Scalar(2));
      }
  return best;
}

/// Direct linear transform from n >= 4 correspondences src.col(i) -> dst.col(i).
///
/// Both point sets are Hartley-normalized; every correspondence contributes
/// two rows of the 2n x 9 system A vec(H) = 0, solved by the right singular
/// vector of the smallest singular value and then denormalized.
/// Throws Error{DegenerateConfiguration} when fewer than four points are given
/// or any three source points are collinear (triangle area <= 1e-6), and
/// Error{RankDeficient} when the null space is not one-dimensional.
template <typename Scalar>
HomographyT<Scalar> dlt_homography(const Eigen::Matrix<Scalar, 2, Eigen::Dynamic>& src,
                                   const Eigen::Matrix<Scalar, 2, Eigen::Dynamic>& dst) {
  using Matrix3 = Eigen::Matrix<Scalar, 3, 3>;
  const auto n = src.cols();
  if (n < 4 || dst.cols() != n) {
    throw Error(ErrorCode::DegenerateConfiguration, "need at least four correspondences");
  }
  if (!src.allFinite() || !dst.allFinite()) {
    throw Error(ErrorCode::DegenerateConfiguration, "correspondences must be finite");
  }
  if (!(min_triangle_area<Scalar>(src) > Scalar(1e-6))) {
    throw Error(ErrorCode::DegenerateConfiguration, "three image points are collinear");
  }

  const Matrix3 t_src = hartley_normalization<Scalar>(src);
  const Matrix3 t_dst = hartley_normalization<Scalar>(dst);
  const Eigen::Matrix<Scalar, 3, Eigen::Dynamic> a = t_src * src.colwise().homogeneous();
  const Eigen::Matrix<Scalar, 3, Eigen::Dynamic> b = t_dst * dst.colwise().homogeneous();

  Eigen::Matrix<Scalar, Eigen::Dynamic, 9> sys(2 * n, 9);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Matrix<Scalar, 1, 3> x = a.col(i).transpose();
    const Scalar u = b(0, i) / b(2, i);
    const Scalar v = b(1, i) / b(2, i);
    sys.row(2 * i) << x, Eigen::Matrix<Scalar, 1, 3>::Zero(), -u * x;
    sys.row(2 * i + 1) << Eigen::Matrix<Scalar, 1, 3>::Zero(), x, -v * x;
  }

  Eigen::JacobiSVD<Eigen::Matrix<Scalar, Eigen::Dynamic, 9>> svd(sys, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  // sorted descending; with only 8 rows the ninth value is implicitly zero
  if (!(sv(7) > Scalar(1e-10) * sv(0))) {
    throw Error(ErrorCode::RankDeficient, "DLT null space is not one-dimensional");
  }
  const Eigen::Matrix<Scalar, 9, 1> h = svd.matrixV().col(8);
  Matrix3 hn;
  hn << h(0), h(1), h(2), h(3), h(4), h(5), h(6), h(7), h(8);
  return HomographyT<Scalar>(t_dst.inverse() * hn * t_src);
}

}  // namespace trackstride
