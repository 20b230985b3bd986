#pragma once

// Geometry of the complex Stiefel manifold St(2p, p) = { X in C^{2p x p} :
// X^H X = I_p } with the Euclidean (Frobenius) metric Re Tr(A^H B).

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <memory>
#include <random>
#include <string>
#include <utility>

#include "bdris/errors.hpp"

namespace bdris {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using Index = Eigen::Index;

/// Frobenius inner product Re Tr(A^H B) of two equally shaped matrices.
inline double frobenius_inner(const CMatrix &a, const CMatrix &b) {
  detail::require_shape(a.rows() == b.rows() && a.cols() == b.cols(),
                        "frobenius_inner: shape mismatch");
  // Re(conj(x) y) = x_re y_re + x_im y_im, so this is a real dot product over
  // the interleaved storage.
  const Eigen::Map<const Eigen::VectorXd> x(
      reinterpret_cast<const double *>(a.data()), 2 * a.size());
  const Eigen::Map<const Eigen::VectorXd> y(
      reinterpret_cast<const double *>(b.data()), 2 * b.size());
  return x.dot(y);
}

/// (X + X^H) / 2
inline CMatrix hermitian_part(const CMatrix &x) {
  return 0.5 * (x + x.adjoint());
}

/// ||X^H X - I||_F
inline double unitarity_residual(const CMatrix &x) {
  const CMatrix gram = x.adjoint() * x;
  return (gram - CMatrix::Identity(gram.rows(), gram.cols())).norm();
}

/// Polar factor U V^H of a full-column-rank matrix.
inline CMatrix polar_factor(const CMatrix &x) {
  Eigen::BDCSVD<CMatrix> svd(x, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return svd.matrixU() * svd.matrixV().adjoint();
}

/// A point on St(2p, p). The matrix is shared and immutable, so copies are
/// cheap and safe to hand across threads.
class StiefelPoint {
public:
  static constexpr double kTolerance = 1e-10;

  /// Wraps `x` after checking shape (2p x p) and orthonormality.
  static StiefelPoint from_matrix(CMatrix x, double tolerance = kTolerance) {
    detail::require_shape(x.cols() >= 1 && x.rows() == 2 * x.cols(),
                          "StiefelPoint: expected a 2p x p matrix, got " +
                              std::to_string(x.rows()) + "x" +
                              std::to_string(x.cols()));
    const double residual = bdris::unitarity_residual(x);
    if (!(residual <= tolerance))
      throw ParameterError("StiefelPoint: columns are not orthonormal "
                           "(residual " +
                           std::to_string(residual) + ")");
    return StiefelPoint(std::make_shared<const CMatrix>(std::move(x)));
  }

  /// Projects an arbitrary full-rank 2p x p matrix onto the manifold.
  static StiefelPoint orthonormalize(const CMatrix &x) {
    detail::require_shape(x.cols() >= 1 && x.rows() == 2 * x.cols(),
                          "StiefelPoint: expected a 2p x p matrix");
    return StiefelPoint(std::make_shared<const CMatrix>(polar_factor(x)));
  }

  const CMatrix &matrix() const { return *data_; }
  Index half_dim() const { return data_->cols(); }
  Index rows() const { return data_->rows(); }
  Index cols() const { return data_->cols(); }
  double unitarity_residual() const { return bdris::unitarity_residual(*data_); }

  /// Identity of the underlying storage; value equality is not implied.
  bool shares_storage(const StiefelPoint &other) const {
    return data_ == other.data_;
  }

private:
  explicit StiefelPoint(std::shared_ptr<const CMatrix> data)
      : data_(std::move(data)) {}

  std::shared_ptr<const CMatrix> data_;
};

/// An element of the tangent space at `base()`. Construction checks shapes
/// only; tangency holds for everything produced by project_to_tangent and
/// transport, and is preserved by the linear operations below.
class TangentVector {
public:
  TangentVector(StiefelPoint base, CMatrix data)
      : base_(std::move(base)), data_(std::move(data)) {
    detail::require_shape(data_.rows() == base_.rows() &&
                              data_.cols() == base_.cols(),
                          "TangentVector: shape differs from base point");
  }

  static TangentVector zero(const StiefelPoint &base) {
    return TangentVector(base, CMatrix::Zero(base.rows(), base.cols()));
  }

  const StiefelPoint &base() const { return base_; }
  const CMatrix &matrix() const { return data_; }
  double norm() const { return data_.norm(); }

  /// ||base^H xi + xi^H base||_F, zero for a true tangent vector.
  double tangency_residual() const {
    const CMatrix m = base_.matrix().adjoint() * data_;
    return (m + m.adjoint()).norm();
  }

  TangentVector &operator+=(const TangentVector &o) {
    check_compatible(o);
    data_ += o.data_;
    return *this;
  }
  TangentVector &operator-=(const TangentVector &o) {
    check_compatible(o);
    data_ -= o.data_;
    return *this;
  }
  TangentVector &operator*=(double a) {
    data_ *= a;
    return *this;
  }

  friend TangentVector operator+(TangentVector a, const TangentVector &b) {
    return a += b;
  }
  friend TangentVector operator-(TangentVector a, const TangentVector &b) {
    return a -= b;
  }
  friend TangentVector operator*(double a, TangentVector v) { return v *= a; }
  friend TangentVector operator-(TangentVector v) { return v *= -1.0; }

private:
  void check_compatible(const TangentVector &o) const {
    detail::require_shape(o.data_.rows() == data_.rows() &&
                              o.data_.cols() == data_.cols(),
                          "TangentVector: shape mismatch");
  }

  StiefelPoint base_;
  CMatrix data_;
};

/// Orthogonal projection of an ambient matrix onto T_base:
/// A - base * herm(base^H A).
inline TangentVector project_to_tangent(const StiefelPoint &base,
                                        const CMatrix &ambient) {
  detail::require_shape(ambient.rows() == base.rows() &&
                            ambient.cols() == base.cols(),
                        "project_to_tangent: shape mismatch");
  const CMatrix &x = base.matrix();
  CMatrix out = ambient - x * hermitian_part(x.adjoint() * ambient);
  return TangentVector(base, std::move(out));
}

/// Polar retraction: the orthonormal polar factor of base + step.
inline StiefelPoint retract(const StiefelPoint &base, const TangentVector &step) {
  detail::require_shape(step.matrix().rows() == base.rows() &&
                            step.matrix().cols() == base.cols(),
                        "retract: shape mismatch");
  if (step.matrix().isZero(0.0))
    return base;
  return StiefelPoint::orthonormalize(base.matrix() + step.matrix());
}

struct TransportResult {
  TangentVector vector;
  /// The projection annihilated a nonzero input; `vector` is left unscaled.
  bool degenerate = false;
};

/// Projection onto T_to followed by rescaling to the input's Frobenius norm.
inline TransportResult transport_checked(const StiefelPoint &to,
                                         const TangentVector &xi) {
  TangentVector out = project_to_tangent(to, xi.matrix());
  const double in_norm = xi.norm();
  if (in_norm == 0.0)
    return {std::move(out), false};
  const double out_norm = out.norm();
  if (out_norm < 1e-14 * in_norm)
    return {std::move(out), true};
  out *= in_norm / out_norm;
  return {std::move(out), false};
}

/// Same as transport_checked, discarding the degeneracy flag. The `from`
/// point is implied by xi.base().
inline TangentVector transport(const StiefelPoint &to, const TangentVector &xi) {
  return transport_checked(to, xi).vector;
}

/// Re Tr(xi^H zeta).
inline double inner(const TangentVector &xi, const TangentVector &zeta) {
  return frobenius_inner(xi.matrix(), zeta.matrix());
}

/// Circularly-symmetric complex Gaussian matrix with unit-variance entries.
template <class Rng>
CMatrix complex_gaussian(Index rows, Index cols, Rng &rng) {
  std::normal_distribution<double> n(0.0, std::sqrt(0.5));
  CMatrix out(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) {
      const double re = n(rng);
      const double im = n(rng);
      out(i, j) = Complex(re, im);
    }
  return out;
}

/// Orthonormalized complex Gaussian 2p x p matrix; deterministic per rng state.
template <class Rng> StiefelPoint random_point(Index half_dim, Rng &rng) {
  if (half_dim < 1)
    throw ParameterError("random_point: half_dim must be >= 1");
  return StiefelPoint::orthonormalize(
      complex_gaussian(2 * half_dim, half_dim, rng));
}

/// Projection of a random ambient Gaussian onto T_base.
template <class Rng>
TangentVector random_tangent(const StiefelPoint &base, Rng &rng) {
  return project_to_tangent(base,
                            complex_gaussian(base.rows(), base.cols(), rng));
}

} // namespace bdris
