#pragma once

// Dense Riemannian BFGS baseline. The inverse-Hessian approximation is stored
// as a real symmetric matrix over orthonormal intrinsic coordinates of the
// tangent space, so its size is the real tangent dimension 2np - p^2.

#include <cmath>
#include <utility>

#include "bdris/line_search.hpp"

namespace bdris {

/// Orthonormal real coordinates of T_X St(n, p). A tangent vector is written
/// xi = X Omega + X_perp K with Omega skew-Hermitian; the coordinates are
/// Im Omega_ii, sqrt(2) Re/Im of the strict upper triangle of Omega, and the
/// real and imaginary parts of K.
class TangentBasis {
public:
  explicit TangentBasis(const StiefelPoint &x) : base_(x) {
    const CMatrix &m = x.matrix();
    const Index n = m.rows();
    const Index p = m.cols();
    Eigen::HouseholderQR<CMatrix> qr(m);
    CMatrix q = qr.householderQ() * CMatrix::Identity(n, n);
    perp_ = q.rightCols(n - p);
  }

  const StiefelPoint &base() const { return base_; }

  Index dimension() const {
    const Index p = base_.cols();
    const Index n = base_.rows();
    return p * p + 2 * (n - p) * p;
  }

  Eigen::VectorXd coordinates(const TangentVector &xi) const {
    const Index p = base_.cols();
    const CMatrix omega = base_.matrix().adjoint() * xi.matrix();
    const CMatrix k = perp_.adjoint() * xi.matrix();
    Eigen::VectorXd c(dimension());
    Index at = 0;
    const double r2 = std::sqrt(2.0);
    for (Index i = 0; i < p; ++i)
      c(at++) = omega(i, i).imag();
    for (Index j = 0; j < p; ++j)
      for (Index i = 0; i < j; ++i) {
        c(at++) = r2 * omega(i, j).real();
        c(at++) = r2 * omega(i, j).imag();
      }
    for (Index j = 0; j < k.cols(); ++j)
      for (Index i = 0; i < k.rows(); ++i) {
        c(at++) = k(i, j).real();
        c(at++) = k(i, j).imag();
      }
    return c;
  }

  TangentVector vector(const Eigen::VectorXd &c) const {
    detail::require_shape(c.size() == dimension(),
                          "TangentBasis: coordinate length mismatch");
    const Index p = base_.cols();
    CMatrix omega = CMatrix::Zero(p, p);
    CMatrix k(perp_.cols(), p);
    Index at = 0;
    const double h = 1.0 / std::sqrt(2.0);
    for (Index i = 0; i < p; ++i)
      omega(i, i) = Complex(0.0, c(at++));
    for (Index j = 0; j < p; ++j)
      for (Index i = 0; i < j; ++i) {
        const Complex z(h * c(at), h * c(at + 1));
        at += 2;
        omega(i, j) = z;
        omega(j, i) = -std::conj(z);
      }
    for (Index j = 0; j < k.cols(); ++j)
      for (Index i = 0; i < k.rows(); ++i) {
        k(i, j) = Complex(c(at), c(at + 1));
        at += 2;
      }
    return TangentVector(base_, base_.matrix() * omega + perp_ * k);
  }

private:
  StiefelPoint base_;
  CMatrix perp_;
};

/// In-place inverse BFGS update H <- (I - r s y^T) H (I - r y s^T) + r s s^T
/// with r = 1/<s,y>.
inline void bfgs_inverse_update(Eigen::MatrixXd &h, const Eigen::VectorXd &s,
                                const Eigen::VectorXd &y) {
  const double r = 1.0 / s.dot(y);
  const Eigen::VectorXd hy = h.selfadjointView<Eigen::Lower>() * y;
  const double yhy = y.dot(hy);
  h.selfadjointView<Eigen::Lower>().rankUpdate(s, hy, -r);
  h.selfadjointView<Eigen::Lower>().rankUpdate(s, r * r * yhy + r);
}

inline SolverResult rbfgs_minimize(const CostModel &model,
                                   const StiefelPoint &start,
                                   const SolverOptions &opts) {
  opts.validate();
  SolverTrace trace;
  StiefelPoint x = start;
  double fx = model.cost(x);
  TangentVector g = model.riemannian_gradient(x);
  trace.records.push_back({fx, g.norm(), 0.0, 0});

  TangentBasis basis(x);
  const Index dim = basis.dimension();
  // Only the lower triangle is maintained.
  Eigen::MatrixXd h = Eigen::MatrixXd::Identity(dim, dim);
  bool scaled = false;
  TangentVector eta = -g;
  trace.termination = Termination::MaxIterations;

  for (int k = 0; k < opts.max_iters; ++k) {
    const double gnorm = g.norm();
    if (gnorm < opts.grad_tol) {
      trace.termination = Termination::GradientTolerance;
      break;
    }
    if (!detail::is_descent(g, eta)) {
      h.setIdentity();
      scaled = false;
      eta = -g;
      ++trace.restarts;
    }

    LineSearchResult ls = [&] {
      try {
        return backtracking_line_search(model, x, fx, eta, g, opts);
      } catch (const LineSearchFailure &) {
        return LineSearchResult{0.0, x, fx, -1};
      }
    }();
    if (ls.evaluations < 0) {
      trace.termination = Termination::LineSearchFailure;
      break;
    }

    TangentVector g_new = model.riemannian_gradient(ls.point);
    const TangentVector s = transport(ls.point, ls.step * eta);
    const TangentVector y = g_new - transport(ls.point, g);

    // The operator moves between tangent spaces by keeping its intrinsic
    // coordinates, an isometric transport that costs nothing.
    basis = TangentBasis(ls.point);
    const Eigen::VectorXd sc = basis.coordinates(s);
    const Eigen::VectorXd yc = basis.coordinates(y);
    const double sy = sc.dot(yc);
    if (sy > 1e-12 * sc.norm() * yc.norm()) {
      if (!scaled) {
        h = Eigen::MatrixXd::Identity(dim, dim) * (sy / yc.squaredNorm());
        scaled = true;
      }
      bfgs_inverse_update(h, sc, yc);
      const Eigen::VectorXd hy = h.selfadjointView<Eigen::Lower>() * yc;
      trace.secant_residuals.push_back((hy - sc).norm() / sc.norm());
    } else {
      ++trace.rejected_updates;
    }

    x = ls.point;
    fx = ls.cost;
    g = std::move(g_new);
    const Eigen::VectorXd gc = basis.coordinates(g);
    const Eigen::VectorXd dir = -(h.selfadjointView<Eigen::Lower>() * gc);
    eta = basis.vector(dir);
    trace.records.push_back({fx, g.norm(), ls.step, ls.evaluations});
  }
  if (trace.termination == Termination::MaxIterations &&
      g.norm() < opts.grad_tol)
    trace.termination = Termination::GradientTolerance;
  return {x, std::move(trace)};
}

} // namespace bdris
