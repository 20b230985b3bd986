#pragma once

// Cost models shared by the solver tests.

#include <random>

#include "bdris/solvers.hpp"

namespace bdris::testing {

inline CMatrix random_psd(Index n, std::mt19937_64 &rng) {
  const CMatrix a = complex_gaussian(n, n, rng);
  return a * a.adjoint() / static_cast<double>(n);
}

/// f(X) = Tr(X B X^H C) - 2 Re Tr(X D), gradient 2 C X B - 2 D^H.
inline CostModel quadratic_model(CMatrix b, CMatrix c, CMatrix d) {
  CostModel m;
  m.cost = [b, c, d](const StiefelPoint &x) {
    const CMatrix &t = x.matrix();
    return (t * b * t.adjoint() * c).trace().real() -
           2.0 * (t * d).trace().real();
  };
  m.euclidean_gradient = [b, c, d](const StiefelPoint &x) -> CMatrix {
    const CMatrix &t = x.matrix();
    return 2.0 * c * t * b - 2.0 * d.adjoint();
  };
  return m;
}

inline CostModel random_quadratic_model(Index p, std::mt19937_64 &rng) {
  return quadratic_model(random_psd(p, rng), random_psd(2 * p, rng),
                         complex_gaussian(p, 2 * p, rng));
}

/// Brockett cost Tr(X^H A X N) with A Hermitian and N real diagonal.
inline CostModel brockett_model(CMatrix a, Eigen::VectorXd n) {
  CostModel m;
  m.cost = [a, n](const StiefelPoint &x) {
    const CMatrix &t = x.matrix();
    return (t.adjoint() * a * t * n.asDiagonal()).trace().real();
  };
  m.euclidean_gradient = [a, n](const StiefelPoint &x) -> CMatrix {
    return 2.0 * a * x.matrix() * n.asDiagonal();
  };
  return m;
}

/// Max relative error of <grad f, xi> against central differences of
/// f(retract(x, h xi)) over `directions` random tangent directions.
inline double gradient_check(const CostModel &m, const StiefelPoint &x,
                             std::mt19937_64 &rng, int directions = 10,
                             double h = 1e-6) {
  const TangentVector g = m.riemannian_gradient(x);
  double worst = 0.0;
  for (int i = 0; i < directions; ++i) {
    TangentVector xi = random_tangent(x, rng);
    xi *= 1.0 / xi.norm();
    const double fd =
        (m.cost(retract(x, h * xi)) - m.cost(retract(x, -h * xi))) / (2 * h);
    const double an = inner(g, xi);
    const double scale = std::max(std::abs(an), g.norm() * 1e-3);
    worst = std::max(worst, std::abs(fd - an) / scale);
  }
  return worst;
}

} // namespace bdris::testing
