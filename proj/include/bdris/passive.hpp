#pragma once

// Passive (BD-RIS) side of the alternating optimization. For fixed w and
// FP auxiliaries the Theta-dependent part of the surrogate is
//
//   F(Theta) = sum_i 2 Re Tr(Theta_i A_i) - Tr(Theta_i B Theta_i^H C_i),
//
// i in {t, r}. F is maximized one interconnection group at a time; each
// group is a minimization over St(2 Mbar, Mbar).

#include <array>
#include <string>
#include <vector>

#include "bdris/beamforming.hpp"
#include "bdris/solvers.hpp"

namespace bdris {

struct PassiveAssembly {
  std::array<CMatrix, 2> a;  // indexed by Side
  CMatrix b;
  std::array<CMatrix, 2> c;

  Index cells() const { return b.rows(); }
  const CMatrix &a_of(Side s) const { return a[static_cast<int>(s)]; }
  const CMatrix &c_of(Side s) const { return c[static_cast<int>(s)]; }
};

inline PassiveAssembly assemble_passive(const ChannelSet &chs, const BeamformerSet &w,
                                        const FPAux &aux) {
  chs.check_consistent();
  const Index l_count = chs.num_aps(), k_count = chs.num_ues(), m = chs.cells();
  detail::require_shape(w.num_aps() == l_count && w.num_ues() == k_count &&
                            w.antennas() == chs.antennas(),
                        "assemble_passive: beamformer shape does not match channels");
  detail::require_shape(aux.rho.size() == static_cast<std::size_t>(k_count) &&
                            aux.tau.size() == static_cast<std::size_t>(k_count),
                        "assemble_passive: aux size mismatch");

  // g_j = sum_l G_l w_{l,j};  a_kj = sum_l h_{l,k,d}^H w_{l,j}
  std::vector<CVector> g(static_cast<std::size_t>(k_count), CVector::Zero(m));
  CMatrix direct = CMatrix::Zero(k_count, k_count);
  for (Index j = 0; j < k_count; ++j)
    for (Index l = 0; l < l_count; ++l) {
      const auto lu = static_cast<std::size_t>(l);
      g[static_cast<std::size_t>(j)] += chs.ap_to_ris[lu] * w.slice(l, j);
      for (Index k = 0; k < k_count; ++k)
        direct(k, j) += chs.ap_to_ue_direct[lu][static_cast<std::size_t>(k)].dot(w.slice(l, j));
    }

  PassiveAssembly out;
  out.b = CMatrix::Zero(m, m);
  for (auto &x : out.a)
    x = CMatrix::Zero(m, m);
  for (auto &x : out.c)
    x = CMatrix::Zero(m, m);
  for (const auto &gj : g)
    out.b.noalias() += gj * gj.adjoint();

  for (Index k = 0; k < k_count; ++k) {
    const auto ku = static_cast<std::size_t>(k);
    const double tau2 = std::norm(aux.tau[ku]);
    CVector bk = CVector::Zero(m);
    for (Index j = 0; j < k_count; ++j)
      bk += tau2 * std::conj(direct(k, j)) * g[static_cast<std::size_t>(j)];
    const CVector tk = std::conj(aux.eta(k)) * g[ku] - bk;
    const int side = static_cast<int>(chs.ue_side[ku]);
    const CVector &fk = chs.ris_to_ue[ku];
    out.a[side].noalias() += tk * fk.adjoint();
    out.c[side].noalias() += tau2 * fk * fk.adjoint();
  }
  return out;
}

/// F(Theta) = sum_i 2 Re Tr(Theta_i A_i) - Tr(Theta_i B Theta_i^H C_i).
inline double passive_objective(const PassiveAssembly &as, const ScatteringConfig &theta) {
  detail::require_shape(theta.cells() == as.cells(), "passive_objective: size mismatch");
  double f = 0.0;
  for (Side s : {Side::Transmissive, Side::Reflective}) {
    const CMatrix th = theta.full(s);
    f += 2.0 * frobenius_inner(as.a_of(s).adjoint(), th) -
         frobenius_inner(as.c_of(s) * th, th * as.b);
  }
  return f;
}

/// The group-g subproblem: minimize over Theta_g = [Theta_t,g; Theta_r,g]
///   Tr(Theta_g B_gg Theta_g^H C_g) - 2 Re Tr(Theta_g X_g)
/// with C_g = blkdiag(C_t,gg, C_r,gg), X_g = [X_t,g, X_r,g] and
///   X_i,g = A_i,gg - sum_{p != g} B_gp Theta_i,p^H C_i,pg.
struct GroupProblem {
  CMatrix b;  // Mbar x Mbar
  CMatrix c;  // 2Mbar x 2Mbar
  CMatrix x;  // Mbar x 2Mbar

  double cost(const CMatrix &theta) const {
    return frobenius_inner(c * theta, theta * b) - 2.0 * frobenius_inner(x.adjoint(), theta);
  }
  CMatrix euclidean_gradient(const CMatrix &theta) const {
    return 2.0 * c * theta * b - 2.0 * x.adjoint();
  }
  CostModel model() const {
    return {[*this](const StiefelPoint &p) { return cost(p.matrix()); },
            [*this](const StiefelPoint &p) { return euclidean_gradient(p.matrix()); }};
  }
};

inline GroupProblem group_problem(const PassiveAssembly &as, const ScatteringConfig &theta,
                                  Index g) {
  detail::require_shape(theta.cells() == as.cells(), "group_problem: size mismatch");
  if (g < 0 || g >= theta.groups())
    throw std::out_of_range("group_problem: group index out of range");
  const Index mbar = theta.group_size();
  auto blk = [mbar](const CMatrix &m, Index r, Index c) {
    return m.block(r * mbar, c * mbar, mbar, mbar);
  };
  GroupProblem gp;
  gp.b = blk(as.b, g, g);
  gp.c = CMatrix::Zero(2 * mbar, 2 * mbar);
  gp.x = CMatrix(mbar, 2 * mbar);
  for (Side s : {Side::Transmissive, Side::Reflective}) {
    const Index off = s == Side::Transmissive ? 0 : mbar;
    gp.c.block(off, off, mbar, mbar) = blk(as.c_of(s), g, g);
    CMatrix xi = blk(as.a_of(s), g, g);
    for (Index p = 0; p < theta.groups(); ++p)
      if (p != g)
        xi.noalias() -= blk(as.b, g, p) * theta.block(s, p).adjoint() * blk(as.c_of(s), p, g);
    gp.x.middleCols(off, mbar) = xi;
  }
  return gp;
}

inline CostModel group_subproblem(const PassiveAssembly &as, const ScatteringConfig &theta,
                                  Index g) {
  return group_problem(as, theta, g).model();
}

struct PassiveResult {
  ScatteringConfig theta;
  std::vector<SolverTrace> group_traces;

  int total_iterations() const {
    int n = 0;
    for (const auto &t : group_traces)
      n += t.iterations();
    return n;
  }
};

/// One Gauss-Seidel sweep g = 0..G-1, each group solved from its current
/// value with the latest neighbouring blocks.
inline PassiveResult optimize_passive(const PassiveAssembly &as, ScatteringConfig theta,
                                      SolverKind solver, const SolverOptions &opts) {
  PassiveResult res{std::move(theta), {}};
  for (Index g = 0; g < res.theta.groups(); ++g) {
    const std::string where = "passive group " + std::to_string(g) + ": ";
    try {
      const auto start = StiefelPoint::from_matrix(res.theta.stacked(g), 1e-8);
      auto out = minimize(solver, group_subproblem(as, res.theta, g), start, opts);
      if (!out.point.shares_storage(start))
        res.theta.set_stacked(g, out.point.matrix());
      res.group_traces.push_back(std::move(out.trace));
    } catch (const ParameterError &e) {
      throw ParameterError(where + e.what());
    } catch (const DimensionError &e) {
      throw DimensionError(where + e.what());
    } catch (const std::exception &e) {
      throw NumericalError(where + e.what());
    }
  }
  return res;
}

} // namespace bdris
