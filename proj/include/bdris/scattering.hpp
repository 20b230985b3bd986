#pragma once

// Hybrid transmitting/reflecting BD-RIS scattering matrices. Theta_t and
// Theta_r are block diagonal with G blocks of size Mbar = M / G; each group
// satisfies Theta_r,g^H Theta_r,g + Theta_t,g^H Theta_t,g = I.

#include <array>
#include <cmath>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "bdris/stiefel.hpp"

namespace bdris {

enum class Side { Transmissive = 0, Reflective = 1 };

inline std::string to_string(Side s) {
  return s == Side::Transmissive ? "transmissive" : "reflective";
}

class ScatteringConfig {
public:
  ScatteringConfig(Index cells, Index groups) : cells_(cells), groups_(groups) {
    if (cells < 1 || groups < 1 || cells % groups != 0)
      throw ParameterError("ScatteringConfig: groups must divide cells (M=" +
                           std::to_string(cells) +
                           ", G=" + std::to_string(groups) + ")");
    const Index mbar = cells / groups;
    for (auto &side : blocks_)
      side.assign(static_cast<std::size_t>(groups), CMatrix::Zero(mbar, mbar));
  }

  /// Diagonal start: every entry (1/sqrt 2) e^{j phi}, phi ~ U[0, 2 pi),
  /// transmissive entries drawn before reflective ones.
  template <class Rng>
  static ScatteringConfig random_diagonal(Index cells, Index groups, Rng &rng) {
    ScatteringConfig out(cells, groups);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
    const double amp = 1.0 / std::sqrt(2.0);
    const Index mbar = out.group_size();
    for (Side side : {Side::Transmissive, Side::Reflective})
      for (Index m = 0; m < cells; ++m)
        out.block(side, m / mbar)(m % mbar, m % mbar) =
            std::polar(amp, phase(rng));
    return out;
  }

  Index cells() const { return cells_; }
  Index groups() const { return groups_; }
  Index group_size() const { return cells_ / groups_; }

  const CMatrix &block(Side side, Index g) const {
    return blocks_[static_cast<int>(side)].at(static_cast<std::size_t>(g));
  }
  CMatrix &block(Side side, Index g) {
    return blocks_[static_cast<int>(side)].at(static_cast<std::size_t>(g));
  }

  /// The full M x M block-diagonal matrix.
  CMatrix full(Side side) const {
    const Index mbar = group_size();
    CMatrix out = CMatrix::Zero(cells_, cells_);
    for (Index g = 0; g < groups_; ++g)
      out.block(g * mbar, g * mbar, mbar, mbar) = block(side, g);
    return out;
  }

  /// Theta_g = [Theta_t,g; Theta_r,g] (2 Mbar x Mbar).
  CMatrix stacked(Index g) const {
    const Index mbar = group_size();
    CMatrix out(2 * mbar, mbar);
    out.topRows(mbar) = block(Side::Transmissive, g);
    out.bottomRows(mbar) = block(Side::Reflective, g);
    return out;
  }

  /// Transmissive block = rows 1..Mbar, reflective block = rows Mbar+1..2Mbar.
  void set_stacked(Index g, const CMatrix &theta) {
    const Index mbar = group_size();
    detail::require_shape(theta.rows() == 2 * mbar && theta.cols() == mbar,
                          "ScatteringConfig::set_stacked: expected 2Mbar x Mbar");
    block(Side::Transmissive, g) = theta.topRows(mbar);
    block(Side::Reflective, g) = theta.bottomRows(mbar);
  }

  double c1_residual(Index g) const { return unitarity_residual(stacked(g)); }

  double max_c1_residual() const {
    double worst = 0.0;
    for (Index g = 0; g < groups_; ++g)
      worst = std::max(worst, c1_residual(g));
    return worst;
  }

  /// Theta_side^H f, computed block by block.
  CVector apply_adjoint(Side side, const CVector &f) const {
    detail::require_shape(f.size() == cells_,
                          "ScatteringConfig::apply_adjoint: length mismatch");
    const Index mbar = group_size();
    CVector out(cells_);
    for (Index g = 0; g < groups_; ++g)
      out.segment(g * mbar, mbar) =
          block(side, g).adjoint() * f.segment(g * mbar, mbar);
    return out;
  }

  /// Theta_side x, computed block by block.
  CVector apply(Side side, const CVector &x) const {
    detail::require_shape(x.size() == cells_,
                          "ScatteringConfig::apply: length mismatch");
    const Index mbar = group_size();
    CVector out(cells_);
    for (Index g = 0; g < groups_; ++g)
      out.segment(g * mbar, mbar) = block(side, g) * x.segment(g * mbar, mbar);
    return out;
  }

private:
  Index cells_;
  Index groups_;
  std::array<std::vector<CMatrix>, 2> blocks_;
};

/// Architecture label from the group count: FC (G = 1), SC (G = M), else GC.
inline std::string architecture_label(Index cells, Index groups) {
  if (groups == 1)
    return "FC";
  if (groups == cells)
    return "SC";
  return "GC";
}

} // namespace bdris
