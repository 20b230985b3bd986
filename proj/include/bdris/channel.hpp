#pragma once

// Propagation model for a BD-RIS-aided cell-free downlink: 2-D geometry,
// distance-dependent path loss, Rician fading with half-wavelength ULA
// responses, composite per-UE channels and CSI error injection.

#include <cmath>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "bdris/scattering.hpp"

namespace bdris {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

inline double distance(Point2 a, Point2 b) { return std::hypot(b.x - a.x, b.y - a.y); }

/// Angle of the direction a -> b measured from the +x axis.
inline double bearing(Point2 a, Point2 b) { return std::atan2(b.y - a.y, b.x - a.x); }

/// (0, 0), (0, 10), (0, -10), (0, 20), (0, -20), ...
inline std::vector<Point2> default_ap_positions(int count) {
  std::vector<Point2> out;
  for (int l = 0; l < count; ++l) {
    const int ring = (l + 1) / 2;
    out.push_back({0.0, (l % 2 == 1 ? 10.0 : -10.0) * ring});
  }
  return out;
}

struct SystemConfig {
  int num_aps = 3;
  int num_reflective = 2;
  int num_transmissive = 2;
  int antennas_per_ap = 2;
  int ris_cells = 16;
  int groups = 2;
  double power_max_w = 1e-3;     // per AP
  double noise_power_w = 1e-11;  // per UE, -80 dBm
  double rician_k_db = 5.0;
  double path_loss_ref_db = -30.0;
  double ref_distance_m = 1.0;
  double path_loss_exponent = 2.2;
  /// Empty means default_ap_positions(num_aps).
  std::vector<Point2> ap_positions;
  Point2 ris_position{200.0, 0.0};
  double ue_radius_m = 2.5;

  int num_ues() const { return num_reflective + num_transmissive; }
  int group_size() const { return ris_cells / groups; }

  std::vector<Point2> aps() const {
    return ap_positions.empty() ? default_ap_positions(num_aps) : ap_positions;
  }
  std::vector<double> power_limits() const {
    return std::vector<double>(static_cast<std::size_t>(num_aps), power_max_w);
  }
  std::vector<double> noise_powers() const {
    return std::vector<double>(static_cast<std::size_t>(num_ues()), noise_power_w);
  }

  void validate() const {
    auto fail = [](const std::string &m) { throw ParameterError("SystemConfig: " + m); };
    if (num_aps < 1)
      fail("num_aps must be >= 1");
    if (num_reflective < 0 || num_transmissive < 0 || num_ues() < 1)
      fail("need at least one UE and non-negative side counts");
    if (antennas_per_ap < 1)
      fail("antennas_per_ap must be >= 1");
    if (ris_cells < 1 || groups < 1 || ris_cells % groups != 0)
      fail("groups must divide ris_cells");
    if (!(power_max_w > 0.0) || !(noise_power_w > 0.0))
      fail("power limit and noise power must be positive");
    if (!(ref_distance_m > 0.0) || !std::isfinite(path_loss_exponent) ||
        std::isnan(path_loss_ref_db) || !std::isfinite(rician_k_db))
      fail("invalid path-loss or fading parameters");
    if (!(ue_radius_m > 0.0) || !std::isfinite(ue_radius_m))
      fail("ue_radius_m must be positive");
    if (!ap_positions.empty() &&
        ap_positions.size() != static_cast<std::size_t>(num_aps))
      fail("ap_positions must list exactly num_aps points");
    for (const auto &p : aps())
      if (!std::isfinite(p.x) || !std::isfinite(p.y))
        fail("AP positions must be finite");
    if (!std::isfinite(ris_position.x) || !std::isfinite(ris_position.y))
      fail("RIS position must be finite");
  }
};

/// Linear gain 10^(zeta0/10) (d/d0)^-beta.
inline double path_loss(double distance_m, const SystemConfig &cfg) {
  if (!(distance_m > 0.0))
    throw DomainError("path_loss: distance must be positive");
  return std::pow(10.0, cfg.path_loss_ref_db / 10.0) *
         std::pow(distance_m / cfg.ref_distance_m, -cfg.path_loss_exponent);
}

/// Half-wavelength ULA response [1, e^{j pi sin t}, ..., e^{j pi (n-1) sin t}].
inline CVector ula_response(Index n, double angle) {
  CVector a(n);
  const double phase = std::numbers::pi * std::sin(angle);
  for (Index i = 0; i < n; ++i)
    a(i) = std::polar(1.0, phase * static_cast<double>(i));
  return a;
}

/// rx_count x tx_count Rician channel
/// sqrt(gain) (sqrt(k/(1+k)) a_rx a_tx^H + sqrt(1/(1+k)) W).
template <class Rng>
CMatrix rician_channel(Index tx_count, Index rx_count, double aod, double aoa,
                       double gain, double k_factor_db, Rng &rng) {
  if (tx_count < 1 || rx_count < 1)
    throw ParameterError("rician_channel: antenna counts must be >= 1");
  const double kappa = std::pow(10.0, k_factor_db / 10.0);
  const double los = std::sqrt(kappa / (1.0 + kappa));
  const double nlos = std::sqrt(1.0 / (1.0 + kappa));
  const CMatrix w = complex_gaussian(rx_count, tx_count, rng);
  const CMatrix los_part =
      ula_response(rx_count, aoa) * ula_response(tx_count, aod).adjoint();
  return std::sqrt(gain) * (los * los_part + nlos * w);
}

/// All propagation channels of one network realization.
///   ap_to_ris[l]          G_l, M x N
///   ris_to_ue[k]          f_k, length M  (the RIS->UE k link is f_k^H)
///   ap_to_ue_direct[l][k] h_{l,k,d}, length N (the link is h_{l,k,d}^H)
struct ChannelSet {
  std::vector<CMatrix> ap_to_ris;
  std::vector<CVector> ris_to_ue;
  std::vector<std::vector<CVector>> ap_to_ue_direct;
  std::vector<Side> ue_side;
  std::vector<Point2> ue_positions;

  Index num_aps() const { return static_cast<Index>(ap_to_ris.size()); }
  Index num_ues() const { return static_cast<Index>(ris_to_ue.size()); }
  Index antennas() const { return ap_to_ris.empty() ? 0 : ap_to_ris.front().cols(); }
  Index cells() const { return ap_to_ris.empty() ? 0 : ap_to_ris.front().rows(); }

  /// Throws DimensionError unless every block has consistent shape.
  void check_consistent() const {
    const Index l = num_aps(), k = num_ues(), n = antennas(), m = cells();
    detail::require_shape(l >= 1 && k >= 1, "ChannelSet: empty");
    detail::require_shape(ue_side.size() == static_cast<std::size_t>(k),
                          "ChannelSet: ue_side length");
    detail::require_shape(ap_to_ue_direct.size() == static_cast<std::size_t>(l),
                          "ChannelSet: direct channel AP count");
    for (const auto &g : ap_to_ris)
      detail::require_shape(g.rows() == m && g.cols() == n, "ChannelSet: G_l shape");
    for (const auto &f : ris_to_ue)
      detail::require_shape(f.size() == m, "ChannelSet: f_k length");
    for (const auto &row : ap_to_ue_direct) {
      detail::require_shape(row.size() == static_cast<std::size_t>(k),
                            "ChannelSet: direct channel UE count");
      for (const auto &h : row)
        detail::require_shape(h.size() == n, "ChannelSet: h_lkd length");
    }
  }
};

/// Draws one network: UE placement on the two half circles around the RIS
/// (reflective UEs on the AP-facing half, x < x_RIS), then G_l, f_k and
/// h_{l,k,d}, in that order, from `rng`.
template <class Rng> ChannelSet generate_network(const SystemConfig &cfg, Rng &rng) {
  cfg.validate();
  const auto aps = cfg.aps();
  const Point2 ris = cfg.ris_position;
  const Index n = cfg.antennas_per_ap, m = cfg.ris_cells;
  const int k_total = cfg.num_ues();
  const double pi = std::numbers::pi;

  ChannelSet out;
  std::uniform_real_distribution<double> half(0.0, pi);
  for (int k = 0; k < k_total; ++k) {
    const bool reflective = k < cfg.num_reflective;
    // Reflective: angle in [pi/2, 3pi/2); transmissive: [-pi/2, pi/2).
    const double phi = half(rng) + (reflective ? pi / 2.0 : -pi / 2.0);
    out.ue_positions.push_back(
        {ris.x + cfg.ue_radius_m * std::cos(phi), ris.y + cfg.ue_radius_m * std::sin(phi)});
    out.ue_side.push_back(reflective ? Side::Reflective : Side::Transmissive);
  }

  for (const auto &ap : aps)
    out.ap_to_ris.push_back(rician_channel(n, m, bearing(ap, ris), bearing(ris, ap),
                                           path_loss(distance(ap, ris), cfg),
                                           cfg.rician_k_db, rng));
  for (const auto &ue : out.ue_positions) {
    const CMatrix link = rician_channel(m, 1, bearing(ris, ue), bearing(ue, ris),
                                        path_loss(distance(ris, ue), cfg),
                                        cfg.rician_k_db, rng);
    out.ris_to_ue.push_back(link.adjoint());
  }
  for (const auto &ap : aps) {
    std::vector<CVector> row;
    for (const auto &ue : out.ue_positions) {
      const CMatrix link = rician_channel(n, 1, bearing(ap, ue), bearing(ue, ap),
                                          path_loss(distance(ap, ue), cfg),
                                          cfg.rician_k_db, rng);
      row.push_back(link.adjoint());
    }
    out.ap_to_ue_direct.push_back(std::move(row));
  }
  return out;
}

/// h_k = [h_{1,k}; ...; h_{L,k}] with h_{l,k} = G_l^H Theta_i^H f_k + h_{l,k,d}.
inline CVector effective_channel(const ChannelSet &chs, const ScatteringConfig &theta,
                                 Index k) {
  if (k < 0 || k >= chs.num_ues())
    throw std::out_of_range("effective_channel: UE index out of range");
  detail::require_shape(theta.cells() == chs.cells(),
                        "effective_channel: RIS size mismatch");
  const Index n = chs.antennas();
  const CVector scattered =
      theta.apply_adjoint(chs.ue_side[static_cast<std::size_t>(k)],
                          chs.ris_to_ue[static_cast<std::size_t>(k)]);
  CVector h(chs.num_aps() * n);
  for (Index l = 0; l < chs.num_aps(); ++l)
    h.segment(l * n, n) =
        chs.ap_to_ris[static_cast<std::size_t>(l)].adjoint() * scattered +
        chs.ap_to_ue_direct[static_cast<std::size_t>(l)][static_cast<std::size_t>(k)];
  return h;
}

using EffectiveChannels = std::vector<CVector>;

inline EffectiveChannels effective_channels(const ChannelSet &chs,
                                            const ScatteringConfig &theta) {
  EffectiveChannels out;
  for (Index k = 0; k < chs.num_ues(); ++k)
    out.push_back(effective_channel(chs, theta, k));
  return out;
}

namespace detail {

template <class Derived, class Rng>
void add_relative_error(Eigen::MatrixBase<Derived> &m, double delta, Rng &rng) {
  std::normal_distribution<double> n(0.0, std::sqrt(0.5));
  for (Index j = 0; j < m.cols(); ++j)
    for (Index i = 0; i < m.rows(); ++i) {
      const double sd = std::sqrt(delta) * std::abs(m(i, j));
      const double re = n(rng);
      const double im = n(rng);
      m(i, j) += sd * Complex(re, im);
    }
}

} // namespace detail

/// Adds independent CN(0, delta |h|^2) error to every channel coefficient.
template <class Rng>
ChannelSet corrupt_csi(const ChannelSet &chs, double delta, Rng &rng) {
  if (!(delta >= 0.0))
    throw DomainError("corrupt_csi: delta must be >= 0");
  ChannelSet out = chs;
  if (delta == 0.0)
    return out;
  for (auto &g : out.ap_to_ris)
    detail::add_relative_error(g, delta, rng);
  for (auto &f : out.ris_to_ue)
    detail::add_relative_error(f, delta, rng);
  for (auto &row : out.ap_to_ue_direct)
    for (auto &h : row)
      detail::add_relative_error(h, delta, rng);
  return out;
}

} // namespace bdris
