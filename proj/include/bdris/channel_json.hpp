#pragma once

// JSON layout of a ChannelSet (complex numbers as [re, im]):
//
//   {
//     "format": "bdris-channelset/1",
//     "num_aps": L, "num_ues": K, "antennas_per_ap": N, "ris_cells": M,
//     "ap_to_ris":       [L][M][N][2]   G_l, row-major
//     "ris_to_ue":       [K][M][2]      f_k
//     "ap_to_ue_direct": [L][K][N][2]   h_{l,k,d}
//     "ue_side":         [K] "reflective" | "transmissive"
//     "ue_positions":    [K][2]         metres
//   }

#include <string>

#include "json.hpp"

#include "bdris/channel.hpp"

namespace bdris {

inline constexpr const char *kChannelSetFormat = "bdris-channelset/1";

namespace detail {

inline nlohmann::json complex_to_json(Complex z) { return {z.real(), z.imag()}; }

inline Complex complex_from_json(const nlohmann::json &j) {
  if (!j.is_array() || j.size() != 2)
    throw ParameterError("ChannelSet JSON: complex value must be [re, im]");
  return {j[0].get<double>(), j[1].get<double>()};
}

inline nlohmann::json vector_to_json(const CVector &v) {
  nlohmann::json out = nlohmann::json::array();
  for (Index i = 0; i < v.size(); ++i)
    out.push_back(complex_to_json(v(i)));
  return out;
}

inline CVector vector_from_json(const nlohmann::json &j, Index expected) {
  if (!j.is_array() || static_cast<Index>(j.size()) != expected)
    throw DimensionError("ChannelSet JSON: vector length mismatch");
  CVector v(expected);
  for (Index i = 0; i < expected; ++i)
    v(i) = complex_from_json(j[static_cast<std::size_t>(i)]);
  return v;
}

} // namespace detail

inline nlohmann::json to_json(const ChannelSet &chs) {
  chs.check_consistent();
  nlohmann::json j;
  j["format"] = kChannelSetFormat;
  j["num_aps"] = chs.num_aps();
  j["num_ues"] = chs.num_ues();
  j["antennas_per_ap"] = chs.antennas();
  j["ris_cells"] = chs.cells();
  auto &g = j["ap_to_ris"] = nlohmann::json::array();
  for (const auto &gl : chs.ap_to_ris) {
    nlohmann::json rows = nlohmann::json::array();
    for (Index r = 0; r < gl.rows(); ++r)
      rows.push_back(detail::vector_to_json(gl.row(r).transpose()));
    g.push_back(std::move(rows));
  }
  auto &f = j["ris_to_ue"] = nlohmann::json::array();
  for (const auto &fk : chs.ris_to_ue)
    f.push_back(detail::vector_to_json(fk));
  auto &d = j["ap_to_ue_direct"] = nlohmann::json::array();
  for (const auto &row : chs.ap_to_ue_direct) {
    nlohmann::json per_ue = nlohmann::json::array();
    for (const auto &h : row)
      per_ue.push_back(detail::vector_to_json(h));
    d.push_back(std::move(per_ue));
  }
  auto &side = j["ue_side"] = nlohmann::json::array();
  for (Side s : chs.ue_side)
    side.push_back(to_string(s));
  auto &pos = j["ue_positions"] = nlohmann::json::array();
  for (const auto &p : chs.ue_positions)
    pos.push_back({p.x, p.y});
  return j;
}

inline ChannelSet channel_set_from_json(const nlohmann::json &j) {
  if (j.value("format", std::string()) != kChannelSetFormat)
    throw ParameterError("ChannelSet JSON: unsupported or missing format tag");
  const Index l = j.at("num_aps").get<Index>();
  const Index k = j.at("num_ues").get<Index>();
  const Index n = j.at("antennas_per_ap").get<Index>();
  const Index m = j.at("ris_cells").get<Index>();

  ChannelSet chs;
  const auto &g = j.at("ap_to_ris");
  if (static_cast<Index>(g.size()) != l)
    throw DimensionError("ChannelSet JSON: ap_to_ris length");
  for (const auto &gl : g) {
    if (static_cast<Index>(gl.size()) != m)
      throw DimensionError("ChannelSet JSON: G_l row count");
    CMatrix mat(m, n);
    for (Index r = 0; r < m; ++r)
      mat.row(r) = detail::vector_from_json(gl[static_cast<std::size_t>(r)], n).transpose();
    chs.ap_to_ris.push_back(std::move(mat));
  }
  const auto &f = j.at("ris_to_ue");
  if (static_cast<Index>(f.size()) != k)
    throw DimensionError("ChannelSet JSON: ris_to_ue length");
  for (const auto &fk : f)
    chs.ris_to_ue.push_back(detail::vector_from_json(fk, m));
  const auto &d = j.at("ap_to_ue_direct");
  if (static_cast<Index>(d.size()) != l)
    throw DimensionError("ChannelSet JSON: ap_to_ue_direct length");
  for (const auto &row : d) {
    if (static_cast<Index>(row.size()) != k)
      throw DimensionError("ChannelSet JSON: direct channel UE count");
    std::vector<CVector> per_ue;
    for (const auto &h : row)
      per_ue.push_back(detail::vector_from_json(h, n));
    chs.ap_to_ue_direct.push_back(std::move(per_ue));
  }
  for (const auto &s : j.at("ue_side")) {
    const auto name = s.get<std::string>();
    if (name == "reflective")
      chs.ue_side.push_back(Side::Reflective);
    else if (name == "transmissive")
      chs.ue_side.push_back(Side::Transmissive);
    else
      throw ParameterError("ChannelSet JSON: unknown ue_side '" + name + "'");
  }
  if (j.contains("ue_positions"))
    for (const auto &p : j.at("ue_positions"))
      chs.ue_positions.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
  chs.check_consistent();
  return chs;
}

} // namespace bdris
