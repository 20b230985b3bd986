#pragma once

// CSV export of experiment results and AO traces, plus a small RFC 4180
// reader used to load them back.
//
// Result columns (one row per run or benchmark instance):
//   kind                 run | complexity
//   sweep_parameter      none | power | csi_delta | ris_cells | groups
//   sweep_index, sweep_value
//   architecture_index, architecture (FC | GC | SC), groups, ris_cells
//   solver_index, solver (rlbfgs | rbfgs | rcg)
//   trial, seed          seed of the channel realization
//   sum_se_bits          final sum-SE on the true channels
//   initial_sum_se_bits  sum-SE at the zero-forcing / random-diagonal start
//   outer_iterations, converged
//   passive_iterations   Riemannian solver iterations, summed over groups
//   passive_cost         final passive cost (minimized form)
//   time_per_iteration_s wall-clock of the passive solves / passive_iterations
//   c1_residual          max_g ||Theta_g^H Theta_g - I||_F
//   power_margin         min_l (P_l - power_l) / P_l
//   status               ok | error: <message>
//
// Trace columns (one row per outer AO iteration; iteration 0 is the start):
//   sweep_value, solver, architecture, groups, trial, iteration, sum_se_bits,
//   surrogate_tight_nats, surrogate_after_nats, c1_residual, max_ap_power_w,
//   active_iterations, passive_iterations, seconds

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "bdris/experiment.hpp"

namespace bdris {

class IoError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

inline const std::vector<std::string> &result_columns() {
  static const std::vector<std::string> cols{
      "kind",           "sweep_parameter",     "sweep_index",      "sweep_value",
      "architecture_index", "architecture",    "groups",           "ris_cells",
      "solver_index",   "solver",              "trial",            "seed",
      "sum_se_bits",    "initial_sum_se_bits", "outer_iterations", "converged",
      "passive_iterations", "passive_cost",    "time_per_iteration_s", "c1_residual",
      "power_margin",   "status"};
  return cols;
}

inline const std::vector<std::string> &trace_columns() {
  static const std::vector<std::string> cols{
      "sweep_value",   "solver",         "architecture",   "groups",         "trial",
      "iteration",     "sum_se_bits",    "surrogate_tight_nats", "surrogate_after_nats",
      "c1_residual",   "max_ap_power_w", "active_iterations", "passive_iterations",
      "seconds"};
  return cols;
}

/// 17 significant digits, enough to read every double back exactly.
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string csv_field(const std::string &s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos)
    return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"')
      out += '"';
    out += c;
  }
  return out + "\"";
}

inline std::string join_line(const std::vector<std::string> &fields) {
  std::string line;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i)
      line += ',';
    line += csv_field(fields[i]);
  }
  return line + "\r\n";
}

inline std::vector<std::string> row_fields(const ResultRow &r) {
  return {r.kind,
          r.sweep_parameter,
          std::to_string(r.sweep_index),
          format_double(r.sweep_value),
          std::to_string(r.architecture_index),
          r.architecture,
          std::to_string(r.groups),
          std::to_string(r.ris_cells),
          std::to_string(r.solver_index),
          r.solver,
          std::to_string(r.trial),
          std::to_string(r.seed),
          format_double(r.sum_se_bits),
          format_double(r.initial_sum_se_bits),
          std::to_string(r.outer_iterations),
          r.converged ? "1" : "0",
          std::to_string(r.passive_iterations),
          format_double(r.passive_cost),
          format_double(r.time_per_iteration_s),
          format_double(r.c1_residual),
          format_double(r.power_margin),
          r.status};
}

inline std::string results_to_csv(const std::vector<ResultRow> &rows) {
  std::string out = join_line(result_columns());
  for (const auto &r : rows)
    out += join_line(row_fields(r));
  return out;
}

inline std::string traces_to_csv(const std::vector<TraceSeries> &series) {
  std::string out = join_line(trace_columns());
  for (const auto &s : series) {
    auto line = [&](int it, double se, double tight, double after, double c1, double pmax,
                    int act, int pas, double secs) {
      out += join_line({format_double(s.sweep_value), s.solver, s.architecture, std::to_string(s.groups),
                        std::to_string(s.trial), std::to_string(it), format_double(se),
                        format_double(tight), format_double(after), format_double(c1),
                        format_double(pmax), std::to_string(act), std::to_string(pas),
                        format_double(secs)});
    };
    const double ln2 = std::numbers::ln2;
    line(0, s.trace.initial_sum_se, ln2 * s.trace.initial_sum_se,
         ln2 * s.trace.initial_sum_se, 0.0, 0.0, 0, 0, 0.0);
    for (const auto &r : s.trace.records) {
      double pmax = 0.0;
      for (double p : r.ap_power)
        pmax = std::max(pmax, p);
      line(r.iteration, r.sum_se_bits, r.surrogate_tight, r.surrogate_after, r.c1_residual,
           pmax, r.active_iterations, r.passive_iterations, r.seconds);
    }
  }
  return out;
}

/// Writes `text` to `path` via a temporary file and rename.
inline void write_file_atomic(const std::string &path, const std::string &text) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f)
      throw IoError("cannot open '" + tmp + "' for writing");
    f << text;
    f.flush();
    if (!f)
      throw IoError("write to '" + tmp + "' failed");
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    std::remove(tmp.c_str());
    throw IoError("cannot rename '" + tmp + "' to '" + path + "'");
  }
}

inline nlohmann::json metadata_json(const ExperimentSpec &spec, const std::string &command,
                                    std::size_t rows, const std::vector<std::string> &columns) {
  return {{"generator", "bdris_sim"},
          {"version", kVersion},
          {"command", command},
          {"rows", rows},
          {"columns", columns},
          {"spec", to_json(spec)}};
}

/// CSV at `path` plus a JSON sidecar at `path` with ".json" appended to the
/// stem (results.csv -> results.json).
inline void emit_csv(const std::vector<ResultRow> &rows, const std::string &path,
                     const ExperimentSpec &spec, const std::string &command = "run") {
  write_file_atomic(path, results_to_csv(rows));
  std::string meta = path;
  const auto dot = meta.rfind('.');
  const auto slash = meta.find_last_of('/');
  if (dot != std::string::npos && (slash == std::string::npos || dot > slash))
    meta.erase(dot);
  meta += ".json";
  write_file_atomic(meta, metadata_json(spec, command, rows.size(), result_columns()).dump(2) +
                              "\n");
}

/// RFC 4180 parser: quoted fields, doubled quotes, CRLF or LF line ends.
inline std::vector<std::vector<std::string>> parse_csv(const std::string &text) {
  std::vector<std::vector<std::string>> out;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false, any = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    if (c == '"') {
      quoted = true;
      any = true;
    } else if (c == ',') {
      row.push_back(std::move(field));
      field.clear();
      any = true;
    } else if (c == '\r' || c == '\n') {
      if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n')
        ++i;
      if (any || !field.empty()) {
        row.push_back(std::move(field));
        out.push_back(std::move(row));
      }
      row.clear();
      field.clear();
      any = false;
    } else {
      field += c;
      any = true;
    }
  }
  if (quoted)
    throw ParameterError("parse_csv: unterminated quoted field");
  if (any || !field.empty()) {
    row.push_back(std::move(field));
    out.push_back(std::move(row));
  }
  return out;
}

inline std::string read_file(const std::string &path) {
  std::ifstream f(path, std::ios::binary);
  if (!f)
    throw IoError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

} // namespace bdris
