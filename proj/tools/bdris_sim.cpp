// bdris_sim: command-line front end for the BD-RIS cell-free experiments.
//
//   bdris_sim run        --config exp.json --out results/ [--threads 4]
//   bdris_sim complexity --config complexity.json --out results/
//   bdris_sim trace      --config exp.json --out results/ [--trial 3]
//
// Exit status: 0 success, 2 configuration error, 3 I/O error, 1 anything else.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "bdris/csv.hpp"

namespace {

struct CommonArgs {
  std::string config;
  std::string out = ".";
  std::uint64_t seed = 0;
  bool seed_set = false;
  int threads = 1;
  std::string solvers;
  int trials = 0;
};

bdris::ExperimentSpec load_spec(const CommonArgs &args) {
  nlohmann::json j = nlohmann::json::object();
  if (!args.config.empty()) {
    const std::string text = bdris::read_file(args.config);
    try {
      j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error &e) {
      throw bdris::ParameterError(args.config + ": " + e.what());
    }
  }
  auto spec = bdris::experiment_spec_from_json(j);
  if (args.seed_set)
    spec.base_seed = args.seed;
  if (args.trials > 0)
    spec.trials = args.trials;
  if (!args.solvers.empty()) {
    spec.solvers.clear();
    std::stringstream ss(args.solvers);
    for (std::string name; std::getline(ss, name, ',');)
      if (!name.empty())
        spec.solvers.push_back(bdris::parse_solver(name));
  }
  spec.validate();
  return spec;
}

std::string output_path(const CommonArgs &args, const std::string &file) {
  std::filesystem::path dir(args.out);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec)
    throw bdris::IoError("cannot create output directory '" + args.out + "': " + ec.message());
  return (dir / file).string();
}

void write_trace_files(const std::vector<bdris::TraceSeries> &series, const std::string &path,
                       const bdris::ExperimentSpec &spec, const std::string &command) {
  bdris::write_file_atomic(path, bdris::traces_to_csv(series));
  const std::string meta = path.substr(0, path.size() - 4) + ".json";
  bdris::write_file_atomic(
      meta, bdris::metadata_json(spec, command, series.size(), bdris::trace_columns()).dump(2) +
                "\n");
}

int count_failures(const std::vector<bdris::ResultRow> &rows) {
  int n = 0;
  for (const auto &r : rows)
    if (!r.ok()) {
      ++n;
      std::cerr << "warning: " << r.architecture << "/" << r.solver << " trial " << r.trial
                << ": " << r.status << "\n";
    }
  return n;
}

int cmd_run(const CommonArgs &args) {
  const auto spec = load_spec(args);
  const auto outs = bdris::run_experiment_traced(spec, args.threads);
  std::vector<bdris::ResultRow> rows;
  std::vector<bdris::TraceSeries> series;
  for (const auto &o : outs) {
    rows.push_back(o.row);
    if (spec.write_traces && o.row.ok())
      series.push_back(bdris::trace_series(o));
  }
  const auto path = output_path(args, spec.name + ".csv");
  bdris::emit_csv(rows, path, spec, "run");
  if (spec.write_traces)
    write_trace_files(series, output_path(args, spec.name + "_traces.csv"), spec, "run");
  const int failed = count_failures(rows);
  std::cout << "wrote " << rows.size() << " rows to " << path;
  if (failed)
    std::cout << " (" << failed << " flagged)";
  std::cout << "\n";
  return 0;
}

int cmd_complexity(const CommonArgs &args) {
  const auto spec = load_spec(args);
  const auto rows = bdris::compare_complexity(spec);
  const auto path = output_path(args, spec.name + "_complexity.csv");
  bdris::emit_csv(rows, path, spec, "complexity");
  count_failures(rows);
  std::cout << "wrote " << rows.size() << " rows to " << path << "\n";
  return 0;
}

int cmd_trace(const CommonArgs &args, int trial) {
  const auto spec = load_spec(args);
  const auto series = bdris::trace_experiment(spec, trial, args.threads);
  const auto path = output_path(args, spec.name + "_trace.csv");
  write_trace_files(series, path, spec, "trace");
  std::cout << "wrote " << series.size() << " traces to " << path << "\n";
  return 0;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"BD-RIS cell-free beamforming experiments"};
  app.require_subcommand(1);

  CommonArgs args;
  int trial = 0;
  auto add_common = [&](CLI::App *sub) {
    sub->add_option("--config", args.config, "experiment JSON file (defaults if omitted)")
        ->check(CLI::ExistingFile);
    sub->add_option("--out", args.out, "output directory")->capture_default_str();
    sub->add_option_function<std::uint64_t>(
        "--seed",
        [&](const std::uint64_t &s) {
          args.seed = s;
          args.seed_set = true;
        },
        "override base_seed");
    sub->add_option("--threads", args.threads, "worker threads")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    sub->add_option("--solver", args.solvers, "comma-separated subset of rlbfgs,rbfgs,rcg");
    sub->add_option("--trials", args.trials, "override the trial count")
        ->check(CLI::PositiveNumber);
  };
  auto *run = app.add_subcommand("run", "Monte-Carlo AO runs over the configured sweep");
  auto *cx = app.add_subcommand("complexity", "passive-solver iteration/time benchmark");
  auto *tr = app.add_subcommand("trace", "per-iteration AO trace of a single trial");
  add_common(run);
  add_common(cx);
  add_common(tr);
  tr->add_option("--trial", trial, "trial index")->check(CLI::NonNegativeNumber);

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed())
      return cmd_run(args);
    if (cx->parsed())
      return cmd_complexity(args);
    return cmd_trace(args, trial);
  } catch (const bdris::IoError &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument &e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
