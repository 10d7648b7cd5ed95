#include "tanred/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "tanred/error.hpp"
#include "tanred/model_io.hpp"
#include "tanred/reducer.hpp"
#include "tanred/report.hpp"

namespace tanred {

namespace fs = std::filesystem;

namespace {

struct Options {
  std::string model;
  std::string format = "auto";
  std::string strategy = "max-error";
  std::string grid_file;
  double omega_min = 1e-1;
  double omega_max = 1e2;
  int K = 100;
  std::uint64_t seed = 0;
  double mu = 1e-3;
  double rho = 0.95;
  long max_order = 40;
  double gamma_tol = 1e-8;
  std::optional<double> error_tol;
  int max_iters = 200;
  std::vector<long> orders;
  std::string baseline;
  std::string out = "tanred";
  bool timing = false;
};

void add_common(CLI::App* cmd, Options& o) {
  cmd->add_option("--model", o.model, "Model path (dense text file, .mtx directory or prefix)")
      ->required();
  cmd->add_option("--format", o.format, "auto | dense | mtx")
      ->check(CLI::IsMember({"auto", "dense", "txt", "mtx", "matrix-market"}));
  cmd->add_option("--strategy", o.strategy, "max-error | discrete | random")
      ->check(CLI::IsMember({"max-error", "discrete", "random"}));
  cmd->add_option("--grid-file", o.grid_file, "Frequencies for the discrete strategy");
  cmd->add_option("--omega-min", o.omega_min, "Lower frequency bound (random, default grid)");
  cmd->add_option("--omega-max", o.omega_max, "Upper frequency bound (random, default grid)");
  cmd->add_option("--K", o.K, "Random draws / default grid size")->check(CLI::PositiveNumber);
  cmd->add_option("--seed", o.seed, "Seed of the random strategy");
  cmd->add_option("--mu", o.mu, "Relative frequency merge tolerance");
  cmd->add_option("--rho", o.rho, "Singular value cutoff ratio in (0, 1]");
  cmd->add_option("--max-order", o.max_order, "Stop at this reduced order");
  cmd->add_option("--gamma-tol", o.gamma_tol, "Stop when gamma <= tol * gamma0");
  cmd->add_option("--error-tol", o.error_tol, "Stop when the relative error norm <= tol");
  cmd->add_option("--max-iters", o.max_iters, "Iteration limit");
  cmd->add_option("--out", o.out, "Output prefix");
  cmd->add_flag("--timing", o.timing, "Record wall-clock seconds (breaks byte-identical reruns)");
}

std::vector<double> read_grid(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoError, "cannot open grid file " + path);
  std::vector<double> grid;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = line.substr(0, line.find('#'));
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    std::string tok;
    while (ls >> tok) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(tok, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != tok.size() || !std::isfinite(v) || v < 0.0)
        throw Error(ErrorKind::ParseError,
                    path + ":" + std::to_string(lineno) + ": bad frequency '" + tok + "'");
      grid.push_back(v);
    }
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

std::vector<double> log_grid(double lo, double hi, int k) {
  if (!(lo > 0.0 && lo < hi))
    throw Error(ErrorKind::InvalidArgument, "need 0 < omega-min < omega-max");
  std::vector<double> g;
  if (k == 1) return {lo};
  const double a = std::log10(lo);
  const double b = std::log10(hi);
  for (int i = 0; i < k; ++i) g.push_back(std::pow(10.0, a + (b - a) * i / (k - 1)));
  return g;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error(ErrorKind::IoError, "cannot create " + path);
  f << text;
  f.flush();
  if (!f) throw Error(ErrorKind::IoError, "write failed: " + path);
}

int exit_code_for(ErrorKind k) {
  switch (k) {
    case ErrorKind::IoError:
    case ErrorKind::ParseError: return kExitIo;
    case ErrorKind::UsageError:
    case ErrorKind::InvalidArgument:
    case ErrorKind::EmptyGrid: return kExitUsage;
    default: return kExitNumeric;
  }
}

int execute(const std::string& command, const Options& o, std::ostream& out) {
  using Clock = std::chrono::steady_clock;
  const auto t0 = Clock::now();

  const ModelFormat format = parse_model_format(o.format);
  const StateSpace sys = load_model(o.model, format);
  const bool dense_in =
      format == ModelFormat::DenseText ||
      (format == ModelFormat::Auto && fs::is_regular_file(o.model) && fs::path(o.model).extension() != ".mtx");

  ReducerConfig cfg;
  cfg.strategy.kind = o.strategy == "discrete" ? StrategyKind::Discrete
                      : o.strategy == "random" ? StrategyKind::Random
                                               : StrategyKind::MaxError;
  cfg.strategy.omega_min = o.omega_min;
  cfg.strategy.omega_max = o.omega_max;
  cfg.strategy.K = o.K;
  cfg.strategy.seed = o.seed;
  if (cfg.strategy.kind == StrategyKind::Discrete)
    cfg.strategy.grid = o.grid_file.empty() ? log_grid(o.omega_min, o.omega_max, o.K) : read_grid(o.grid_file);
  cfg.mu = o.mu;
  cfg.rho = o.rho;
  cfg.max_order = o.max_order;
  cfg.gamma_rel_tol = o.gamma_tol;
  cfg.error_rel_tol = o.error_tol;
  cfg.max_iters = o.max_iters;
  cfg.timing = o.timing;

  const std::string baseline = o.baseline.empty() ? (command == "sweep" ? "balanced" : "none") : o.baseline;
  RunReport report;
  report.command = command;
  report.config = {{"model", o.model},
                   {"format", o.format},
                   {"strategy", o.strategy},
                   {"grid-file", o.grid_file},
                   {"omega-min", fmt(o.omega_min)},
                   {"omega-max", fmt(o.omega_max)},
                   {"K", std::to_string(o.K)},
                   {"seed", std::to_string(o.seed)},
                   {"mu", fmt(o.mu)},
                   {"rho", fmt(o.rho)},
                   {"max-order", std::to_string(o.max_order)},
                   {"gamma-tol", fmt(o.gamma_tol)},
                   {"error-tol", o.error_tol ? fmt(*o.error_tol) : "none"},
                   {"max-iters", std::to_string(o.max_iters)},
                   {"baseline", baseline},
                   {"out", o.out}};

  ReductionTrace trace;
  if (command == "sweep") {
    std::vector<Index> orders(o.orders.begin(), o.orders.end());
    std::string joined;
    for (const long k : o.orders) joined += (joined.empty() ? "" : ",") + std::to_string(k);
    report.config["orders"] = joined;
    report.compare = sweep_orders(sys, cfg, orders, baseline == "balanced", &trace);
  } else {
    trace = reduce(sys, cfg);
    if (baseline == "balanced" && trace.data.total_order() > 0) {
      CompareRow row;
      row.order = row.tangential_order = trace.data.total_order();
      row.tangential_error = trace.rows.back().error_norm;
      row.balanced_error = std::numeric_limits<double>::quiet_NaN();
      if (row.order <= sys.states())
        row.balanced_error =
            error_norm(sys, balanced_truncation(sys, row.order), fallback_grid(sys)).value;
      report.compare.push_back(row);
    }
  }
  report.gamma0 = trace.gamma0;
  report.stop_reason = stop_reason_name(trace.stop);
  report.failure = trace.failure;
  report.trace = trace.rows;
  report.model = trace.reduced;
  report.total_seconds =
      o.timing ? std::chrono::duration<double>(Clock::now() - t0).count() : 0.0;

  write_text(o.out + ".trace.csv", trace_csv(report.trace));
  write_text(o.out + ".compare.csv", compare_csv(report.compare));
  if (dense_in) save_model(report.model, o.out + ".model.txt", ModelFormat::DenseText);
  else save_model(report.model, o.out + ".model", ModelFormat::MatrixMarket);
  write_text(o.out + ".report.json-lines", to_json_lines(report));

  out << command << ": order " << trace.data.total_order() << ", iterations " << trace.rows.size()
      << ", gamma/gamma0 "
      << (trace.gamma0 > 0.0 && !trace.rows.empty() ? trace.rows.back().gamma / trace.gamma0 : 0.0)
      << ", stop " << report.stop_reason;
  if (!trace.failure.empty()) out << " (" << trace.failure << ")";
  out << '\n';
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Iterative low-rank tangential interpolation model reduction", "tanred"};
  app.require_subcommand(1);
  Options o;
  CLI::App* reduce_cmd = app.add_subcommand("reduce", "Reduce a model");
  CLI::App* sweep_cmd = app.add_subcommand("sweep", "Error versus order, optionally against balanced truncation");
  add_common(reduce_cmd, o);
  add_common(sweep_cmd, o);
  for (CLI::App* cmd : {reduce_cmd, sweep_cmd})
    cmd->add_option("--baseline", o.baseline, "none | balanced")->check(CLI::IsMember({"none", "balanced"}));
  sweep_cmd->add_option("--orders", o.orders, "Comma-separated reduced orders")->required()->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n\n";
    const CLI::App* sub = reduce_cmd->parsed() ? reduce_cmd : sweep_cmd->parsed() ? sweep_cmd : &app;
    err << sub->help();
    return kExitUsage;
  }

  const std::string command = reduce_cmd->parsed() ? "reduce" : "sweep";
  try {
    return execute(command, o, out);
  } catch (const Error& e) {
    err << "error: " << e.name() << ": " << e.what() << '\n';
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitNumeric;
  }
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());
  return run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace tanred
