// catalyst-bench: command line front end for the benchmark harness.
//
// Subcommands:
//   run      solve the configured problem and write cost-indexed traces
//   fstar    compute and cache the reference minimum F*
//   report   append a suboptimality column (F - F*) to a trace
//   compare  epochs-to-threshold with and without acceleration
//
// Exit codes: 0 success, 2 configuration or data-format error, 3 numerical
// abort.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "catalyst/bench.hpp"
#include "catalyst/errors.hpp"

namespace {

using catalyst::ExperimentConfig;

// Funnels every flag through the same key=value channel the config file
// uses, so both agree on parsing and validation.  The --config option is
// declared first: CLI11 runs option callbacks in declaration order, which
// makes explicit flags override file entries no matter their position on the
// command line.
void add_entry_flag(CLI::App* cmd, ExperimentConfig& config, const std::string& flag,
                    const std::string& key, const std::string& help) {
  cmd->add_option_function<std::string>(
      flag, [&config, key](const std::string& value) { apply_config_entry(config, key, value); },
      help);
}

void add_config_flag(CLI::App* cmd, ExperimentConfig& config) {
  cmd->add_option_function<std::string>(
      "--config",
      [&config](const std::string& path) { catalyst::load_config_file(config, path); },
      "config file with one key=value per line (flags override)");
}

void add_problem_flags(CLI::App* cmd, ExperimentConfig& config) {
  add_entry_flag(cmd, config, "--data", "data", "libsvm data file");
  add_entry_flag(cmd, config, "--synthetic", "synthetic",
                 "synthetic spec n=..,p=..,seed=..[,noise=..][,cond=..][,wnorm=..]");
  add_entry_flag(cmd, config, "--mu", "mu", "squared-l2 regularization weight");
  add_entry_flag(cmd, config, "--l1", "l1", "l1 regularization weight");
}

void add_method_flags(CLI::App* cmd, ExperimentConfig& config) {
  add_entry_flag(cmd, config, "--method", "method",
                 "method(s), comma separated: fg, sag, saga, miso");
  add_entry_flag(cmd, config, "--kappa", "kappa", "acceleration smoothing (default: per-method rule)");
  add_entry_flag(cmd, config, "--rho", "rho", "accuracy decay rate (default: 0.9 sqrt(q))");
  add_entry_flag(cmd, config, "--eta", "eta", "accuracy tail exponent margin (default: 0.1)");
  add_entry_flag(cmd, config, "--alpha0", "alpha0", "momentum seed: sqrtq, golden, or root");
  add_entry_flag(cmd, config, "--epsilon-mode", "epsilon-mode", "accuracy schedule: sc or convex");
  add_entry_flag(cmd, config, "--inner-stop", "inner-stop", "subproblem stop: budget or certificate");
  add_entry_flag(cmd, config, "--epochs", "epochs", "cost budget in epochs (n units each)");
  add_entry_flag(cmd, config, "--seed", "seed", "seed(s), comma separated");
}

void write_or_print(const std::string& out_path, const std::string& contents) {
  if (out_path.empty()) {
    std::cout << contents;
    return;
  }
  catalyst::write_file_atomic(out_path, contents);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"benchmark harness for accelerated first-order composite optimization"};
  app.require_subcommand(1);

  ExperimentConfig config;

  CLI::App* run = app.add_subcommand("run", "solve and write cost-indexed traces");
  add_config_flag(run, config);
  add_problem_flags(run, config);
  add_method_flags(run, config);
  add_entry_flag(run, config, "--catalyst", "catalyst", "acceleration loop: on or off");
  add_entry_flag(run, config, "--out", "out", "trace output path (suffixed per method/seed)");
  add_entry_flag(run, config, "--format", "format", "output format: csv or json");

  CLI::App* fstar = app.add_subcommand("fstar", "compute and cache the reference minimum");
  add_config_flag(fstar, config);
  add_problem_flags(fstar, config);
  add_entry_flag(fstar, config, "--out", "fstar",
                 "output/cache path (default: fstar-<problem hash>.json)");

  CLI::App* report = app.add_subcommand("report", "append a suboptimality column to a trace");
  std::string report_in, report_fstar, report_out, report_format = "csv";
  report->add_option("--in", report_in, "trace CSV produced by run")->required();
  report->add_option("--fstar", report_fstar, "reference-minimum JSON produced by fstar")
      ->required();
  report->add_option("--out", report_out, "output path (default: stdout)");
  report->add_option("--format", report_format, "output format: csv or json");

  CLI::App* compare = app.add_subcommand(
      "compare", "epochs to suboptimality thresholds, with and without acceleration");
  add_config_flag(compare, config);
  add_problem_flags(compare, config);
  add_method_flags(compare, config);
  add_entry_flag(compare, config, "--fstar", "fstar", "reference-minimum cache path");
  add_entry_flag(compare, config, "--out", "out", "summary output path (default: stdout)");
  add_entry_flag(compare, config, "--format", "format", "output format: csv or json");

  try {
    try {
      app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
      const int code = app.exit(e);
      return code == 0 ? 0 : 2;
    }

    if (run->parsed()) {
      if (config.out_path.empty()) {
        throw catalyst::ConfigError("run requires --out");
      }
      for (const std::string& path : catalyst::run_experiment(config)) {
        std::cout << path << "\n";
      }
    } else if (fstar->parsed()) {
      const catalyst::FstarResult result = catalyst::fstar_oracle(config);
      std::cout << "fstar=" << catalyst::format_double(result.fstar) << "\n";
      if (!std::isnan(result.certificate)) {
        std::cout << "certificate=" << catalyst::format_double(result.certificate) << "\n";
      }
      std::cout << "grad_norm=" << catalyst::format_double(result.grad_norm) << "\n";
      std::cout << "cache=" << catalyst::resolve_fstar_path(config) << "\n";
      std::cout << "cached=" << (result.from_cache ? "1" : "0") << "\n";
    } else if (report->parsed()) {
      std::ifstream in(report_in);
      if (!in) {
        throw catalyst::ConfigError("cannot open trace file: " + report_in);
      }
      const catalyst::RunTrace trace = catalyst::RunTrace::read_csv(in);
      std::string ref_problem;
      const catalyst::FstarResult ref = catalyst::load_fstar(report_fstar, &ref_problem);
      const std::string* trace_problem = trace.find_meta("problem");
      if (trace_problem == nullptr) {
        throw catalyst::ConfigError("trace has no problem metadata; cannot match it "
                                    "against the reference minimum");
      }
      if (*trace_problem != ref_problem) {
        throw catalyst::ConfigError("reference minimum was computed for a different "
                                    "problem than the trace");
      }
      std::ostringstream os;
      catalyst::write_report(trace, ref.fstar, catalyst::format_from_name(report_format), os);
      write_or_print(report_out, os.str());
    } else if (compare->parsed()) {
      const catalyst::CompareSummary summary = catalyst::compare(config);
      std::ostringstream os;
      catalyst::write_compare(summary, config.format, os);
      write_or_print(config.out_path, os.str());
    }
    return 0;
  } catch (const catalyst::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const catalyst::DataFormatError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const catalyst::NumericError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
