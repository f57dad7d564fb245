// Benchmark harness: experiment configuration, problem construction, the
// reference-minimum oracle, per-(method, seed) trace runs, and the
// with/without-acceleration comparison table.  Everything here is
// deterministic per configuration: identical configs produce byte-identical
// output files.
#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "catalyst/catalyst.hpp"
#include "catalyst/data.hpp"
#include "catalyst/problem.hpp"
#include "catalyst/solvers.hpp"
#include "catalyst/trace.hpp"

namespace catalyst {

enum class OutputFormat { kCsv, kJson };

const char* format_name(OutputFormat format);
OutputFormat format_from_name(const std::string& name);

// One experiment: a problem (data file or synthetic spec, always
// row-normalized), regularization, one or more methods and seeds, a cost
// budget in epochs, and output options.  Fields mirror the CLI flags one to
// one; a config file supplies the same keys as key=value lines, with flags
// taking precedence.
struct ExperimentConfig {
  // Problem source: exactly one of data_path / synthetic.
  std::string data_path;                   // libsvm text file
  std::optional<SyntheticSpec> synthetic;  // generated logistic data
  double mu = 0.0;  // squared-l2 weight, folded into the smooth part
  double l1 = 0.0;  // l1 weight

  std::vector<Method> methods;  // at least one, no duplicates
  bool catalyst_on = false;
  CatalystConfig catalyst;  // overrides; unset fields resolve per method

  long long epochs = 100;  // cost budget: epochs of n component evaluations
  std::vector<std::uint64_t> seeds = {1};

  std::string out_path;  // trace file; suffixed per method / seed when several
  OutputFormat format = OutputFormat::kCsv;
  std::string fstar_path;  // oracle cache; empty: fstar-<problem hash>.json

  void validate() const;          // everything a run needs
  void validate_problem() const;  // just the problem fields

  // Canonical key=value rendering of the problem alone (data content hash or
  // synthetic spec, plus normalization and regularization weights).  Keys the
  // reference-minimum cache; file sources are keyed by content, not path.
  std::string canonical_problem() const;
  // Canonical rendering of one (method, seed) run: the problem plus loop
  // type, acceleration parameters, budget, and seed — enough to reproduce
  // the run exactly.
  std::string canonical_run(Method method, std::uint64_t seed) const;
  std::string problem_hash() const;  // 16 hex digits
};

// FNV-1a 64-bit hash; stable across platforms, used for all config keys.
std::uint64_t fnv1a64(std::string_view bytes);
std::string hash_hex(std::uint64_t h);

// Applies one key=value entry; keys match the CLI flag names ("method",
// "synthetic", "seed", ...).  Unknown keys or malformed values throw
// ConfigError.
void apply_config_entry(ExperimentConfig& config, const std::string& key,
                        const std::string& value);
// Reads key=value lines; '#' comments and blank lines are skipped.
void load_config_file(ExperimentConfig& config, const std::string& path);

// Loads or generates the dataset, normalizes rows to unit Euclidean norm,
// and assembles logistic loss + (mu/2)||x||^2 with an optional l1 term.
CompositeObjective build_problem(const ExperimentConfig& config);

// Reference minimum of F, solved far below benchmark tolerances.
struct FstarResult {
  double fstar = 0.0;
  Vector x;
  // Guaranteed bound on fstar - F* (gradient-mapping certificate); NaN when
  // mu = 0, where only stationarity of the final iterate is available.
  double certificate = 0.0;
  double grad_norm = 0.0;  // final gradient(-mapping) norm
  double cost = 0.0;       // component evaluations spent (0 on a cache hit)
  bool from_cache = false;
};

// Minimizes F to a gradient-mapping certificate below 1e-13 * max(1, F(0))
// when mu > 0 (Newton polish when a Hessian oracle is available, otherwise a
// proximal-gradient certificate loop); for mu = 0, drives the gradient
// mapping to stationarity.  Results are cached in `cache_path`, keyed by the
// canonical problem string; a mismatched or unreadable cache is recomputed
// and overwritten.
FstarResult fstar_oracle(const CompositeObjective& problem,
                         const std::string& canonical_problem,
                         const std::string& cache_path);
// Convenience wrapper: builds the problem and resolves the cache path.
FstarResult fstar_oracle(const ExperimentConfig& config);

// Cache path for the config: fstar_path if set, else fstar-<hash>.json.
std::string resolve_fstar_path(const ExperimentConfig& config);

// Reads an oracle output file; `problem_key`, when non-null, receives the
// canonical problem string the value was computed for.  Throws ConfigError
// when the file is missing or malformed.
FstarResult load_fstar(const std::string& path, std::string* problem_key = nullptr);

// One (method, seed) run: the accelerated outer loop when catalyst_on, else
// the plain solver, budgeted by config.epochs.  The returned trace carries
// per-epoch rows plus metadata sufficient to reproduce the run.  When no
// kappa is given and the per-method rule reports no acceleration benefit
// (kappa = 0), the run falls back to the plain method and says so in the
// metadata.
RunTrace run_single(const CompositeObjective& problem,
                    const ExperimentConfig& config, Method method,
                    std::uint64_t seed);

// Output file for one (method, seed) pair: the configured path, suffixed
// with the method name and/or "-s<seed>" when several are requested.
std::string trace_output_path(const ExperimentConfig& config, Method method,
                              std::uint64_t seed);

// Runs every (method, seed) pair — in parallel worker threads capped by
// CATALYST_BENCH_THREADS — and writes one trace file per run (atomically:
// written to a temporary then renamed).  Returns the paths written.
std::vector<std::string> run_experiment(const ExperimentConfig& config);

// Epochs (cost / n) at the first trace row with
//   F(x) - fstar <= rel_threshold * (f0 - fstar);
// +infinity when the run never got there.
double epochs_to_threshold(const RunTrace& trace, double fstar, double f0,
                           double rel_threshold);

inline constexpr std::array<double, 3> kCompareThresholds = {1e-2, 1e-4, 1e-6};

// Epochs to each relative-suboptimality threshold, with and without the
// acceleration loop, median across seeds.  `ratio` = accelerated / raw
// epochs (0 when only the accelerated run got there, infinity when only the
// raw run did, NaN when neither).
struct MethodComparison {
  Method method = Method::kFg;
  std::array<double, 3> raw_epochs{};
  std::array<double, 3> accel_epochs{};
  std::array<double, 3> ratio{};
};

struct CompareSummary {
  std::string problem;
  std::string problem_hash;
  double f0 = 0.0;
  double fstar = 0.0;
  std::array<double, 3> thresholds = kCompareThresholds;
  std::vector<MethodComparison> methods;
};

// Runs each configured method with the acceleration loop off and on (same
// seeds, same budget) and tabulates epochs-to-threshold medians.
CompareSummary compare(const ExperimentConfig& config);
void write_compare(const CompareSummary& summary, OutputFormat format,
                   std::ostream& os);

// Rewrites a trace with a suboptimality column (objective - fstar) appended.
void write_report(const RunTrace& trace, double fstar, OutputFormat format,
                  std::ostream& os);

// Worker-thread cap: CATALYST_BENCH_THREADS when set (must be a positive
// integer), otherwise the hardware concurrency.
int bench_threads();

// Writes via a sibling temporary file and renames it into place.
void write_file_atomic(const std::string& path, const std::string& contents);

}  // namespace catalyst
