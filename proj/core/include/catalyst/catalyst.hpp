// Accelerated inexact proximal-point outer loop.  Wraps any of the inner
// solvers around the subproblems
//   G_k(x) = F(x) + (kappa/2) ||x - y_{k-1}||^2,
// solved to accuracy eps_k, with Nesterov-style extrapolation
//   y_k = x_k + beta_k (x_k - x_{k-1})
// driven by the momentum sequence alpha_k.
#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "catalyst/problem.hpp"
#include "catalyst/rng.hpp"
#include "catalyst/solvers.hpp"

namespace catalyst {

// q = mu / (mu + kappa), the inverse condition number of the subproblems.
double catalyst_q(double mu, double kappa);

// alpha_k: the root in (0, 1] of a^2 = (1 - a) alpha_prev^2 + q a, computed
// as ((q - alpha_prev^2) + sqrt((q - alpha_prev^2)^2 + 4 alpha_prev^2)) / 2.
// sqrt(q) is its fixed point.
double alpha_next(double alpha_prev, double q);

// beta_k = alpha_prev (1 - alpha_prev) / (alpha_prev^2 + alpha_next), in [0, 1].
double beta_coeff(double alpha_prev, double alpha_next);

enum class Alpha0Mode {
  kAuto,    // kSqrtQ when mu > 0, else kGolden
  kSqrtQ,   // alpha_0 = sqrt(q): the fixed point of the alpha recursion
  kGolden,  // alpha_0 = (sqrt(5) - 1) / 2: solves alpha^2 = 1 - alpha
  kRoot,    // positive root of alpha^2 + (1 - q) alpha - 1 = 0
};

double alpha0_value(Alpha0Mode mode, double q);

// "auto" / "sqrtq" / "golden" / "root".
const char* alpha0_mode_name(Alpha0Mode mode);
Alpha0Mode alpha0_mode_from_name(const std::string& name);

enum class EpsilonMode {
  kAuto,            // kStronglyConvex when mu > 0, else kConvex
  kStronglyConvex,  // eps_k = (2/9) gap (1 - rho)^k
  kConvex,          // eps_k = 2 gap / (9 (k + 2)^(4 + eta))
};

// Subproblem accuracy schedule.  `f0_gap` is an upper bound on F(x_0) - F*
// (F(x_0) itself for nonnegative objectives).
struct EpsilonSchedule {
  EpsilonMode mode = EpsilonMode::kStronglyConvex;
  double f0_gap = 0.0;
  double rho = 0.0;  // decay rate, strongly convex mode; must satisfy rho < sqrt(q)
  double eta = 0.1;  // tail exponent margin, convex mode

  double operator()(int k) const;  // k >= 1
};

// "auto" / "sc" / "convex".
const char* epsilon_mode_name(EpsilonMode mode);
EpsilonMode epsilon_mode_from_name(const std::string& name);

enum class InnerStopMode {
  kAuto,         // kCertificate for fg/miso, kBudget for sag/saga
  kBudget,       // fixed step count per subproblem (theoretical when not set)
  kCertificate,  // run until the solver's bound certifies eps_k
};

enum class WarmStartMode {
  kAuto,               // fg/sag: kPrevIterate; saga: kExtrapolatedShift;
                       // miso: kMisoShift
  kPrevIterate,        // start the subproblem at x_{k-1}
  kExtrapolatedShift,  // start at x_{k-1} + kappa/(mu+kappa)(y_{k-1} - y_{k-2})
  kMisoShift,          // shift the anchors by kappa/(mu+kappa)(y_{k-1} - y_{k-2})
};

// "auto" / "budget" / "certificate".
const char* inner_stop_name(InnerStopMode mode);
InnerStopMode inner_stop_from_name(const std::string& name);

// "auto" / "prev" / "shift" / "miso-shift".
const char* warm_start_name(WarmStartMode mode);
WarmStartMode warm_start_from_name(const std::string& name);

struct CatalystConfig {
  double kappa = 0.0;  // required > 0
  Alpha0Mode alpha0 = Alpha0Mode::kAuto;
  EpsilonMode epsilon_mode = EpsilonMode::kAuto;
  double rho = -1.0;  // < 0: defaults to 0.9 sqrt(q)
  double eta = 0.1;
  double f0_upper = -1.0;  // < 0: defaults to F(x_0), valid for nonnegative F
  InnerStopMode inner_stop = InnerStopMode::kAuto;
  WarmStartMode warm_start = WarmStartMode::kAuto;
  // kBudget: steps per subproblem.  Negative derives the theoretical budget
  // from the inner solver's rate (rounded up to whole epochs for incremental
  // methods); 0 is honored literally (the subproblem returns its warm start).
  long long inner_budget_steps = -1;
  double budget_scale = 1.0;  // multiplies the argument of the budget log
  // Safety cap on certificate-mode inner steps per subproblem.
  long long inner_step_cap = 2'000'000'000LL;
  double inner_step = 0.0;  // inner step-size override (0: method default)
};

// Validated, fully resolved run parameters (defaults substituted).
struct CatalystPlan {
  Method method = Method::kFg;
  double kappa = 0.0;
  double mu = 0.0;  // strong convexity of the objective being accelerated
  double q = 0.0;
  double alpha0 = 0.0;
  double rho = 0.0;
  double eta = 0.1;
  double f0_upper = 0.0;
  EpsilonMode epsilon_mode = EpsilonMode::kStronglyConvex;
  InnerStopMode inner_stop = InnerStopMode::kCertificate;
  WarmStartMode warm_start = WarmStartMode::kPrevIterate;
  double tau = 0.0;  // inner solver's linear rate on the subproblems
  long long inner_budget_steps = -1;
  double budget_scale = 1.0;
  long long inner_step_cap = 0;
  double inner_step = 0.0;

  EpsilonSchedule schedule() const;
  // Budget-mode inner steps for outer iteration k (whole epochs for the
  // incremental methods; plain iterations for fg).
  long long budget_for(int k, int n) const;
};

CatalystPlan plan_catalyst(const CompositeObjective& obj, Method method,
                           const CatalystConfig& config, double f0_at_x0);

struct CatalystState {
  CatalystPlan plan;
  int k = 0;  // completed outer iterations
  Vector x, x_prev;
  Vector y, y_prev;  // y_{k} and y_{k-1}; both x_0 initially
  double alpha = 0.0;  // alpha_k
  double cost = 0.0;   // cumulative cost units including inner init passes
  Rng rng{0};
  // Inner-solver carryover across subproblems (tables/anchors survive the
  // center move and are migrated in place).
  std::optional<SagState> sag;
  std::optional<SagaState> saga;
  std::optional<MisoProxState> miso;
};

struct OuterRecord {
  int k = 0;
  double cost = 0.0;       // cumulative cost units at the end of iteration k
  double objective = 0.0;  // F(x_k)
  double eps_k = 0.0;
  // Subproblem bound at exit (NaN when the inner solver has no certificate).
  double inner_certificate = std::numeric_limits<double>::quiet_NaN();
  long long inner_steps = 0;
  double alpha = 0.0;  // alpha_k
  double beta = 0.0;   // beta_k used for the extrapolation to y_k
  // Theoretical bound on F(x_k) - F* (NaN outside the strongly convex mode).
  double envelope = std::numeric_limits<double>::quiet_NaN();
  bool inner_truncated = false;  // stopped by the unit cap, not its stop rule
};

// Validates the configuration and prepares the loop at x0.  F(x_0) is
// evaluated once for the accuracy schedule default.
CatalystState catalyst_init(const CompositeObjective& obj, Method method,
                            const CatalystConfig& config, const Vector& x0,
                            std::uint64_t seed);

// Runs one outer iteration: builds the subproblem at y_{k-1}, warm-starts the
// inner solver, solves to eps_k (certificate mode) or for the planned budget,
// then extrapolates.  Appends one row per inner epoch plus an outer marker
// row to `trace` when given.  `max_units` caps the inner solver's cost (the
// iteration still completes, flagged as truncated).
OuterRecord outer_step(const CompositeObjective& obj, CatalystState& state,
                       RunTrace* trace = nullptr,
                       double max_units = std::numeric_limits<double>::infinity());

struct RunBudget {
  long long max_outer = 1'000'000;
  double max_cost_units = std::numeric_limits<double>::infinity();
  // Optional early exit once F(x_k) <= target_objective + target_slack.
  double target_objective = std::numeric_limits<double>::quiet_NaN();
  double target_slack = 0.0;
};

struct CatalystRun {
  Vector x;
  double objective = 0.0;
  double cost = 0.0;
  int outer_iterations = 0;
  bool cost_exhausted = false;  // stopped by max_cost_units
  bool target_reached = false;
  std::vector<OuterRecord> outer;
  RunTrace trace;  // per-epoch rows of F plus one marker row per outer step
};

// Loops outer_step until the target, the outer cap, or the cost cap fires.
// Fails with ConfigError on inconsistent parameters (kappa <= 0, strongly
// convex schedule with mu = 0, rho >= sqrt(q), certificate mode with
// sag/saga, ...).
CatalystRun run_catalyst(const CompositeObjective& obj, Method method,
                         const CatalystConfig& config, const Vector& x0,
                         std::uint64_t seed, const RunBudget& budget = {});

}  // namespace catalyst
