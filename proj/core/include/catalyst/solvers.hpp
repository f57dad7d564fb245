// First-order solvers for composite finite sums: full proximal gradient (FG)
// and the incremental methods SAG, SAGA and MISO-Prox.  Each solver exposes
// its state struct and a single-step function so that outer loops can drive
// them directly; `solve` wraps them behind uniform stop rules with per-epoch
// progress records.
//
// Default step sizes (L = smooth Lipschitz constant, mu = strong convexity
// of the composite, n = number of components):
//   FG    1/L
//   SAG   1/(16 L)
//   SAGA  1/(2 (mu n + L)) when mu > 0, else 1/(3 L)
//   MISO  delta = min(1, n mu / (2 (L - mu))) mixing weight
#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>

#include "catalyst/problem.hpp"
#include "catalyst/rng.hpp"
#include "catalyst/trace.hpp"

namespace catalyst {

enum class Method { kFg, kSag, kSaga, kMisoProx };

std::string method_name(Method m);
std::optional<Method> method_from_name(const std::string& name);

// Uniform stopping rule.  Certificate rules apply only to solvers that carry
// a computable optimality certificate (FG via the gradient mapping, MISO-Prox
// via its lower bound); gradient-mapping rules only to FG.
struct StopRule {
  enum class Kind { kBudget, kCertificateBelow, kGradMapBelow, kTargetValue };

  Kind kind = Kind::kBudget;
  long long budget_steps = 0;  // kBudget: solver steps (FG steps count as one)
  double threshold = 0.0;      // certificate bound / mapping norm / target slack
  double target = 0.0;         // kTargetValue objective level
  // Hard step cap for the non-budget rules so a mis-tuned run terminates.
  long long step_cap = 2'000'000'000LL;

  static StopRule budget(long long steps);
  static StopRule certificate_below(double eps);
  static StopRule grad_map_below(double eps);
  static StopRule target_value(double target, double eps);
};

enum class StopReason {
  kBudgetExhausted,
  kCertificateReached,
  kGradMapReached,
  kTargetReached,
  kStepCap,
};

std::string stop_reason_name(StopReason r);

// ---------------------------------------------------------------------------
// Full proximal gradient

struct FgState {
  Vector x;
  double step = 0.0;
  // ||L (x_pre - x_post)|| from the most recent step (pre-step point).
  double grad_map_norm = std::numeric_limits<double>::infinity();
};

FgState make_fg(const CompositeObjective& obj, Vector x0, double step = 0.0);

// One step x <- prox_{step psi}(x - step grad f(x)).  Returns the gradient
// mapping norm ||x_pre - x_post|| / step.  Cost: n units.
double fg_step(const CompositeObjective& obj, FgState& s);

// Upper bound on F(x) - F* at the current (post-step) iterate:
// ||g||^2 / (2 mu) with g the gradient mapping at the pre-step point.
// Requires strong convexity > 0 and at least one completed step.
double fg_certificate(const CompositeObjective& obj, const FgState& s);

// ---------------------------------------------------------------------------
// SAG

struct SagState {
  Vector x;
  Matrix table;       // p x n stored component gradients
  Vector table_mean;  // running mean of the table columns
  double step = 0.0;
};

// Builds the gradient table with one full pass at x0 (cost n units).
SagState make_sag(const CompositeObjective& obj, Vector x0, double step = 0.0);

// Refresh slot i at the current iterate, then a prox step along the table
// mean.  Cost: 1 unit.
void sag_step(const CompositeObjective& obj, SagState& s, int i);

// ---------------------------------------------------------------------------
// SAGA

struct SagaState {
  Vector x;
  Matrix table;
  Vector table_mean;
  double step = 0.0;
};

SagaState make_saga(const CompositeObjective& obj, Vector x0, double step = 0.0);

// Unbiased estimate grad f_i(x) - table_i + mean, prox step, then table
// refresh of slot i.  Cost: 1 unit.
void saga_step(const CompositeObjective& obj, SagaState& s, int i);

// The estimate SAGA would step along at the current iterate, without
// advancing the state (test hook for the unbiasedness property).
Vector saga_gradient_estimate(const CompositeObjective& obj, const SagaState& s, int i);

// ---------------------------------------------------------------------------
// MISO-Prox

enum class MisoInit {
  // Anchor every component lower bound at the sum's uniform quadratic
  // minorant (all-zero anchors for l2-regularized nonnegative losses).
  // Free, but requires SmoothSum::quadratic_minorant.
  kAnchors,
  // Tight lower bounds from one gradient pass at a start point (cost n).
  kOnePass,
};

struct MisoProxState {
  Matrix z;        // p x n component anchors
  Vector zbar;     // running mean of the anchors
  Vector cprime;   // component offsets c'_i = c_i + (mu/2) ||z_i||^2
  Vector x;        // prox_{psi / mu}(zbar)
  double delta = 0.0;
  double mu = 0.0;  // component strong convexity of the objective
};

// Requires component strong convexity > 0.  `start` is the expansion point
// for kOnePass (ignored by kAnchors).
MisoProxState make_miso(const CompositeObjective& obj, MisoInit init, const Vector& start);

// Init mode `solve` picks when not specified: kAnchors when the minorant is
// available, else kOnePass.
MisoInit default_miso_init(const CompositeObjective& obj);

// delta-mixed lower-bound update of component i, then x <- prox(zbar).
// Cost: 1 unit.
void miso_prox_step(const CompositeObjective& obj, MisoProxState& s, int i);

// Certificate F(x) - D(x) >= F(x) - F* at the current iterate.  One pass of
// component values (not charged as solver cost).
double miso_certificate(const CompositeObjective& obj, const MisoProxState& s);

// The lower-bound model D evaluated at an arbitrary point (test hook).
double miso_lower_bound(const CompositeObjective& obj, const MisoProxState& s,
                        const Vector& at);

// ---------------------------------------------------------------------------
// Proximal-center migration (used when the outer loop moves the center of
// the kappa-quadratic from y_old to y_new without restarting inner state).

// Stored component gradients of F + (kappa/2)||x - y||^2 change by the
// constant kappa (y_old - y_new) when the center moves; apply it to a table.
void recenter_gradient_table(double kappa, const Vector& y_old, const Vector& y_new,
                             Matrix& table, Vector& table_mean);

// MISO anchors shift by (kappa/mu)(y_new - y_old), offsets pick up
// (kappa/2)(||y_new||^2 - ||y_old||^2); x is refreshed from the new zbar.
void recenter_miso(const CompositeObjective& obj, double kappa, const Vector& y_old,
                   const Vector& y_new, MisoProxState& s);

// ---------------------------------------------------------------------------
// One-shot driver

struct SolveOptions {
  double step = 0.0;  // per-method default when 0
  std::optional<MisoInit> miso_init;
  bool record_trace = true;
  // Objective recorded in the trace (defaults to the solved objective);
  // outer loops pass the unshifted objective here.
  const CompositeObjective* trace_objective = nullptr;
};

struct SolveResult {
  Vector x;
  StopReason reason = StopReason::kBudgetExhausted;
  long long steps = 0;   // solver steps taken
  double cost = 0.0;     // cost units including initialization passes
  double objective = 0.0;
  double certificate = std::numeric_limits<double>::quiet_NaN();
  RunTrace trace;
};

// Runs `method` on `obj` from x0 until the stop rule fires.  Progress is
// recorded once per epoch (every FG step).  When a target-value rule runs out
// of budget, the best recorded iterate is returned instead of the last one.
SolveResult solve(const CompositeObjective& obj, Method method, StopRule stop,
                  std::uint64_t seed, const Vector& x0, const SolveOptions& options = {});

}  // namespace catalyst
