// Closed-form calculators for the convergence rates, inner-loop budgets and
// complexity estimates attached to the accelerated proximal-point scheme:
// bound envelopes, the momentum product lambda_k and its bounds, per-method
// linear rates tau on the shifted subproblems, kappa selection rules, and the
// before/after acceleration complexity table.
#pragma once

#include <functional>
#include <limits>
#include <vector>

#include "catalyst/solvers.hpp"

namespace catalyst {

// --------------------------------------------------------------------------
// Bound envelopes

// Strongly convex envelope after k outer iterations:
//   (8 / (sqrt(q) - rho)^2) (1 - rho)^(k+1) f0_gap,   0 < rho < sqrt(q).
double sc_envelope(int k, double q, double rho, double f0_gap);

// Non-strongly-convex envelope:
//   (8 / (k+2)^2) ((1 + 2/eta)^2 f0_gap + (kappa/2) dist0_sq).
double nonsc_envelope(int k, double eta, double kappa, double f0_gap, double dist0_sq);

// --------------------------------------------------------------------------
// Inner-loop budgets (iterations of an inner solver with linear rate tau)

// Strongly convex mode: ceil(ln(scale * R) / tau) with
//   R = 2/(1 - rho) + 2592 kappa / (mu (1 - rho)^2 (sqrt(q) - rho)^2).
// `scale` is the unspecified rate prefactor of the inner method (default 1).
long long inner_budget_sc(double tau, double q, double rho, double kappa, double mu,
                          double scale = 1.0);

// Non-strongly-convex mode, outer iteration k: ceil((t0 / tau) ln(k + 2)).
// The default t0 matches the (k+2)^(4+eta) decay of the accuracy schedule at
// eta = 0.1.
long long inner_budget_nonsc(double tau, int k, double t0 = 4.1);

// Expected iterations for a randomized solver with bound
// E[G(z_t) - G*] <= C (1 - tau)^t to certify accuracy eps:
//   E[T(eps)] <= (1/tau) ln(2 C / (tau eps)) + 1.
double expected_stop_bound(double tau, double C, double eps);

// --------------------------------------------------------------------------
// Momentum sequence diagnostics

// Extends the alpha recursion from alpha_0 and caches the products
// lambda_k = prod_{i<k} (1 - alpha_i), lambda_0 = 1.
class RateSchedule {
 public:
  RateSchedule(double alpha0, double q);

  double q() const { return q_; }
  double alpha(int k) const;   // alpha_k, k >= 0
  double lambda(int k) const;  // lambda_k, k >= 0

 private:
  void extend(int k) const;

  double q_ = 0.0;
  mutable std::vector<double> alpha_;
  mutable std::vector<double> lambda_;
};

// gamma_0 = alpha_0 ((kappa + mu) alpha_0 - mu) / (1 - alpha_0).
double gamma0(double alpha0, double kappa, double mu);

// lambda_k <= (1 - sqrt(q))^k (requires gamma_0 >= mu).
double lambda_bound_sc(int k, double q);

// lambda_k <= 4 / (2 + k sqrt(gamma_0 / (kappa + mu)))^2 (same requirement).
double lambda_bound_general(int k, double gamma0, double kappa, double mu);

// With mu = 0 and alpha_0 = (sqrt(5)-1)/2: 2/(k+2)^2 <= lambda_k <= 4/(k+2)^2.
double lambda_bound_golden_upper(int k);
double lambda_bound_golden_lower(int k);

// --------------------------------------------------------------------------
// Per-method linear rates on G(x) = F(x) + (kappa/2)||x - y||^2

// Theoretical tau of `method` on the shifted problem (L' = L + kappa,
// mu' = mu + kappa):
//   fg    mu'/L'
//   sag   mu'/(16 L')
//   saga  min{1/(4n), mu'/(3 L')}
//   miso  min{mu'/(4 L'), 1/(2n)}
double method_tau(Method method, int n, double L, double mu, double kappa);

// The exact MISO-Prox rate for mixing weight delta = min(1, n mu/(2(L-mu))):
// tau = (delta/n)(1 - delta (L - mu)/(n mu)).  Useful as a sharper check on
// the conservative worst-case value min{mu/(4L), 1/(2n)} used above.
double miso_practical_tau(int n, double L, double mu);

// --------------------------------------------------------------------------
// kappa selection

// Closed-form defaults: fg uses L - 2 mu (clamped at 0) when mu > 0 and 2 L
// when mu = 0; incremental methods use a (L - mu)/(n + b) - mu with
// (a, b) = (2, -2) for sag, (1/2, 1/2) for saga, (1, 1) for miso, clamped
// at 0 (0 means acceleration is not beneficial).
double default_kappa(Method method, int n, double L, double mu);

// Maximizes tau_fn(kappa)/sqrt(mu + kappa) (or /sqrt(L + kappa) when mu = 0)
// by golden-section search on log kappa over [1e-12 L, 1e6 L], to 1e-6
// relative tolerance.
double optimal_kappa_generic(const std::function<double(double)>& tau_fn, double mu,
                             double L);

// --------------------------------------------------------------------------
// Complexity table

enum class TableMethod { kFg, kSag, kSaga, kMisoProx, kSdca, kSvrg, kAccFg, kAccSdca };

// A big-O iteration-count estimate in single-component gradient evaluations.
// `value` folds the explicit factors (n, condition number, log(1/eps));
// `hides_log_factors` marks estimates that are only valid up to further
// logarithmic factors.
struct ComplexityEstimate {
  bool available = true;
  double value = std::numeric_limits<double>::quiet_NaN();
  bool hides_log_factors = false;
};

struct BoundReport {
  ComplexityEstimate raw;          // the method run directly on F
  ComplexityEstimate accelerated;  // wrapped in the outer loop
  // Chosen kappa (NaN when acceleration does not apply or does not help).
  double kappa = std::numeric_limits<double>::quiet_NaN();
  // Concrete plan consistent with the budget calculators: k_out outer
  // iterations, k_in inner cost units per outer iteration, comp = k_in k_out.
  double k_out = 0.0;
  double k_in = 0.0;
  double comp = 0.0;
  bool acceleration_helps = false;
};

// Before/after acceleration complexity for reaching relative accuracy
// `epsilon` (0 < epsilon < 1).  For kSvrg pass the average Lipschitz constant
// as L.  Incremental methods in the n >= L/mu regime report
// accelerated = raw (no acceleration).
BoundReport table_complexity(TableMethod method, int n, double L, double mu,
                             double epsilon);

const char* table_method_name(TableMethod m);

}  // namespace catalyst
