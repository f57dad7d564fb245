// Rate calculators: the momentum root and its schedule, bound envelopes,
// inner-loop budgets, per-method rates, kappa selection, and the complexity
// table.  Expected values come from independent oracles (bisection on the
// defining quadratic, direct formula arithmetic) evaluated next to each check.
#include <doctest.h>

#include <cmath>
#include <limits>

#include "catalyst/catalyst.hpp"
#include "catalyst/errors.hpp"
#include "catalyst/theory.hpp"
#include "test_util.hpp"

using namespace catalyst;

namespace {

// The quadratic whose root in (0, 1] defines the next momentum coefficient:
// h(a) = a^2 - (1 - a) prev^2 - q a, increasing on the bracket [0, 1].
double alpha_quadratic(double a, double prev, double q) {
  return a * a - (1.0 - a) * prev * prev - q * a;
}

double alpha_by_bisection(double prev, double q) {
  return testutil::bisect([&](double a) { return alpha_quadratic(a, prev, q); }, 0.0, 1.0);
}

constexpr double kGolden = 0.6180339887498949;  // (sqrt(5) - 1) / 2

}  // namespace

TEST_SUITE("theory") {

TEST_CASE("alpha root matches the bisection oracle") {
  // Frozen oracle value: bisection on h(a) = a^2 + golden^2 a - golden^2
  // (the q = 0 recursion started from the golden ratio).
  const double frozen = 0.4558867801028666;
  CHECK(std::abs(alpha_by_bisection(kGolden, 0.0) - frozen) < 1e-15);
  CHECK(std::abs(alpha_next(kGolden, 0.0) - frozen) < 1e-14);

  // Random sweep: the returned root satisfies the defining quadratic, lies in
  // (0, 1], and agrees with bisection.
  const double prevs[] = {1e-3, 0.1, 0.3, 0.5, kGolden, 0.9, 1.0};
  const double qs[] = {0.0, 1e-6, 1e-3, 0.04, 0.25, 0.81, 1.0};
  for (double prev : prevs) {
    for (double q : qs) {
      const double a = alpha_next(prev, q);
      CHECK(a > 0.0);
      CHECK(a <= 1.0 + 1e-15);
      CHECK(std::abs(alpha_quadratic(a, prev, q)) < 1e-12);
      CHECK(std::abs(a - alpha_by_bisection(prev, q)) < 1e-10);
    }
  }
}

TEST_CASE("sqrt(q) is a fixed point of the alpha recursion") {
  for (double q : {1e-8, 1e-4, 0.09, 0.25, 0.5}) {
    const double root = std::sqrt(q);
    double a = root;
    for (int i = 0; i < 1000; ++i) a = alpha_next(a, q);
    CHECK(std::abs(a - root) < 1e-13);
  }
}

TEST_CASE("beta coefficient: value and range") {
  // alpha_prev = alpha_next = 1/2 gives (1/2)(1/2) / (1/4 + 1/2) = 1/3.
  CHECK(beta_coeff(0.5, 0.5) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  // Along any schedule trajectory the extrapolation weight stays in [0, 1].
  for (double q : {0.0, 1e-4, 0.09}) {
    double prev = (q > 0.0) ? std::sqrt(q) : kGolden;
    for (int k = 0; k < 1000; ++k) {
      const double next = alpha_next(prev, q);
      const double b = beta_coeff(prev, next);
      CHECK(b >= 0.0);
      CHECK(b <= 1.0);
      prev = next;
    }
  }
}

TEST_CASE("q is the inverse condition number of the shifted problem") {
  CHECK(catalyst_q(1.0, 3.0) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(catalyst_q(0.0, 2.0) == 0.0);
}

TEST_CASE("alpha0 modes") {
  const double q = 0.16;
  CHECK(alpha0_value(Alpha0Mode::kSqrtQ, q) == doctest::Approx(0.4).epsilon(1e-15));
  // Golden start solves a^2 = 1 - a.
  const double g = alpha0_value(Alpha0Mode::kGolden, 0.0);
  CHECK(std::abs(g * g - (1.0 - g)) < 1e-15);
  CHECK(g == doctest::Approx(kGolden).epsilon(1e-15));
  // Root mode solves a^2 + (1 - q) a - 1 = 0 (positive root).
  const double r = alpha0_value(Alpha0Mode::kRoot, q);
  const double oracle = testutil::bisect(
      [&](double a) { return a * a + (1.0 - q) * a - 1.0; }, 0.0, 2.0);
  CHECK(std::abs(r - oracle) < 1e-12);
  // Auto resolves by strong convexity.
  CHECK(alpha0_value(Alpha0Mode::kAuto, q) == doctest::Approx(0.4).epsilon(1e-15));
  CHECK(alpha0_value(Alpha0Mode::kAuto, 0.0) == doctest::Approx(kGolden).epsilon(1e-15));
}

TEST_CASE("mode name round-trips") {
  for (auto m : {Alpha0Mode::kAuto, Alpha0Mode::kSqrtQ, Alpha0Mode::kGolden,
                 Alpha0Mode::kRoot}) {
    CHECK(alpha0_mode_from_name(alpha0_mode_name(m)) == m);
  }
  for (auto m : {EpsilonMode::kAuto, EpsilonMode::kStronglyConvex, EpsilonMode::kConvex}) {
    CHECK(epsilon_mode_from_name(epsilon_mode_name(m)) == m);
  }
  for (auto m : {InnerStopMode::kAuto, InnerStopMode::kBudget, InnerStopMode::kCertificate}) {
    CHECK(inner_stop_from_name(inner_stop_name(m)) == m);
  }
  for (auto m : {WarmStartMode::kAuto, WarmStartMode::kPrevIterate,
                 WarmStartMode::kExtrapolatedShift, WarmStartMode::kMisoShift}) {
    CHECK(warm_start_from_name(warm_start_name(m)) == m);
  }
  CHECK_THROWS_AS((void)alpha0_mode_from_name("bogus"), ConfigError);
  CHECK_THROWS_AS((void)epsilon_mode_from_name("bogus"), ConfigError);
  CHECK_THROWS_AS((void)inner_stop_from_name("bogus"), ConfigError);
  CHECK_THROWS_AS((void)warm_start_from_name("bogus"), ConfigError);
}

TEST_CASE("strongly convex envelope: arithmetic plug-in and decay") {
  // (8 / (0.5 - 0.45)^2) (1 - 0.45)^1 = 3200 * 0.55 = 1760.
  CHECK(sc_envelope(0, 0.25, 0.45, 1.0) == doctest::Approx(1760.0).epsilon(1e-12));
  // Geometric decay by (1 - rho) per iteration, linear scaling in the gap.
  const double e3 = sc_envelope(3, 0.25, 0.45, 2.0);
  CHECK(e3 == doctest::Approx(2.0 * 1760.0 * 0.55 * 0.55 * 0.55).epsilon(1e-12));
}

TEST_CASE("non-strongly-convex envelope: arithmetic plug-ins") {
  // (8 / 4) ((1 + 1)^2 * 1 + 0) = 8.
  CHECK(nonsc_envelope(0, 2.0, 0.0, 1.0, 0.0) == doctest::Approx(8.0).epsilon(1e-12));
  // (8 / 4) ((1 + 1)^2 * 1 + (2/2) * 3) = 2 * (4 + 3) = 14.
  CHECK(nonsc_envelope(0, 2.0, 2.0, 1.0, 3.0) == doctest::Approx(14.0).epsilon(1e-12));
  // O(1/k^2) decay.
  CHECK(nonsc_envelope(8, 2.0, 0.0, 1.0, 0.0) ==
        doctest::Approx(8.0 * 4.0 / 100.0).epsilon(1e-12));
}

TEST_CASE("inner budgets match their formulas") {
  // Strongly convex mode, recomputed by hand:
  // R = 2/(1 - rho) + 2592 kappa / (mu (1 - rho)^2 (sqrt(q) - rho)^2).
  const double tau = 0.1, q = 0.25, rho = 0.3, kappa = 1.0, mu = 0.5;
  const double R = 2.0 / 0.7 + 2592.0 * kappa / (mu * 0.49 * 0.04);
  CHECK(inner_budget_sc(tau, q, rho, kappa, mu) ==
        static_cast<long long>(std::ceil(std::log(R) / tau)));
  // The scale factor multiplies the argument of the log.
  CHECK(inner_budget_sc(tau, q, rho, kappa, mu, 10.0) ==
        static_cast<long long>(std::ceil(std::log(10.0 * R) / tau)));
  // Non-strongly-convex mode: ceil((t0 / tau) ln(k + 2)), defined for k >= 1.
  CHECK(inner_budget_nonsc(0.1, 1) ==
        static_cast<long long>(std::ceil(4.1 / 0.1 * std::log(3.0))));
  CHECK(inner_budget_nonsc(0.2, 7, 3.0) ==
        static_cast<long long>(std::ceil(3.0 / 0.2 * std::log(9.0))));
  CHECK_THROWS_AS(inner_budget_nonsc(0.1, 0), ConfigError);
}

TEST_CASE("expected stopping bound: arithmetic plug-in") {
  // tau = 1/2, C = eps: 2 ln(2 C / (C/2)) + 1 = 2 ln 4 + 1.
  CHECK(expected_stop_bound(0.5, 1.0, 1.0) ==
        doctest::Approx(3.7725887222397811).epsilon(1e-14));
  CHECK(expected_stop_bound(0.5, 0.125, 0.125) ==
        doctest::Approx(3.7725887222397811).epsilon(1e-14));
}

TEST_CASE("rate schedule: products of (1 - alpha) and their bounds") {
  // With alpha_0 = sqrt(q) the schedule is constant, so
  // lambda_k = (1 - sqrt(q))^k exactly.
  const double q = 0.09;
  RateSchedule sc(std::sqrt(q), q);
  for (int k : {0, 1, 5, 50, 500}) {
    CHECK(sc.lambda(k) ==
          doctest::Approx(std::pow(1.0 - 0.3, k)).epsilon(1e-12));
    CHECK(sc.lambda(k) <= lambda_bound_sc(k, q) * (1.0 + 1e-12));
  }
  // The general bound requires gamma_0 >= mu; alpha_0 = 1/2 with
  // mu = 0.1, kappa = 0.9 gives gamma_0 = 0.4.
  const double mu = 0.1, kappa = 0.9;
  const double g0 = gamma0(0.5, kappa, mu);
  CHECK(g0 == doctest::Approx(0.5 * (1.0 * 0.5 - 0.1) / 0.5).epsilon(1e-12));
  CHECK(g0 >= mu);
  RateSchedule gen(0.5, catalyst_q(mu, kappa));
  for (int k = 0; k <= 10000; k += (k < 100 ? 1 : 97)) {
    CHECK(gen.lambda(k) <= lambda_bound_general(k, g0, kappa, mu) * (1.0 + 1e-12));
  }
  // Golden start, q = 0: 2/(k+2)^2 <= lambda_k <= 4/(k+2)^2.
  RateSchedule golden(kGolden, 0.0);
  for (int k = 0; k <= 10000; k += (k < 100 ? 1 : 97)) {
    CHECK(golden.lambda(k) <= lambda_bound_golden_upper(k) * (1.0 + 1e-12));
    CHECK(golden.lambda(k) >= lambda_bound_golden_lower(k) * (1.0 - 1e-12));
  }
  CHECK(lambda_bound_golden_upper(3) == doctest::Approx(4.0 / 25.0).epsilon(1e-15));
  CHECK(lambda_bound_golden_lower(3) == doctest::Approx(2.0 / 25.0).epsilon(1e-15));
  // lambda_0 = 1 by convention; alpha(k) replays the recursion.
  CHECK(golden.lambda(0) == 1.0);
  CHECK(golden.alpha(0) == doctest::Approx(kGolden).epsilon(1e-15));
  CHECK(golden.alpha(1) == doctest::Approx(alpha_next(kGolden, 0.0)).epsilon(1e-15));
}

TEST_CASE("per-method linear rates on the shifted subproblem") {
  const int n = 40;
  const double L = 1.0, mu = 0.05, kappa = 0.5;
  const double Lp = L + kappa, mup = mu + kappa;
  CHECK(method_tau(Method::kFg, n, L, mu, kappa) ==
        doctest::Approx(mup / Lp).epsilon(1e-15));
  CHECK(method_tau(Method::kSag, n, L, mu, kappa) ==
        doctest::Approx(mup / (16.0 * Lp)).epsilon(1e-15));
  CHECK(method_tau(Method::kSaga, n, L, mu, kappa) ==
        doctest::Approx(std::min(1.0 / (4.0 * n), mup / (3.0 * Lp))).epsilon(1e-15));
  CHECK(method_tau(Method::kMisoProx, n, L, mu, kappa) ==
        doctest::Approx(std::min(mup / (4.0 * Lp), 1.0 / (2.0 * n))).epsilon(1e-15));
}

TEST_CASE("practical MISO rate dominates the conservative one") {
  // n mu >= 2 (L - mu) saturates the mixing weight at 1.
  const int n = 50;
  const double L = 0.3, mu = 0.05;
  const double delta = std::min(1.0, n * mu / (2.0 * (L - mu)));
  CHECK(delta == 1.0);
  const double expected = (delta / n) * (1.0 - delta * (L - mu) / (n * mu));
  CHECK(miso_practical_tau(n, L, mu) == doctest::Approx(expected).epsilon(1e-12));
  CHECK(miso_practical_tau(n, L, mu) >=
        method_tau(Method::kMisoProx, n, L, mu, 0.0));
}

TEST_CASE("default kappa selection rules") {
  // Full gradient: L - 2 mu when mu > 0, 2 L when mu = 0.
  CHECK(default_kappa(Method::kFg, 10, 1.0, 0.1) == doctest::Approx(0.8).epsilon(1e-15));
  CHECK(default_kappa(Method::kFg, 10, 1.0, 0.0) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(default_kappa(Method::kFg, 10, 1.0, 0.6) == 0.0);  // clamped
  // sag: 2 (L - mu)/(n - 2) - mu.
  CHECK(default_kappa(Method::kSag, 3, 1.0, 0.0) == doctest::Approx(2.0).epsilon(1e-15));
  // saga: (L - mu)/2 / (n + 1/2) - mu.
  CHECK(default_kappa(Method::kSaga, 4, 1.0, 0.0) ==
        doctest::Approx(0.5 / 4.5).epsilon(1e-12));
  // miso: (L - mu)/(n + 1) - mu, clamped at zero when the problem is already
  // well conditioned relative to n.
  CHECK(default_kappa(Method::kMisoProx, 100, 1.0, 0.5) == 0.0);
  CHECK(default_kappa(Method::kMisoProx, 9, 1.0, 0.0) ==
        doctest::Approx(0.1).epsilon(1e-12));
}

TEST_CASE("generic kappa search recovers the closed form") {
  // For tau(kappa) = (mu + kappa)/(L + kappa), maximizing tau/sqrt(mu + kappa)
  // gives kappa = L - 2 mu.
  for (auto [L, mu] : {std::pair{1.0, 0.1}, std::pair{4.0, 1e-3}}) {
    auto tau_fn = [L = L, mu = mu](double kappa) { return (mu + kappa) / (L + kappa); };
    const double k = optimal_kappa_generic(tau_fn, mu, L);
    CHECK(std::abs(k - (L - 2.0 * mu)) / (L - 2.0 * mu) < 1e-4);
  }
}

TEST_CASE("complexity table: strongly convex regimes") {
  const double eps = 1e-3;
  const double log1e = std::log(1.0 / eps);
  // Ill-conditioned full gradient: n = 10, cond = 100.
  auto fg = table_complexity(TableMethod::kFg, 10, 1.0, 0.01, eps);
  CHECK(fg.raw.value == doctest::Approx(10.0 * 100.0 * log1e).epsilon(1e-12));
  CHECK(fg.acceleration_helps);
  CHECK(fg.kappa == doctest::Approx(0.98).epsilon(1e-12));
  CHECK(fg.accelerated.value == doctest::Approx(10.0 * 10.0 * log1e).epsilon(1e-12));
  CHECK(fg.accelerated.hides_log_factors);
  CHECK(fg.comp == doctest::Approx(fg.k_out * fg.k_in).epsilon(1e-12));
  CHECK(fg.comp > 0.0);
  // Big-n incremental regime (n >= cond): wrapping gains nothing.
  auto saga = table_complexity(TableMethod::kSaga, 1000, 1.0, 0.01, eps);
  CHECK(saga.raw.value == doctest::Approx(1000.0 * log1e).epsilon(1e-12));
  CHECK_FALSE(saga.acceleration_helps);
  CHECK(saga.accelerated.value == saga.raw.value);
  CHECK(std::isnan(saga.kappa));
  // Ill-conditioned incremental regime: sqrt(n cond) estimate.
  auto sag = table_complexity(TableMethod::kSag, 10, 1.0, 1e-4, eps);
  CHECK(sag.raw.value == doctest::Approx(1e4 * log1e).epsilon(1e-12));
  CHECK(sag.acceleration_helps);
  CHECK(sag.accelerated.value ==
        doctest::Approx(std::sqrt(10.0 * 1e4) * log1e).epsilon(1e-12));
  // The sharper two-log estimate for the mixing-weight method.
  auto miso = table_complexity(TableMethod::kMisoProx, 10, 1.0, 1e-4, eps);
  CHECK(miso.accelerated.value ==
        doctest::Approx(std::min(1e4, std::sqrt(10.0 * 1e4)) * log1e * std::log(1e4))
            .epsilon(1e-12));
  CHECK_FALSE(miso.accelerated.hides_log_factors);
}

TEST_CASE("complexity table: non-strongly-convex rows and validation") {
  const double eps = 1e-2;
  auto sag = table_complexity(TableMethod::kSag, 10, 1.0, 0.0, eps);
  CHECK(sag.raw.value == doctest::Approx(10.0 / eps).epsilon(1e-12));
  CHECK(sag.acceleration_helps);
  CHECK(sag.accelerated.value == doctest::Approx(10.0 / std::sqrt(eps)).epsilon(1e-12));
  // Dual/variance-reduced rows have no plain mu = 0 guarantee.
  auto miso = table_complexity(TableMethod::kMisoProx, 10, 1.0, 0.0, eps);
  CHECK_FALSE(miso.raw.available);
  // Already-accelerated rows pass through unchanged.
  auto acc = table_complexity(TableMethod::kAccFg, 10, 1.0, 0.01, eps);
  CHECK(acc.accelerated.value == acc.raw.value);
  CHECK_FALSE(acc.acceleration_helps);
  CHECK_THROWS_AS((void)table_complexity(TableMethod::kFg, 0, 1.0, 0.0, eps), ConfigError);
  CHECK_THROWS_AS((void)table_complexity(TableMethod::kFg, 10, 1.0, 0.0, 2.0), ConfigError);
  CHECK_THROWS_AS((void)table_complexity(TableMethod::kFg, 10, -1.0, 0.0, eps), ConfigError);
  // Every row has a printable name.
  for (auto m : {TableMethod::kFg, TableMethod::kSag, TableMethod::kSaga,
                 TableMethod::kMisoProx, TableMethod::kSdca, TableMethod::kSvrg,
                 TableMethod::kAccFg, TableMethod::kAccSdca}) {
    CHECK(table_method_name(m) != nullptr);
    CHECK(*table_method_name(m) != '\0');
  }
}

TEST_CASE("gamma0 formula") {
  // alpha_0 ((kappa + mu) alpha_0 - mu) / (1 - alpha_0).
  CHECK(gamma0(0.25, 2.0, 0.5) ==
        doctest::Approx(0.25 * (2.5 * 0.25 - 0.5) / 0.75).epsilon(1e-15));
}

}  // TEST_SUITE
