#include "catalyst/solvers.hpp"

#include <chrono>
#include <cmath>

#include "catalyst/errors.hpp"

namespace catalyst {
namespace {

std::int64_t elapsed_ns(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration_cast<std::chrono::nanoseconds>(
             std::chrono::steady_clock::now() - t0)
      .count();
}

void check_start_point(const CompositeObjective& obj, const Vector& x0) {
  if (x0.size() != obj.dim()) {
    throw ConfigError("start point has dimension " + std::to_string(x0.size()) +
                      ", objective expects " + std::to_string(obj.dim()));
  }
  if (!x0.allFinite()) throw ConfigError("start point has non-finite entries");
}

}  // namespace

std::string method_name(Method m) {
  switch (m) {
    case Method::kFg: return "fg";
    case Method::kSag: return "sag";
    case Method::kSaga: return "saga";
    case Method::kMisoProx: return "miso";
  }
  return "unknown";
}

std::optional<Method> method_from_name(const std::string& name) {
  if (name == "fg") return Method::kFg;
  if (name == "sag") return Method::kSag;
  if (name == "saga") return Method::kSaga;
  if (name == "miso" || name == "miso-prox") return Method::kMisoProx;
  return std::nullopt;
}

std::string stop_reason_name(StopReason r) {
  switch (r) {
    case StopReason::kBudgetExhausted: return "budget-exhausted";
    case StopReason::kCertificateReached: return "certificate-reached";
    case StopReason::kGradMapReached: return "grad-map-reached";
    case StopReason::kTargetReached: return "target-reached";
    case StopReason::kStepCap: return "step-cap";
  }
  return "unknown";
}

StopRule StopRule::budget(long long steps) {
  if (steps < 0) throw ConfigError("step budget must be nonnegative");
  StopRule r;
  r.kind = Kind::kBudget;
  r.budget_steps = steps;
  return r;
}

StopRule StopRule::certificate_below(double eps) {
  if (!(eps >= 0)) throw ConfigError("certificate threshold must be nonnegative");
  StopRule r;
  r.kind = Kind::kCertificateBelow;
  r.threshold = eps;
  return r;
}

StopRule StopRule::grad_map_below(double eps) {
  if (!(eps >= 0)) throw ConfigError("gradient-mapping threshold must be nonnegative");
  StopRule r;
  r.kind = Kind::kGradMapBelow;
  r.threshold = eps;
  return r;
}

StopRule StopRule::target_value(double target, double eps) {
  if (!(eps >= 0)) throw ConfigError("target slack must be nonnegative");
  StopRule r;
  r.kind = Kind::kTargetValue;
  r.target = target;
  r.threshold = eps;
  return r;
}

// ---------------------------------------------------------------------------
// FG

FgState make_fg(const CompositeObjective& obj, Vector x0, double step) {
  check_start_point(obj, x0);
  FgState s;
  s.x = std::move(x0);
  const double L = obj.smooth_lipschitz();
  if (step == 0.0) {
    if (!(L > 0)) throw ConfigError("cannot derive a step size from Lipschitz constant 0");
    step = 1.0 / L;
  }
  if (!(step > 0)) throw ConfigError("step size must be positive");
  s.step = step;
  return s;
}

double fg_step(const CompositeObjective& obj, FgState& s) {
  Vector grad;
  obj.smooth->gradient(s.x, grad);
  Vector z = s.x - s.step * grad;
  Vector next(s.x.size());
  obj.psi.prox(s.step, z, next);
  s.grad_map_norm = (s.x - next).norm() / s.step;
  s.x = std::move(next);
  return s.grad_map_norm;
}

double fg_certificate(const CompositeObjective& obj, const FgState& s) {
  const double mu = obj.strong_convexity();
  if (!(mu > 0)) {
    throw ConfigError("gradient-mapping certificate requires a strongly convex objective");
  }
  if (!std::isfinite(s.grad_map_norm)) {
    throw ConfigError("gradient-mapping certificate requires at least one completed step");
  }
  return s.grad_map_norm * s.grad_map_norm / (2.0 * mu);
}

// ---------------------------------------------------------------------------
// Gradient tables (shared by SAG and SAGA)

namespace {

void fill_gradient_table(const CompositeObjective& obj, const Vector& x, Matrix& table,
                         Vector& mean) {
  const int n = obj.components();
  const int p = obj.dim();
  table.resize(p, n);
  mean = Vector::Zero(p);
  Vector g;
  for (int i = 0; i < n; ++i) {
    obj.smooth->component_gradient(i, x, g);
    table.col(i) = g;
    mean += g;
  }
  mean /= static_cast<double>(n);
}

}  // namespace

SagState make_sag(const CompositeObjective& obj, Vector x0, double step) {
  check_start_point(obj, x0);
  SagState s;
  s.x = std::move(x0);
  const double L = obj.smooth_lipschitz();
  if (step == 0.0) {
    if (!(L > 0)) throw ConfigError("cannot derive a step size from Lipschitz constant 0");
    step = 1.0 / (16.0 * L);
  }
  if (!(step > 0)) throw ConfigError("step size must be positive");
  s.step = step;
  fill_gradient_table(obj, s.x, s.table, s.table_mean);
  return s;
}

void sag_step(const CompositeObjective& obj, SagState& s, int i) {
  const double n = static_cast<double>(obj.components());
  Vector g;
  obj.smooth->component_gradient(i, s.x, g);
  s.table_mean += (g - s.table.col(i)) / n;
  s.table.col(i) = g;
  Vector z = s.x - s.step * s.table_mean;
  obj.psi.prox(s.step, z, s.x);
}

SagaState make_saga(const CompositeObjective& obj, Vector x0, double step) {
  check_start_point(obj, x0);
  SagaState s;
  s.x = std::move(x0);
  const double L = obj.smooth_lipschitz();
  const double mu = obj.strong_convexity();
  if (step == 0.0) {
    if (!(L > 0)) throw ConfigError("cannot derive a step size from Lipschitz constant 0");
    const double n = static_cast<double>(obj.components());
    step = mu > 0 ? 1.0 / (2.0 * (mu * n + L)) : 1.0 / (3.0 * L);
  }
  if (!(step > 0)) throw ConfigError("step size must be positive");
  s.step = step;
  fill_gradient_table(obj, s.x, s.table, s.table_mean);
  return s;
}

Vector saga_gradient_estimate(const CompositeObjective& obj, const SagaState& s, int i) {
  Vector g;
  obj.smooth->component_gradient(i, s.x, g);
  return g - s.table.col(i) + s.table_mean;
}

void saga_step(const CompositeObjective& obj, SagaState& s, int i) {
  const double n = static_cast<double>(obj.components());
  Vector g;
  obj.smooth->component_gradient(i, s.x, g);
  Vector estimate = g - s.table.col(i) + s.table_mean;
  Vector z = s.x - s.step * estimate;
  obj.psi.prox(s.step, z, s.x);
  s.table_mean += (g - s.table.col(i)) / n;
  s.table.col(i) = g;
}

// ---------------------------------------------------------------------------
// MISO-Prox

MisoInit default_miso_init(const CompositeObjective& obj) {
  Vector anchor;
  double offset = 0.0;
  return obj.smooth->quadratic_minorant(anchor, offset) ? MisoInit::kAnchors
                                                        : MisoInit::kOnePass;
}

MisoProxState make_miso(const CompositeObjective& obj, MisoInit init, const Vector& start) {
  check_start_point(obj, start);
  const int n = obj.components();
  const int p = obj.dim();
  const double mu = obj.component_strong_convexity();
  if (!(mu > 0)) throw ConfigError("MISO-Prox requires strongly convex components");
  const double L = obj.smooth_lipschitz();

  MisoProxState s;
  s.mu = mu;
  s.delta = (L - mu <= 0) ? 1.0 : std::min(1.0, n * mu / (2.0 * (L - mu)));
  s.z.resize(p, n);
  s.cprime.resize(n);

  if (init == MisoInit::kAnchors) {
    Vector anchor;
    double offset = 0.0;
    if (!obj.smooth->quadratic_minorant(anchor, offset)) {
      throw ConfigError("anchor initialization needs a uniform quadratic minorant");
    }
    for (int i = 0; i < n; ++i) s.z.col(i) = anchor;
    s.cprime.setConstant(offset + 0.5 * mu * anchor.squaredNorm());
    s.zbar = anchor;
  } else {
    // z_i = start - grad f_i(start) / mu, the anchor of the tight quadratic
    // lower bound on f_i expanded at `start`.
    s.zbar = Vector::Zero(p);
    Vector g;
    for (int i = 0; i < n; ++i) {
      obj.smooth->component_gradient(i, start, g);
      s.z.col(i) = start - g / mu;
      const double ci = obj.smooth->component_value(i, start) - g.squaredNorm() / (2.0 * mu);
      s.cprime[i] = ci + 0.5 * mu * s.z.col(i).squaredNorm();
      s.zbar += s.z.col(i);
    }
    s.zbar /= static_cast<double>(n);
  }

  s.x.resize(p);
  obj.psi.prox(1.0 / mu, s.zbar, s.x);
  return s;
}

void miso_prox_step(const CompositeObjective& obj, MisoProxState& s, int i) {
  const double n = static_cast<double>(obj.components());
  const double mu = s.mu;
  const double delta = s.delta;
  Vector g;
  obj.smooth->component_gradient(i, s.x, g);
  const double fi = obj.smooth->component_value(i, s.x);

  const double ci = fi - g.dot(s.x) + 0.5 * mu * s.x.squaredNorm();
  s.cprime[i] = (1.0 - delta) * s.cprime[i] + delta * ci;

  Vector z_new = (1.0 - delta) * s.z.col(i) + delta * (s.x - g / mu);
  s.zbar += (z_new - s.z.col(i)) / n;
  s.z.col(i) = z_new;

  obj.psi.prox(1.0 / mu, s.zbar, s.x);
}

double miso_lower_bound(const CompositeObjective& obj, const MisoProxState& s,
                        const Vector& at) {
  const double mean_c = s.cprime.mean();
  return mean_c - s.mu * at.dot(s.zbar) + 0.5 * s.mu * at.squaredNorm() +
         obj.psi.value(at);
}

double miso_certificate(const CompositeObjective& obj, const MisoProxState& s) {
  const int n = obj.components();
  double value_sum = 0.0;
  for (int i = 0; i < n; ++i) value_sum += obj.smooth->component_value(i, s.x);
  const double mean_f = value_sum / static_cast<double>(n);
  // psi(x) appears in both F(x) and D(x) and cancels.
  return mean_f - s.cprime.mean() + s.mu * s.x.dot(s.zbar) -
         0.5 * s.mu * s.x.squaredNorm();
}

// ---------------------------------------------------------------------------
// Center migration

void recenter_gradient_table(double kappa, const Vector& y_old, const Vector& y_new,
                             Matrix& table, Vector& table_mean) {
  const Vector delta = kappa * (y_old - y_new);
  table.colwise() += delta;
  table_mean += delta;
}

void recenter_miso(const CompositeObjective& obj, double kappa, const Vector& y_old,
                   const Vector& y_new, MisoProxState& s) {
  const Vector shift = (kappa / s.mu) * (y_new - y_old);
  s.z.colwise() += shift;
  s.zbar += shift;
  s.cprime.array() += 0.5 * kappa * (y_new.squaredNorm() - y_old.squaredNorm());
  obj.psi.prox(1.0 / s.mu, s.zbar, s.x);
}

// ---------------------------------------------------------------------------
// One-shot driver

SolveResult solve(const CompositeObjective& obj, Method method, StopRule stop,
                  std::uint64_t seed, const Vector& x0, const SolveOptions& options) {
  check_start_point(obj, x0);
  const int n = obj.components();
  const auto t0 = std::chrono::steady_clock::now();

  if (stop.kind == StopRule::Kind::kGradMapBelow && method != Method::kFg) {
    throw ConfigError("gradient-mapping stop rule applies only to the fg solver");
  }
  if (stop.kind == StopRule::Kind::kCertificateBelow && method != Method::kFg &&
      method != Method::kMisoProx) {
    throw ConfigError("certificate stop rule applies only to fg and miso solvers");
  }
  if (stop.kind == StopRule::Kind::kCertificateBelow && method == Method::kFg &&
      !(obj.strong_convexity() > 0)) {
    throw ConfigError("fg certificate stop rule requires a strongly convex objective");
  }

  const CompositeObjective& rec_obj =
      options.trace_objective != nullptr ? *options.trace_objective : obj;
  const bool same_obj = &rec_obj == &obj;

  SolveResult res;
  res.trace.set_meta("method", method_name(method));

  double best_val = std::numeric_limits<double>::infinity();
  Vector best_x;
  double last_solved_value = std::numeric_limits<double>::quiet_NaN();

  // Records one progress row; returns the value of the *solved* objective at
  // the current iterate (used by the target-value rule).
  auto checkpoint = [&](const Vector& x, double cost, double certificate) {
    const double recorded = rec_obj.value(x);
    const double solved = same_obj ? recorded : obj.value(x);
    if (!std::isfinite(solved) || !std::isfinite(recorded)) {
      throw NumericError("objective is not finite after " + std::to_string(cost) +
                         " cost units (diverging step size?)");
    }
    if (options.record_trace) {
      TraceRow row;
      row.cost = cost;
      row.epoch = cost / static_cast<double>(n);
      row.objective = recorded;
      row.certificate = certificate;
      row.wallclock_ns = elapsed_ns(t0);
      res.trace.add(row);
    }
    if (solved < best_val) {
      best_val = solved;
      best_x = x;
    }
    last_solved_value = solved;
    return solved;
  };

  auto hit_target = [&](double solved_value) {
    return stop.kind == StopRule::Kind::kTargetValue &&
           solved_value <= stop.target + stop.threshold;
  };

  const long long max_steps =
      stop.kind == StopRule::Kind::kBudget ? stop.budget_steps : stop.step_cap;
  const StopReason exhausted_reason = stop.kind == StopRule::Kind::kBudget
                                          ? StopReason::kBudgetExhausted
                                          : StopReason::kStepCap;

  Rng rng(seed);
  double cost = 0.0;
  long long steps = 0;
  bool done = false;

  if (method == Method::kFg) {
    FgState st = make_fg(obj, x0, options.step);
    const double mu = obj.strong_convexity();
    if (hit_target(checkpoint(st.x, cost, std::numeric_limits<double>::quiet_NaN()))) {
      res.reason = StopReason::kTargetReached;
      done = true;
    }
    while (!done) {
      if (steps >= max_steps) {
        res.reason = exhausted_reason;
        break;
      }
      const double gm = fg_step(obj, st);
      ++steps;
      cost += n;
      const double cert = mu > 0 ? gm * gm / (2.0 * mu)
                                 : std::numeric_limits<double>::quiet_NaN();
      const double solved = checkpoint(st.x, cost, cert);
      if (stop.kind == StopRule::Kind::kGradMapBelow && gm <= stop.threshold) {
        res.reason = StopReason::kGradMapReached;
        done = true;
      } else if (stop.kind == StopRule::Kind::kCertificateBelow && cert <= stop.threshold) {
        res.reason = StopReason::kCertificateReached;
        done = true;
      } else if (hit_target(solved)) {
        res.reason = StopReason::kTargetReached;
        done = true;
      }
    }
    res.x = st.x;
    if (mu > 0 && std::isfinite(st.grad_map_norm)) {
      res.certificate = fg_certificate(obj, st);
    }
  } else {
    // Incremental methods share the epoch-driven loop; `advance` performs one
    // stochastic step and `certificate` reports the current bound if any.
    std::optional<SagState> sag;
    std::optional<SagaState> saga;
    std::optional<MisoProxState> miso;
    if (method == Method::kSag) {
      sag = make_sag(obj, x0, options.step);
      cost += n;  // table initialization pass
    } else if (method == Method::kSaga) {
      saga = make_saga(obj, x0, options.step);
      cost += n;
    } else {
      const MisoInit init = options.miso_init.value_or(default_miso_init(obj));
      miso = make_miso(obj, init, x0);
      if (init == MisoInit::kOnePass) cost += n;
    }
    auto current = [&]() -> const Vector& {
      if (sag) return sag->x;
      if (saga) return saga->x;
      return miso->x;
    };
    auto advance = [&](int i) {
      if (sag) {
        sag_step(obj, *sag, i);
      } else if (saga) {
        saga_step(obj, *saga, i);
      } else {
        miso_prox_step(obj, *miso, i);
      }
    };
    auto certificate = [&]() {
      return miso ? miso_certificate(obj, *miso)
                  : std::numeric_limits<double>::quiet_NaN();
    };

    double cert = certificate();
    const double entry_value = checkpoint(current(), cost, cert);
    if (stop.kind == StopRule::Kind::kCertificateBelow && cert <= stop.threshold) {
      res.reason = StopReason::kCertificateReached;
      done = true;
    } else if (hit_target(entry_value)) {
      res.reason = StopReason::kTargetReached;
      done = true;
    }
    while (!done) {
      const long long remaining = max_steps - steps;
      if (remaining <= 0) {
        res.reason = exhausted_reason;
        break;
      }
      const long long chunk = std::min<long long>(n, remaining);
      for (long long t = 0; t < chunk; ++t) {
        advance(static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(n))));
      }
      steps += chunk;
      cost += static_cast<double>(chunk);
      cert = certificate();
      const double solved = checkpoint(current(), cost, cert);
      if (stop.kind == StopRule::Kind::kCertificateBelow && cert <= stop.threshold) {
        res.reason = StopReason::kCertificateReached;
        done = true;
      } else if (hit_target(solved)) {
        res.reason = StopReason::kTargetReached;
        done = true;
      }
    }
    res.x = current();
    res.certificate = miso ? miso_certificate(obj, *miso)
                           : std::numeric_limits<double>::quiet_NaN();
  }

  // A budget that ran out while chasing a target keeps the best iterate seen.
  if (stop.kind == StopRule::Kind::kTargetValue &&
      (res.reason == StopReason::kBudgetExhausted || res.reason == StopReason::kStepCap) &&
      best_x.size() > 0) {
    res.x = best_x;
  }

  res.steps = steps;
  res.cost = cost;
  res.objective = rec_obj.value(res.x);
  res.trace.set_meta("stop_reason", stop_reason_name(res.reason));
  return res;
}

}  // namespace catalyst
