#include "catalyst/catalyst.hpp"

#include <chrono>
#include <cmath>

#include "catalyst/errors.hpp"
#include "catalyst/theory.hpp"

namespace catalyst {
namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

// Wallclock reference shared by all outer-loop traces in this process; the
// field is informational and never serialized.
std::int64_t process_elapsed_ns() {
  static const auto t0 = std::chrono::steady_clock::now();
  return std::chrono::duration_cast<std::chrono::nanoseconds>(
             std::chrono::steady_clock::now() - t0)
      .count();
}

}  // namespace

double catalyst_q(double mu, double kappa) {
  if (!(kappa > 0)) throw ConfigError("kappa must be positive");
  if (mu < 0) throw ConfigError("mu must be nonnegative");
  return mu / (mu + kappa);
}

double alpha_next(double alpha_prev, double q) {
  if (!(alpha_prev > 0) || alpha_prev > 1) {
    throw ConfigError("alpha_prev must lie in (0, 1]");
  }
  if (q < 0 || q > 1) throw ConfigError("q must lie in [0, 1]");
  const double d = q - alpha_prev * alpha_prev;
  return 0.5 * (d + std::sqrt(d * d + 4.0 * alpha_prev * alpha_prev));
}

double beta_coeff(double alpha_prev, double alpha_next) {
  if (!(alpha_prev > 0) || alpha_prev > 1 || !(alpha_next > 0) || alpha_next > 1) {
    throw ConfigError("alpha values must lie in (0, 1]");
  }
  return alpha_prev * (1.0 - alpha_prev) / (alpha_prev * alpha_prev + alpha_next);
}

double alpha0_value(Alpha0Mode mode, double q) {
  if (q < 0 || q > 1) throw ConfigError("q must lie in [0, 1]");
  switch (mode) {
    case Alpha0Mode::kAuto:
      return q > 0 ? std::sqrt(q) : alpha0_value(Alpha0Mode::kGolden, q);
    case Alpha0Mode::kSqrtQ:
      if (!(q > 0)) throw ConfigError("alpha0 = sqrt(q) requires mu > 0");
      return std::sqrt(q);
    case Alpha0Mode::kGolden:
      return (std::sqrt(5.0) - 1.0) / 2.0;
    case Alpha0Mode::kRoot:
      // Positive root of alpha^2 + (1 - q) alpha - 1 = 0.
      return 0.5 * (-(1.0 - q) + std::sqrt((1.0 - q) * (1.0 - q) + 4.0));
  }
  throw ConfigError("unknown alpha0 mode");
}

const char* alpha0_mode_name(Alpha0Mode mode) {
  switch (mode) {
    case Alpha0Mode::kAuto: return "auto";
    case Alpha0Mode::kSqrtQ: return "sqrtq";
    case Alpha0Mode::kGolden: return "golden";
    case Alpha0Mode::kRoot: return "root";
  }
  throw ConfigError("unknown alpha0 mode");
}

Alpha0Mode alpha0_mode_from_name(const std::string& name) {
  if (name == "auto") return Alpha0Mode::kAuto;
  if (name == "sqrtq") return Alpha0Mode::kSqrtQ;
  if (name == "golden") return Alpha0Mode::kGolden;
  if (name == "root") return Alpha0Mode::kRoot;
  throw ConfigError("unknown alpha0 mode '" + name + "' (expected sqrtq, golden, or root)");
}

const char* epsilon_mode_name(EpsilonMode mode) {
  switch (mode) {
    case EpsilonMode::kAuto: return "auto";
    case EpsilonMode::kStronglyConvex: return "sc";
    case EpsilonMode::kConvex: return "convex";
  }
  throw ConfigError("unknown accuracy schedule mode");
}

EpsilonMode epsilon_mode_from_name(const std::string& name) {
  if (name == "auto") return EpsilonMode::kAuto;
  if (name == "sc") return EpsilonMode::kStronglyConvex;
  if (name == "convex") return EpsilonMode::kConvex;
  throw ConfigError("unknown accuracy schedule '" + name + "' (expected sc or convex)");
}

const char* inner_stop_name(InnerStopMode mode) {
  switch (mode) {
    case InnerStopMode::kAuto: return "auto";
    case InnerStopMode::kBudget: return "budget";
    case InnerStopMode::kCertificate: return "certificate";
  }
  throw ConfigError("unknown inner stop mode");
}

InnerStopMode inner_stop_from_name(const std::string& name) {
  if (name == "auto") return InnerStopMode::kAuto;
  if (name == "budget") return InnerStopMode::kBudget;
  if (name == "certificate") return InnerStopMode::kCertificate;
  throw ConfigError("unknown inner stop '" + name + "' (expected budget or certificate)");
}

const char* warm_start_name(WarmStartMode mode) {
  switch (mode) {
    case WarmStartMode::kAuto: return "auto";
    case WarmStartMode::kPrevIterate: return "prev";
    case WarmStartMode::kExtrapolatedShift: return "shift";
    case WarmStartMode::kMisoShift: return "miso-shift";
  }
  throw ConfigError("unknown warm start mode");
}

WarmStartMode warm_start_from_name(const std::string& name) {
  if (name == "auto") return WarmStartMode::kAuto;
  if (name == "prev") return WarmStartMode::kPrevIterate;
  if (name == "shift") return WarmStartMode::kExtrapolatedShift;
  if (name == "miso-shift") return WarmStartMode::kMisoShift;
  throw ConfigError("unknown warm start '" + name + "' (expected prev, shift, or miso-shift)");
}

double EpsilonSchedule::operator()(int k) const {
  if (k < 1) throw ConfigError("the accuracy schedule starts at k = 1");
  if (!(f0_gap > 0)) throw ConfigError("f0_gap must be positive");
  if (mode == EpsilonMode::kStronglyConvex) {
    if (rho < 0 || rho >= 1) throw ConfigError("rho must lie in [0, 1)");
    return (2.0 / 9.0) * f0_gap * std::pow(1.0 - rho, k);
  }
  if (mode == EpsilonMode::kConvex) {
    if (eta < 0) throw ConfigError("eta must be nonnegative");
    return 2.0 * f0_gap / (9.0 * std::pow(static_cast<double>(k) + 2.0, 4.0 + eta));
  }
  throw ConfigError("accuracy schedule mode must be resolved before use");
}

EpsilonSchedule CatalystPlan::schedule() const {
  EpsilonSchedule s;
  s.mode = epsilon_mode;
  s.f0_gap = f0_upper;
  s.rho = rho;
  s.eta = eta;
  return s;
}

long long CatalystPlan::budget_for(int k, int n) const {
  long long steps = 0;
  if (inner_budget_steps >= 0) {
    return inner_budget_steps;  // explicit budgets are honored literally
  }
  if (epsilon_mode == EpsilonMode::kStronglyConvex) {
    steps = inner_budget_sc(tau, q, rho, kappa, mu, budget_scale);
  } else {
    // t0 matches the (k+2)^(4+eta) decay of the accuracy schedule.
    steps = inner_budget_nonsc(tau, k, 4.0 + eta);
  }
  if (method != Method::kFg) {
    steps = (steps + n - 1) / n * n;  // whole epochs
  }
  return steps;
}

CatalystPlan plan_catalyst(const CompositeObjective& obj, Method method,
                           const CatalystConfig& config, double f0_at_x0) {
  CatalystPlan p;
  p.method = method;
  if (!(config.kappa > 0)) throw ConfigError("kappa must be positive");
  p.kappa = config.kappa;
  p.mu = obj.strong_convexity();
  p.q = catalyst_q(p.mu, p.kappa);

  p.epsilon_mode = config.epsilon_mode;
  if (p.epsilon_mode == EpsilonMode::kAuto) {
    p.epsilon_mode = p.mu > 0 ? EpsilonMode::kStronglyConvex : EpsilonMode::kConvex;
  }
  if (p.epsilon_mode == EpsilonMode::kStronglyConvex && !(p.mu > 0)) {
    throw ConfigError("the strongly convex accuracy schedule requires mu > 0");
  }

  if (p.epsilon_mode == EpsilonMode::kStronglyConvex) {
    const double sq = std::sqrt(p.q);
    p.rho = config.rho < 0 ? 0.9 * sq : config.rho;
    if (!(p.rho > 0) || !(p.rho < sq)) {
      throw ConfigError("rho must lie in (0, sqrt(q))");
    }
  } else {
    p.rho = 0.0;
  }
  if (!(config.eta > 0)) throw ConfigError("eta must be positive");
  p.eta = config.eta;

  Alpha0Mode a0 = config.alpha0;
  if (a0 == Alpha0Mode::kAuto) {
    a0 = p.mu > 0 ? Alpha0Mode::kSqrtQ : Alpha0Mode::kGolden;
  }
  p.alpha0 = alpha0_value(a0, p.q);

  p.f0_upper = config.f0_upper < 0 ? f0_at_x0 : config.f0_upper;
  if (!(p.f0_upper > 0)) {
    throw ConfigError(
        "f0_upper must be positive; pass it explicitly when F(x_0) <= 0");
  }

  p.inner_stop = config.inner_stop;
  if (p.inner_stop == InnerStopMode::kAuto) {
    p.inner_stop = (method == Method::kFg || method == Method::kMisoProx)
                       ? InnerStopMode::kCertificate
                       : InnerStopMode::kBudget;
  }
  if (p.inner_stop == InnerStopMode::kCertificate &&
      (method == Method::kSag || method == Method::kSaga)) {
    throw ConfigError("sag/saga carry no optimality certificate; use budget mode");
  }

  p.warm_start = config.warm_start;
  if (p.warm_start == WarmStartMode::kAuto) {
    switch (method) {
      case Method::kFg:
      case Method::kSag: p.warm_start = WarmStartMode::kPrevIterate; break;
      case Method::kSaga: p.warm_start = WarmStartMode::kExtrapolatedShift; break;
      case Method::kMisoProx: p.warm_start = WarmStartMode::kMisoShift; break;
    }
  }
  if (method == Method::kMisoProx && p.warm_start != WarmStartMode::kMisoShift) {
    throw ConfigError("miso carries anchors; only the anchor-shift warm start applies");
  }
  if (method != Method::kMisoProx && p.warm_start == WarmStartMode::kMisoShift) {
    throw ConfigError("the anchor-shift warm start applies only to miso");
  }

  p.tau = method_tau(method, obj.components(), obj.smooth_lipschitz(), p.mu, p.kappa);
  p.inner_budget_steps = config.inner_budget_steps;
  if (!(config.budget_scale > 0)) throw ConfigError("budget scale must be positive");
  p.budget_scale = config.budget_scale;
  if (config.inner_step_cap <= 0) throw ConfigError("inner step cap must be positive");
  p.inner_step_cap = config.inner_step_cap;
  if (config.inner_step < 0) throw ConfigError("inner step size must be nonnegative");
  p.inner_step = config.inner_step;
  return p;
}

CatalystState catalyst_init(const CompositeObjective& obj, Method method,
                            const CatalystConfig& config, const Vector& x0,
                            std::uint64_t seed) {
  if (x0.size() != obj.dim()) {
    throw ConfigError("start point has dimension " + std::to_string(x0.size()) +
                      ", objective expects " + std::to_string(obj.dim()));
  }
  if (!x0.allFinite()) throw ConfigError("start point has non-finite entries");
  const double f0 = obj.value(x0);
  if (!std::isfinite(f0)) throw NumericError("objective is not finite at the start point");

  CatalystState st;
  st.plan = plan_catalyst(obj, method, config, f0);
  st.x = x0;
  st.x_prev = x0;
  st.y = x0;
  st.y_prev = x0;  // y_{-1} = y_0 so the first warm-start shift vanishes
  st.alpha = st.plan.alpha0;
  st.rng = Rng(seed);
  return st;
}

OuterRecord outer_step(const CompositeObjective& obj, CatalystState& st,
                       RunTrace* trace, double max_units) {
  const CatalystPlan& plan = st.plan;
  const int n = obj.components();
  const int k = st.k + 1;
  const double eps_k = plan.schedule()(k);

  const CompositeObjective G = shift(obj, plan.kappa, st.y);
  const double mu_G = G.strong_convexity();
  const Vector dy = st.y - st.y_prev;  // y_{k-1} - y_{k-2}

  double units_used = 0.0;
  long long steps = 0;
  double cert = kNan;
  bool truncated = false;

  auto record = [&](const Vector& x, double certificate, double envelope = kNan) {
    const double value = obj.value(x);
    if (!std::isfinite(value)) {
      throw NumericError("objective diverged during subproblem " + std::to_string(k));
    }
    if (trace != nullptr) {
      TraceRow row;
      row.cost = st.cost;
      row.epoch = st.cost / static_cast<double>(n);
      row.objective = value;
      row.certificate = certificate;
      row.envelope = envelope;
      row.wallclock_ns = process_elapsed_ns();
      trace->add(row);
    }
    return value;
  };

  const bool budget_mode = plan.inner_stop == InnerStopMode::kBudget;
  const long long budget = budget_mode ? plan.budget_for(k, n) : 0;

  Vector x_k;
  if (plan.method == Method::kFg) {
    Vector x_start = st.x;
    if (plan.warm_start == WarmStartMode::kExtrapolatedShift) {
      x_start += plan.kappa / (plan.mu + plan.kappa) * dy;
    }
    FgState fg = make_fg(G, std::move(x_start), plan.inner_step);
    while (true) {
      if (budget_mode && steps >= budget) break;
      if (!budget_mode && steps >= plan.inner_step_cap) {
        truncated = true;
        break;
      }
      if (units_used + n > max_units) {
        truncated = true;
        break;
      }
      const double gm = fg_step(G, fg);
      ++steps;
      units_used += n;
      st.cost += n;
      cert = gm * gm / (2.0 * mu_G);
      record(fg.x, cert);
      if (!budget_mode && cert <= eps_k) break;
    }
    x_k = fg.x;
  } else if (plan.method == Method::kSag || plan.method == Method::kSaga) {
    // Budget mode only (validated in the plan).  Tables survive the center
    // move: every stored gradient shifts by the same constant.
    Vector x_start = st.x;
    if (plan.warm_start == WarmStartMode::kExtrapolatedShift) {
      x_start += plan.kappa / (plan.mu + plan.kappa) * dy;
    }
    if (plan.method == Method::kSag) {
      if (!st.sag) {
        st.sag = make_sag(G, x_start, plan.inner_step);
        units_used += n;
        st.cost += n;
      } else {
        recenter_gradient_table(plan.kappa, st.y_prev, st.y, st.sag->table,
                                st.sag->table_mean);
        st.sag->x = x_start;
      }
    } else {
      if (!st.saga) {
        st.saga = make_saga(G, x_start, plan.inner_step);
        units_used += n;
        st.cost += n;
      } else {
        recenter_gradient_table(plan.kappa, st.y_prev, st.y, st.saga->table,
                                st.saga->table_mean);
        st.saga->x = x_start;
      }
    }
    while (steps < budget) {
      long long chunk = std::min<long long>(n, budget - steps);
      if (units_used + static_cast<double>(chunk) > max_units) {
        chunk = static_cast<long long>(max_units - units_used);
        truncated = true;
      }
      if (chunk <= 0) break;
      for (long long t = 0; t < chunk; ++t) {
        const int i = static_cast<int>(st.rng.uniform_index(static_cast<std::size_t>(n)));
        if (plan.method == Method::kSag) {
          sag_step(G, *st.sag, i);
        } else {
          saga_step(G, *st.saga, i);
        }
      }
      steps += chunk;
      units_used += static_cast<double>(chunk);
      st.cost += static_cast<double>(chunk);
      record(plan.method == Method::kSag ? st.sag->x : st.saga->x, kNan);
      if (truncated) break;
    }
    x_k = plan.method == Method::kSag ? st.sag->x : st.saga->x;
  } else {
    if (!st.miso) {
      const MisoInit init = default_miso_init(G);
      st.miso = make_miso(G, init, st.x);
      if (init == MisoInit::kOnePass) {
        units_used += n;
        st.cost += n;
      }
    } else {
      recenter_miso(G, plan.kappa, st.y_prev, st.y, *st.miso);
    }
    cert = miso_certificate(G, *st.miso);
    while (true) {
      if (budget_mode) {
        if (steps >= budget) break;
      } else {
        if (cert <= eps_k) break;
        if (steps >= plan.inner_step_cap) {
          truncated = true;
          break;
        }
      }
      long long chunk = budget_mode ? std::min<long long>(n, budget - steps)
                                    : static_cast<long long>(n);
      if (units_used + static_cast<double>(chunk) > max_units) {
        chunk = static_cast<long long>(max_units - units_used);
        truncated = true;
      }
      if (chunk <= 0) break;
      for (long long t = 0; t < chunk; ++t) {
        const int i = static_cast<int>(st.rng.uniform_index(static_cast<std::size_t>(n)));
        miso_prox_step(G, *st.miso, i);
      }
      steps += chunk;
      units_used += static_cast<double>(chunk);
      st.cost += static_cast<double>(chunk);
      cert = miso_certificate(G, *st.miso);
      record(st.miso->x, cert);
      if (truncated) break;
    }
    x_k = st.miso->x;
  }

  const double a_prev = st.alpha;
  const double a_next = alpha_next(a_prev, plan.q);
  const double b = beta_coeff(a_prev, a_next);
  const Vector y_next = x_k + b * (x_k - st.x);

  st.x_prev = st.x;
  st.x = x_k;
  st.y_prev = st.y;
  st.y = y_next;
  st.alpha = a_next;
  st.k = k;

  OuterRecord rec;
  rec.k = k;
  rec.cost = st.cost;
  rec.eps_k = eps_k;
  rec.inner_certificate = cert;
  rec.inner_steps = steps;
  rec.alpha = a_next;
  rec.beta = b;
  rec.inner_truncated = truncated;
  if (plan.epsilon_mode == EpsilonMode::kStronglyConvex) {
    rec.envelope = sc_envelope(k, plan.q, plan.rho, plan.f0_upper);
  }
  rec.objective = record(st.x, cert, rec.envelope);  // outer marker row
  return rec;
}

CatalystRun run_catalyst(const CompositeObjective& obj, Method method,
                         const CatalystConfig& config, const Vector& x0,
                         std::uint64_t seed, const RunBudget& budget) {
  CatalystState st = catalyst_init(obj, method, config, x0, seed);
  const CatalystPlan& plan = st.plan;

  CatalystRun run;
  RunTrace& trace = run.trace;
  trace.set_meta("loop", "catalyst");
  trace.set_meta("method", method_name(method));
  trace.set_meta("kappa", format_double(plan.kappa));
  trace.set_meta("q", format_double(plan.q));
  trace.set_meta("alpha0", format_double(plan.alpha0));
  trace.set_meta("epsilon_mode", plan.epsilon_mode == EpsilonMode::kStronglyConvex
                                     ? "sc"
                                     : "convex");
  if (plan.epsilon_mode == EpsilonMode::kStronglyConvex) {
    trace.set_meta("rho", format_double(plan.rho));
  } else {
    trace.set_meta("eta", format_double(plan.eta));
  }
  trace.set_meta("f0_upper", format_double(plan.f0_upper));
  trace.set_meta("inner_stop",
                 plan.inner_stop == InnerStopMode::kBudget ? "budget" : "certificate");
  trace.set_meta("seed", std::to_string(seed));

  {
    TraceRow row;
    row.cost = 0.0;
    row.epoch = 0.0;
    row.objective = obj.value(x0);
    row.wallclock_ns = process_elapsed_ns();
    trace.add(row);
  }

  const bool has_target = !std::isnan(budget.target_objective);
  while (st.k < budget.max_outer) {
    if (st.cost >= budget.max_cost_units) {
      run.cost_exhausted = true;
      break;
    }
    OuterRecord rec = outer_step(obj, st, &trace, budget.max_cost_units - st.cost);
    run.outer.push_back(rec);
    if (has_target && rec.objective <= budget.target_objective + budget.target_slack) {
      run.target_reached = true;
      break;
    }
    if (rec.inner_truncated && st.cost >= budget.max_cost_units) {
      run.cost_exhausted = true;
      break;
    }
  }

  run.x = st.x;
  run.objective = obj.value(st.x);
  run.cost = st.cost;
  run.outer_iterations = st.k;
  return run;
}

}  // namespace catalyst
