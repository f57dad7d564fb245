// Microbenchmarks for the inner-loop primitives: objective and gradient
// oracles, the proximal operator, the per-step cost of each solver, and the
// accelerated outer loop end to end on a small problem.

#include <benchmark/benchmark.h>

#include <memory>

#include "catalyst/bench.hpp"
#include "catalyst/catalyst.hpp"
#include "catalyst/data.hpp"
#include "catalyst/problem.hpp"
#include "catalyst/rng.hpp"
#include "catalyst/solvers.hpp"
#include "catalyst/theory.hpp"

namespace {

using namespace catalyst;

CompositeObjective make_problem(int n, int p, double mu) {
  ExperimentConfig cfg;
  SyntheticSpec spec;
  spec.n = n;
  spec.p = p;
  spec.seed = 3;
  spec.condition = 50.0;
  cfg.synthetic = spec;
  cfg.mu = mu;
  return build_problem(cfg);
}

Vector random_point(int p, std::uint64_t seed) {
  Rng r(seed);
  Vector x(p);
  for (int j = 0; j < p; ++j) {
    x[j] = 0.5 * r.gaussian();
  }
  return x;
}

void BM_LogisticValue(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const CompositeObjective obj = make_problem(n, 50, 0.01);
  const Vector x = random_point(obj.dim(), 7);
  for (auto _ : state) {
    benchmark::DoNotOptimize(obj.value(x));
  }
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_LogisticValue)->Arg(100)->Arg(1000);

void BM_LogisticGradient(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const CompositeObjective obj = make_problem(n, 50, 0.01);
  const Vector x = random_point(obj.dim(), 7);
  Vector g;
  for (auto _ : state) {
    obj.smooth->gradient(x, g);
    benchmark::DoNotOptimize(g.data());
  }
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_LogisticGradient)->Arg(100)->Arg(1000);

void BM_ComponentGradient(benchmark::State& state) {
  const CompositeObjective obj = make_problem(1000, 50, 0.01);
  const Vector x = random_point(obj.dim(), 7);
  Vector g;
  int i = 0;
  for (auto _ : state) {
    obj.smooth->component_gradient(i, x, g);
    benchmark::DoNotOptimize(g.data());
    i = (i + 1) % obj.components();
  }
}
BENCHMARK(BM_ComponentGradient);

void BM_Prox(benchmark::State& state) {
  const int p = static_cast<int>(state.range(0));
  const Regularizer psi = Regularizer::elastic_net(0.01, 0.1);
  const Vector z = random_point(p, 11);
  Vector out(p);
  for (auto _ : state) {
    psi.prox(0.3, z, out);
    benchmark::DoNotOptimize(out.data());
  }
}
BENCHMARK(BM_Prox)->Arg(50)->Arg(1000);

void BM_FgStep(benchmark::State& state) {
  const CompositeObjective obj = make_problem(500, 50, 0.01);
  FgState s = make_fg(obj, Vector::Zero(obj.dim()));
  for (auto _ : state) {
    benchmark::DoNotOptimize(fg_step(obj, s));
  }
  state.SetItemsProcessed(state.iterations() * obj.components());
}
BENCHMARK(BM_FgStep);

void BM_SagStep(benchmark::State& state) {
  const CompositeObjective obj = make_problem(500, 50, 0.01);
  SagState s = make_sag(obj, Vector::Zero(obj.dim()));
  Rng r(5);
  for (auto _ : state) {
    sag_step(obj, s, static_cast<int>(r.uniform_index(obj.components())));
    benchmark::DoNotOptimize(s.x.data());
  }
}
BENCHMARK(BM_SagStep);

void BM_SagaStep(benchmark::State& state) {
  const CompositeObjective obj = make_problem(500, 50, 0.01);
  SagaState s = make_saga(obj, Vector::Zero(obj.dim()));
  Rng r(5);
  for (auto _ : state) {
    saga_step(obj, s, static_cast<int>(r.uniform_index(obj.components())));
    benchmark::DoNotOptimize(s.x.data());
  }
}
BENCHMARK(BM_SagaStep);

void BM_MisoStep(benchmark::State& state) {
  const CompositeObjective obj = make_problem(500, 50, 0.01);
  MisoProxState s = make_miso(obj, MisoInit::kAnchors, Vector::Zero(obj.dim()));
  Rng r(5);
  for (auto _ : state) {
    miso_prox_step(obj, s, static_cast<int>(r.uniform_index(obj.components())));
    benchmark::DoNotOptimize(s.x.data());
  }
}
BENCHMARK(BM_MisoStep);

void BM_CatalystOuterStep(benchmark::State& state) {
  const CompositeObjective obj = make_problem(200, 20, 0.01);
  CatalystConfig cc;
  cc.kappa = default_kappa(Method::kMisoProx, obj.components(),
                           obj.smooth_lipschitz(), obj.strong_convexity());
  if (cc.kappa <= 0) {
    cc.kappa = 0.1;
  }
  cc.inner_stop = InnerStopMode::kBudget;
  cc.inner_budget_steps = 2 * obj.components();
  CatalystState st = catalyst_init(obj, Method::kMisoProx, cc,
                                   Vector::Zero(obj.dim()), 1);
  for (auto _ : state) {
    outer_step(obj, st);
    benchmark::DoNotOptimize(st.x.data());
  }
  state.SetItemsProcessed(state.iterations() * 2 * obj.components());
}
BENCHMARK(BM_CatalystOuterStep);

}  // namespace

BENCHMARK_MAIN();
