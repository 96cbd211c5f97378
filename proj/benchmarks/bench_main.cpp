#include <benchmark/benchmark.h>

#include "febe/bem.hpp"
#include "febe/fem.hpp"
#include "febe/study.hpp"

using namespace febe;

namespace {

Decomposition prepared(ExampleId ex, int p, int refine) {
  DecompositionConfig cfg;
  cfg.example = ex;
  cfg.fe_refine = refine;
  cfg.be_refine = refine;
  Decomposition dec = build_decomposition(cfg);
  set_uniform_degree(dec.mesh, p);
  set_uniform_degree(dec.boundary, p);
  return dec;
}

void BM_fem_stiffness(benchmark::State& state) {
  const Decomposition dec = prepared(ExampleId::SquareSmooth, static_cast<int>(state.range(0)), 1);
  const FeSpace fe = build_fe_space(dec.mesh);
  for (auto _ : state) {
    benchmark::DoNotOptimize(assemble_stiffness(fe));
  }
  state.counters["dofs"] = fe.size();
}
BENCHMARK(BM_fem_stiffness)->Arg(2)->Arg(4)->Arg(6);

void BM_bem_layers(benchmark::State& state) {
  const Decomposition dec = prepared(ExampleId::SquareSmooth, static_cast<int>(state.range(0)), 1);
  const BeTraceSpace tr = build_be_trace_space(dec.boundary);
  const BeFluxSpace fx = build_be_flux_space(dec.boundary);
  const BoundaryMesh scaled = apply(capacity_scale(dec.boundary), dec.boundary);
  for (auto _ : state) {
    benchmark::DoNotOptimize(assemble_layers(scaled, tr, fx));
  }
  state.counters["panels"] = static_cast<double>(dec.boundary.panels.size());
}
BENCHMARK(BM_bem_layers)->Arg(1)->Arg(2)->Arg(4);

void BM_coupled_solve(benchmark::State& state) {
  const Decomposition dec = prepared(ExampleId::SquareSmooth, static_cast<int>(state.range(0)), 1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_step(dec, ExampleId::SquareSmooth, 2.0));
  }
}
BENCHMARK(BM_coupled_solve)->Arg(2)->Arg(4);

}  // namespace

BENCHMARK_MAIN();
