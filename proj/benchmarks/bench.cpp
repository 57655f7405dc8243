// Microbenchmarks for the hot paths: the implicit-equation solver (with and
// without warm starts), the feedback evaluation, exact synthesis, and a full
// trajectory integration.

#include "cfsyn/sampling.hpp"
#include "cfsyn/simulate.hpp"
#include "cfsyn/synthesis.hpp"
#include "cfsyn/theta.hpp"

#include <benchmark/benchmark.h>

#include <vector>

namespace {

cfsyn::ControllerSpec spec_for(int n) {
  cfsyn::synthesis::SynthesisParams params;
  params.n = n;
  return cfsyn::synthesis::synthesize(params);
}

std::vector<Eigen::VectorXd> states_for(int n, int count) {
  cfsyn::sampling::SphereSampler sampler(1234);
  std::vector<Eigen::VectorXd> states;
  states.reserve(count);
  for (int i = 0; i < count; ++i)
    states.push_back(sampler.sample(n, i % 2 ? 1.0 : 100.0));
  return states;
}

void BM_SolveTheta(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const cfsyn::ControllerSpec spec = spec_for(n);
  const std::vector<Eigen::VectorXd> states = states_for(n, 256);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        cfsyn::theta::solve_theta(spec, states[i++ & 255]).theta);
  }
}
BENCHMARK(BM_SolveTheta)->Arg(2)->Arg(3)->Arg(5)->Arg(8);

void BM_SolveThetaWarm(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const cfsyn::ControllerSpec spec = spec_for(n);
  const std::vector<Eigen::VectorXd> states = states_for(n, 256);
  std::vector<double> thetas;
  for (const Eigen::VectorXd& x : states)
    thetas.push_back(cfsyn::theta::solve_theta(spec, x).theta);
  std::size_t i = 0;
  for (auto _ : state) {
    const std::size_t k = i++ & 255;
    benchmark::DoNotOptimize(
        cfsyn::theta::solve_theta(spec, states[k], thetas[k]).theta);
  }
}
BENCHMARK(BM_SolveThetaWarm)->Arg(3)->Arg(8);

void BM_Control(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const cfsyn::ControllerSpec spec = spec_for(n);
  const std::vector<Eigen::VectorXd> states = states_for(n, 256);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(cfsyn::theta::control(spec, states[i++ & 255]));
  }
}
BENCHMARK(BM_Control)->Arg(3)->Arg(8);

void BM_Synthesize(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(spec_for(n).a0);
  }
}
BENCHMARK(BM_Synthesize)->Arg(3)->Arg(5)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_Integrate(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const cfsyn::ControllerSpec spec = spec_for(n);
  Eigen::VectorXd x0 = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < n; ++i) x0(i) = (i % 2 ? -1.0 : 1.0) / (1.0 + i);
  cfsyn::simulate::SimulationConfig config;
  config.record_stride = 64;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        cfsyn::simulate::integrate(spec, x0, config).time_of_motion);
  }
}
BENCHMARK(BM_Integrate)->Arg(2)->Arg(3)->Arg(5)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
