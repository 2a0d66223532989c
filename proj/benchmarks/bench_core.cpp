#include <benchmark/benchmark.h>

#include <vector>

#include "ratiometric/controllers.hpp"
#include "ratiometric/model.hpp"
#include "ratiometric/rng.hpp"
#include "ratiometric/stochastic.hpp"

using namespace ratiometric;

namespace {

const CellState kCell{4.0, 5.0, 250.0, 300.0, 0.0, 0.0};

std::vector<CellState> subset_of(std::size_t n) {
  std::vector<CellState> out;
  for (std::size_t i = 0; i < n; ++i) {
    CellState c = kCell;
    c.lacI = 50.0 + 200.0 * static_cast<double>(i);
    c.tetR = 2000.0 - 180.0 * static_cast<double>(i);
    out.push_back(c);
  }
  return out;
}

void BM_OdeRhs(benchmark::State& state) {
  const ToggleSwitchParams p;
  for (auto _ : state) benchmark::DoNotOptimize(ode_rhs(kCell, {20.0, 0.25}, p));
}
BENCHMARK(BM_OdeRhs);

void BM_EmStep(benchmark::State& state) {
  const ReactionNetwork net{ToggleSwitchParams{}};
  NoiseConfig cfg;
  cfg.deterministic_inducer_exchange = true;
  RngStream rng = derive_stream(1, StreamTag::kCell);
  CellState x = kCell;
  for (auto _ : state) {
    x = em_step(x, {20.0, 0.25}, net, cfg, rng);
    benchmark::DoNotOptimize(x);
  }
}
BENCHMARK(BM_EmStep);

void BM_MpcCost(benchmark::State& state) {
  const MpcConfig cfg;
  const auto subset = subset_of(static_cast<std::size_t>(state.range(0)));
  const std::vector<InducerInput> seq(cfg.active_genes(), InducerInput{30.0, 0.25});
  const ToggleSwitchParams p;
  for (auto _ : state) benchmark::DoNotOptimize(mpc_cost(subset, seq, cfg, 0.6, p));
}
BENCHMARK(BM_MpcCost)->Arg(1)->Arg(10);

void BM_GeneticAlgorithm(benchmark::State& state) {
  const MpcConfig cfg;
  const auto subset = subset_of(cfg.subset_size);
  const ToggleSwitchParams p;
  const std::size_t active = cfg.active_genes();
  const SequenceCost cost = [&](std::span<const std::size_t> genes) {
    std::vector<InducerInput> seq;
    for (auto g : genes) {
      const double f = static_cast<double>(g) / static_cast<double>(cfg.ga_levels - 1);
      seq.push_back({60.0 * f, 0.5 * (1.0 - f)});
    }
    return mpc_cost(subset, seq, cfg, 0.6, p);
  };
  RngStream rng = derive_stream(2, StreamTag::kController);
  for (auto _ : state) benchmark::DoNotOptimize(run_genetic_algorithm(cost, active, cfg, rng));
}
BENCHMARK(BM_GeneticAlgorithm)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
