#include <benchmark/benchmark.h>

#include "mvls/io.hpp"
#include "mvls/pipeline.hpp"

namespace mvls {
namespace {

const std::string kData = MVLS_BENCH_DATA_DIR;

Problem load(const std::string& name) {
  const auto blocks = parse_blocks(read_file(kData + "/" + name + ".blocks"));
  const auto nets = parse_nets(read_file(kData + "/" + name + ".nets"), blocks);
  return build_problem(blocks, nets, parse_spec(read_file(kData + "/" + name + ".spec")));
}

FlowNetwork grid_network(std::size_t side) {
  Rng rng(1);
  FlowNetwork net(side * side);
  for (std::size_t r = 0; r < side; ++r) {
    for (std::size_t c = 0; c < side; ++c) {
      const std::size_t v = r * side + c;
      if (c + 1 < side) net.add_arc(v, v + 1, uniform_int(rng, -20, 20), 0, uniform_int(rng, 1, 30));
      if (r + 1 < side) net.add_arc(v, v + side, uniform_int(rng, -20, 20), 0, uniform_int(rng, 1, 30));
      if (c > 0 && r > 0) net.add_arc(v, v - side - 1, uniform_int(rng, -20, 20), 0, uniform_int(rng, 1, 30));
    }
  }
  return net;
}

void BM_Circulation(benchmark::State& state, CirculationAlgorithm algo) {
  const auto net = grid_network(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(solve_min_cost_circulation(net, algo).objective);
}
BENCHMARK_CAPTURE(BM_Circulation, cost_scaling, CirculationAlgorithm::kCostScaling)->Arg(8)->Arg(16)->Arg(32);
BENCHMARK_CAPTURE(BM_Circulation, ssp, CirculationAlgorithm::kSuccessiveShortestPath)->Arg(8)->Arg(16)->Arg(32);

void BM_AssignVoltages(benchmark::State& state) {
  const auto p = load(state.range(0) == 10 ? "n10" : "n50");
  const auto fp = pack(SlicingExpr::initial(p.netlist.size()), p.netlist.modules());
  const auto tg = build_timing_graph(p.netlist, wire_delays(fp, p.netlist.nets(), Rational(0)));
  for (auto _ : state) benchmark::DoNotOptimize(assign_voltages(tg, p.curves).total_power);
}
BENCHMARK(BM_AssignVoltages)->Arg(10)->Arg(50);

void BM_Pack(benchmark::State& state) {
  const auto p = load("n50");
  Rng rng(2);
  SlicingExpr e = SlicingExpr::initial(p.netlist.size());
  for (int i = 0; i < 500; ++i) e = perturb(e, random_move(rng, false), rng);
  for (auto _ : state) benchmark::DoNotOptimize(pack(e, p.netlist.modules()).area());
}
BENCHMARK(BM_Pack);

void BM_AnnealN10(benchmark::State& state) {
  const auto p = load("n10");
  for (auto _ : state) benchmark::DoNotOptimize(anneal(p, AnnealConfig{}, 42).phi);
}
BENCHMARK(BM_AnnealN10)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace mvls

BENCHMARK_MAIN();
