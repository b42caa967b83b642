#include "mvls/voltage.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "mvls/error.hpp"

namespace mvls {

namespace {

constexpr Time kNegInf = std::numeric_limits<Time>::min() / 4;

void check_curves(const TimingGraph& tg, std::span<const DpCurve> curves) {
  if (curves.size() != tg.num_modules()) {
    throw Error(ErrorCode::kInvalidArgument, "one curve per module is required");
  }
}

Time edge_delay(const TimingEdge& e, std::span<const DpCurve> curves, std::span<const int> levels) {
  switch (e.kind) {
    case EdgeClass::kModule: return curves[e.index].delay(levels[e.index]);
    case EdgeClass::kWire: return e.delay;
    default: return 0;
  }
}

struct PathState {
  std::vector<Time> arrival;
  std::vector<std::size_t> via;  // edge index that realises the arrival
};

PathState forward_pass(const TimingGraph& tg, std::span<const DpCurve> curves,
                       std::span<const int> levels) {
  check_curves(tg, curves);
  if (levels.size() != tg.num_modules()) {
    throw Error(ErrorCode::kInvalidArgument, "one level per module is required");
  }
  std::vector<std::vector<std::size_t>> incoming(tg.num_nodes());
  for (std::size_t e = 0; e < tg.edges().size(); ++e) {
    if (tg.edges()[e].kind != EdgeClass::kCycleBound) incoming[tg.edges()[e].head].push_back(e);
  }
  PathState st{std::vector<Time>(tg.num_nodes(), kNegInf),
               std::vector<std::size_t>(tg.num_nodes(), std::numeric_limits<std::size_t>::max())};
  st.arrival[TimingGraph::source()] = 0;
  for (NodeId v : tg.node_order()) {
    for (auto e : incoming[v]) {
      const auto& edge = tg.edges()[e];
      if (st.arrival[edge.tail] == kNegInf) continue;
      const Time cand = st.arrival[edge.tail] + edge_delay(edge, curves, levels);
      if (cand > st.arrival[v]) {
        st.arrival[v] = cand;
        st.via[v] = e;
      }
    }
  }
  if (st.arrival[TimingGraph::sink()] == kNegInf) st.arrival[TimingGraph::sink()] = 0;
  return st;
}

// Latest time each node may be reached without breaking T_cycle.
std::vector<Time> required_times(const TimingGraph& tg, std::span<const DpCurve> curves,
                                 std::span<const int> levels) {
  constexpr Time kPosInf = std::numeric_limits<Time>::max() / 4;
  std::vector<std::vector<std::size_t>> outgoing(tg.num_nodes());
  for (std::size_t e = 0; e < tg.edges().size(); ++e) {
    if (tg.edges()[e].kind != EdgeClass::kCycleBound) outgoing[tg.edges()[e].tail].push_back(e);
  }
  std::vector<Time> req(tg.num_nodes(), kPosInf);
  req[TimingGraph::sink()] = tg.t_cycle();
  const auto& order = tg.node_order();
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    for (auto e : outgoing[*it]) {
      const auto& edge = tg.edges()[e];
      if (req[edge.head] == kPosInf) continue;
      req[*it] = std::min(req[*it], req[edge.head] - edge_delay(edge, curves, levels));
    }
  }
  return req;
}

Flow checked_flow(Wide v) {
  if (v > (Wide{1} << 62)) {
    throw Error(ErrorCode::kOverflow,
                "expanded network capacities exceed 2^62; quantize delays and powers more coarsely");
  }
  return static_cast<Flow>(v);
}

std::vector<LevelRange> full_ranges(std::span<const DpCurve> curves) {
  std::vector<LevelRange> r;
  r.reserve(curves.size());
  for (const auto& c : curves) r.push_back({1, c.levels()});
  return r;
}

// Greedy slack-driven lowering of voltages: repeatedly slows the module whose
// next level saves the most power while the cycle bound still holds.
void improve_greedily(const TimingGraph& tg, std::span<const DpCurve> curves,
                      std::vector<int>& levels) {
  for (;;) {
    const auto arr = forward_pass(tg, curves, levels).arrival;
    const auto req = required_times(tg, curves, levels);
    Power best_saving = 0;
    std::size_t best = tg.num_modules();
    for (ModuleId i = 0; i < tg.num_modules(); ++i) {
      const int q = levels[i];
      if (q >= curves[i].levels()) continue;
      const Time slack = req[TimingGraph::output(i)] - arr[TimingGraph::output(i)];
      const Time extra = curves[i].delay(q + 1) - curves[i].delay(q);
      const Power saving = curves[i].power(q) - curves[i].power(q + 1);
      if (extra <= slack && saving > best_saving) {
        best_saving = saving;
        best = i;
      }
    }
    if (best == tg.num_modules()) return;
    ++levels[best];
  }
}

class BranchAndBound {
 public:
  BranchAndBound(const TimingGraph& tg, std::span<const DpCurve> curves, const AssignOptions& opt)
      : tg_(tg), curves_(curves), opt_(opt) {}

  void explore(std::vector<LevelRange> ranges) {
    if (nodes_ >= opt_.node_limit) {
      limited_ = true;
      return;
    }
    ++nodes_;
    std::vector<int> fastest(ranges.size());
    for (std::size_t i = 0; i < ranges.size(); ++i) fastest[i] = ranges[i].lo;
    if (longest_path_delay(tg_, curves_, fastest) > tg_.t_cycle()) return;

    const Relaxation relax = solve_relaxation(tg_, curves_, ranges, opt_.algorithm);
    std::vector<int> candidate = relax.rounded;
    improve_greedily(tg_, curves_, candidate);
    const Power p = total_power(curves_, candidate);
    if (!best_ || p < best_power_ || (p == best_power_ && candidate < *best_)) {
      best_ = candidate;
      best_power_ = p;
    }
    // Any discrete assignment below this node costs at least ceil(bound).
    if (relax.bound > BigRational(best_power_ - 1)) return;

    // Branch on the module whose relaxed delay is most expensive to round.
    std::size_t pick = ranges.size();
    int split = 0;
    double worst = 0.0;
    for (ModuleId i = 0; i < ranges.size(); ++i) {
      const auto& c = curves_[i];
      const int q = relax.rounded[i];
      if (q >= ranges[i].hi || c.delay(q) == relax.gap[i]) continue;
      const double slope = static_cast<double>(c.power(q) - c.power(q + 1)) /
                           static_cast<double>(c.delay(q + 1) - c.delay(q));
      const double loss = slope * static_cast<double>(relax.gap[i] - c.delay(q));
      if (pick == ranges.size() || loss > worst) {
        pick = i;
        split = q;
        worst = loss;
      }
    }
    if (pick == ranges.size()) return;  // relaxation already integral

    auto slower = ranges;
    slower[pick].lo = split + 1;
    explore(std::move(slower));
    ranges[pick].hi = split;
    explore(std::move(ranges));
  }

  [[nodiscard]] VoltageAssignment result() const {
    VoltageAssignment va;
    va.level = *best_;
    va.total_power = best_power_;
    va.arrival = arrival_times(tg_, curves_, va.level);
    va.proven_optimal = !limited_;
    va.search_nodes = nodes_;
    return va;
  }

 private:
  const TimingGraph& tg_;
  std::span<const DpCurve> curves_;
  const AssignOptions& opt_;
  std::optional<std::vector<int>> best_;
  Power best_power_ = 0;
  std::size_t nodes_ = 0;
  bool limited_ = false;
};

}  // namespace

TimingGraph::TimingGraph(std::size_t num_modules, std::vector<TimingEdge> edges,
                         std::vector<ModuleId> module_order, Time t_cycle)
    : num_modules_(num_modules), edges_(std::move(edges)), t_cycle_(t_cycle) {
  node_order_.reserve(num_nodes());
  node_order_.push_back(source());
  for (auto i : module_order) {
    node_order_.push_back(input(i));
    node_order_.push_back(output(i));
  }
  node_order_.push_back(sink());
  if (node_order_.size() != num_nodes()) {
    throw Error(ErrorCode::kInvalidArgument, "module order must list every module once");
  }
}

TimingGraph build_timing_graph(const Netlist& netlist, std::span<const Time> wire_delays) {
  const auto& nets = netlist.nets();
  if (wire_delays.size() != nets.size()) {
    throw Error(ErrorCode::kInvalidArgument, "wire delays must cover every net");
  }
  const auto order = topological_sort(netlist.size(), nets);
  if (!order) throw Error(ErrorCode::kCyclicNetlist, "net graph contains a cycle");

  const std::size_t m = netlist.size();
  std::vector<TimingEdge> edges;
  edges.reserve(m * 3 + nets.size() + 1);
  for (ModuleId i = 0; i < m; ++i) {
    edges.push_back({TimingGraph::input(i), TimingGraph::output(i), EdgeClass::kModule, i, 0});
  }
  std::vector<int> fanin(m, 0), fanout(m, 0);
  for (std::size_t j = 0; j < nets.size(); ++j) {
    if (wire_delays[j] < 0) throw Error(ErrorCode::kInvalidArgument, "negative wire delay");
    edges.push_back({TimingGraph::output(nets[j].source), TimingGraph::input(nets[j].sink),
                     EdgeClass::kWire, j, wire_delays[j]});
    ++fanout[nets[j].source];
    ++fanin[nets[j].sink];
  }
  for (ModuleId i = 0; i < m; ++i) {
    if (fanin[i] == 0) {
      edges.push_back({TimingGraph::source(), TimingGraph::input(i), EdgeClass::kSource, i, 0});
    }
    if (fanout[i] == 0) {
      edges.push_back({TimingGraph::output(i), TimingGraph::sink(), EdgeClass::kSink, i, 0});
    }
  }
  edges.push_back({TimingGraph::source(), TimingGraph::sink(), EdgeClass::kCycleBound, 0,
                   netlist.t_cycle()});
  return TimingGraph(m, std::move(edges), *order, netlist.t_cycle());
}

std::vector<Rational> compute_breakpoints(const DpCurve& curve) {
  std::vector<Rational> b;
  for (int q = 2; q <= curve.levels(); ++q) {
    b.emplace_back(curve.power(q - 1) - curve.power(q), curve.delay(q) - curve.delay(q - 1));
  }
  return b;
}

ExpandedNetwork build_expanded_network(const TimingGraph& tg, std::span<const DpCurve> curves) {
  const auto ranges = full_ranges(curves);
  return build_expanded_network(tg, curves, ranges);
}

ExpandedNetwork build_expanded_network(const TimingGraph& tg, std::span<const DpCurve> curves,
                                       std::span<const LevelRange> ranges) {
  check_curves(tg, curves);
  if (ranges.size() != curves.size()) {
    throw Error(ErrorCode::kInvalidArgument, "one level range per module is required");
  }
  std::vector<std::vector<Rational>> slopes(curves.size());
  Wide scale = 1;
  for (ModuleId i = 0; i < curves.size(); ++i) {
    const auto& r = ranges[i];
    if (r.lo < 1 || r.lo > r.hi || r.hi > curves[i].levels()) {
      throw Error(ErrorCode::kInvalidArgument, "level range outside the curve");
    }
    slopes[i] = compute_breakpoints(curves[i]);
    for (int q = r.lo + 1; q <= r.hi; ++q) {
      const std::int64_t den = slopes[i][q - 2].denominator();
      scale = scale / std::gcd(static_cast<std::int64_t>(scale), den) * den;
      checked_flow(scale);
    }
  }
  // Scaled breakpoint b(q) * scale for module i, with b(hi + 1) = 0.
  auto scaled = [&](ModuleId i, int q) -> Wide {
    if (q > ranges[i].hi) return 0;
    const auto& b = slopes[i][q - 2];
    return Wide{b.numerator()} * (scale / b.denominator());
  };
  Wide big_m = 1;
  for (ModuleId i = 0; i < curves.size(); ++i) {
    if (ranges[i].hi > ranges[i].lo) big_m += scaled(i, ranges[i].lo + 1);
  }
  // Excesses during the solve stay below M times the arc count.
  checked_flow(big_m * static_cast<Wide>(tg.edges().size() + 4 * curves.size()));
  const Flow m = static_cast<Flow>(big_m);

  ExpandedNetwork ex;
  ex.capacity_scale = static_cast<Flow>(scale);
  ex.network = FlowNetwork(tg.num_nodes());
  ex.network.set_big_m(m);
  ex.module_arcs.resize(curves.size());
  for (const auto& e : tg.edges()) {
    switch (e.kind) {
      case EdgeClass::kModule: {
        const ModuleId i = e.index;
        const auto& c = curves[i];
        const auto [lo, hi] = ranges[i];
        const std::string prefix = "E1:m" + std::to_string(i) + ":q";
        for (int q = hi; q > lo; --q) {
          const Flow cap = static_cast<Flow>(scaled(i, q) - scaled(i, q + 1));
          ex.module_arcs[i].push_back(
              ex.network.add_arc(e.tail, e.head, -c.delay(q), 0, cap, prefix + std::to_string(q)));
        }
        const Flow top = static_cast<Flow>(big_m - (hi > lo ? scaled(i, lo + 1) : 0));
        ex.module_arcs[i].push_back(ex.network.add_arc(e.tail, e.head, -c.delay(lo), 0, top,
                                                       prefix + std::to_string(lo), true));
        break;
      }
      case EdgeClass::kWire:
        ex.network.add_arc(e.tail, e.head, -e.delay, 0, m, "E2:n" + std::to_string(e.index), true);
        break;
      case EdgeClass::kSource:
        ex.network.add_arc(e.tail, e.head, 0, 0, m, "E3:src:m" + std::to_string(e.index), true);
        break;
      case EdgeClass::kSink:
        ex.network.add_arc(e.tail, e.head, 0, 0, m, "E3:snk:m" + std::to_string(e.index), true);
        break;
      case EdgeClass::kCycleBound:
        // mu_s - mu_t >= -T_cycle, i.e. an arc t -> s of cost +T_cycle.
        ex.network.add_arc(e.head, e.tail, e.delay, 0, m, "E3:tcycle", true);
        break;
    }
  }
  return ex;
}

Relaxation solve_relaxation(const TimingGraph& tg, std::span<const DpCurve> curves,
                            std::span<const LevelRange> ranges, CirculationAlgorithm algorithm) {
  const auto ex = build_expanded_network(tg, curves, ranges);
  const auto flow = solve_min_cost_circulation(ex.network, algorithm);
  const auto dist = residual_shortest_paths(ex.network, flow, TimingGraph::source());

  Relaxation r;
  r.objective = flow.objective;
  r.capacity_scale = ex.capacity_scale;
  r.potential.resize(tg.num_nodes());
  for (NodeId v = 0; v < tg.num_nodes(); ++v) {
    if (!dist[v]) throw Error(ErrorCode::kInvalidNetwork, "timing node unreachable in G'");
    r.potential[v] = -*dist[v];
  }
  Power slowest_power = 0;
  r.gap.resize(tg.num_modules());
  r.rounded.resize(tg.num_modules());
  for (ModuleId i = 0; i < tg.num_modules(); ++i) {
    const auto& c = curves[i];
    r.gap[i] = r.potential[TimingGraph::output(i)] - r.potential[TimingGraph::input(i)];
    int q = ranges[i].lo;
    while (q < ranges[i].hi && c.delay(q + 1) <= r.gap[i]) ++q;
    r.rounded[i] = q;
    slowest_power += c.power(ranges[i].hi);
  }
  r.bound = BigRational(slowest_power) - BigRational(flow.objective) / BigRational(ex.capacity_scale);
  return r;
}

VoltageAssignment assign_voltages(const TimingGraph& tg, std::span<const DpCurve> curves,
                                  const AssignOptions& options) {
  check_curves(tg, curves);
  const std::vector<int> fastest(tg.num_modules(), 1);
  if (longest_path_delay(tg, curves, fastest) > tg.t_cycle()) {
    throw Error(ErrorCode::kTimingInfeasible,
                "longest path at the highest voltage exceeds T_cycle " +
                    std::to_string(tg.t_cycle()));
  }
  if (!options.exact) {
    const auto ranges = full_ranges(curves);
    const Relaxation relax = solve_relaxation(tg, curves, ranges, options.algorithm);
    VoltageAssignment va;
    va.level = relax.rounded;
    va.total_power = total_power(curves, va.level);
    va.arrival = arrival_times(tg, curves, va.level);
    va.proven_optimal = BigRational(va.total_power) == relax.bound;
    va.search_nodes = 1;
    return va;
  }
  BranchAndBound search(tg, curves, options);
  search.explore(full_ranges(curves));
  return search.result();
}

Time longest_path_delay(const TimingGraph& tg, std::span<const DpCurve> curves,
                        std::span<const int> levels) {
  return forward_pass(tg, curves, levels).arrival[TimingGraph::sink()];
}

std::vector<Time> arrival_times(const TimingGraph& tg, std::span<const DpCurve> curves,
                                std::span<const int> levels) {
  auto arr = forward_pass(tg, curves, levels).arrival;
  for (auto& a : arr) a = std::max<Time>(a, 0);
  return arr;
}

std::vector<ModuleId> critical_path(const TimingGraph& tg, std::span<const DpCurve> curves,
                                    std::span<const int> levels) {
  const auto st = forward_pass(tg, curves, levels);
  std::vector<ModuleId> path;
  NodeId v = TimingGraph::sink();
  while (st.via[v] != std::numeric_limits<std::size_t>::max()) {
    const auto& e = tg.edges()[st.via[v]];
    if (e.kind == EdgeClass::kModule) path.push_back(e.index);
    v = e.tail;
  }
  std::reverse(path.begin(), path.end());
  return path;
}

VoltageAssignment brute_force_assign(const TimingGraph& tg, std::span<const DpCurve> curves,
                                     std::size_t max_modules) {
  check_curves(tg, curves);
  const std::size_t m = tg.num_modules();
  if (m > max_modules) {
    throw Error(ErrorCode::kTooLarge, std::to_string(m) + " modules exceed the oracle bound of " +
                                          std::to_string(max_modules));
  }
  std::vector<int> levels(m, 1);
  std::optional<std::vector<int>> best;
  Power best_power = 0;
  for (;;) {
    if (longest_path_delay(tg, curves, levels) <= tg.t_cycle()) {
      const Power p = total_power(curves, levels);
      if (!best || p < best_power) {
        best = levels;
        best_power = p;
      }
    }
    // Odometer increment in lexicographic order (last module varies fastest).
    bool exhausted = true;
    for (std::size_t i = m; i-- > 0;) {
      if (levels[i] < curves[i].levels()) {
        ++levels[i];
        std::fill(levels.begin() + static_cast<std::ptrdiff_t>(i) + 1, levels.end(), 1);
        exhausted = false;
        break;
      }
    }
    if (exhausted) break;
  }
  if (!best) throw Error(ErrorCode::kTimingInfeasible, "no assignment meets T_cycle");
  VoltageAssignment va;
  va.level = *best;
  va.total_power = best_power;
  va.arrival = arrival_times(tg, curves, va.level);
  return va;
}

Power total_power(std::span<const DpCurve> curves, std::span<const int> levels) {
  Power p = 0;
  for (std::size_t i = 0; i < curves.size(); ++i) p += curves[i].power(levels[i]);
  return p;
}

}  // namespace mvls
