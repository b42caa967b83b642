#pragma once

#include <span>
#include <string>
#include <vector>

#include "mvls/flow.hpp"
#include "mvls/model.hpp"
#include "mvls/types.hpp"

namespace mvls {

enum class EdgeClass {
  kModule,      // E1: (I_i, O_i), delay chosen from the module's curve
  kWire,        // E2: (O_i, I_j) per net, fixed wire delay
  kSource,      // E3: (s, I_i) for modules without fan-in
  kSink,        // E3: (O_i, t) for modules without fan-out
  kCycleBound,  // (s, t): mu_t - mu_s <= T_cycle
};

struct TimingEdge {
  NodeId tail = 0;
  NodeId head = 0;
  EdgeClass kind = EdgeClass::kModule;
  std::size_t index = 0;  // module id for kModule/kSource/kSink, net id for kWire
  Time delay = 0;         // wire delay for kWire, T_cycle for kCycleBound, else 0
};

// Split-node timing DAG: node 0 is s, node 1 is t, module i owns input node
// 2+2i and output node 3+2i.
class TimingGraph {
 public:
  TimingGraph(std::size_t num_modules, std::vector<TimingEdge> edges,
              std::vector<ModuleId> module_order, Time t_cycle);

  static constexpr NodeId source() noexcept { return 0; }
  static constexpr NodeId sink() noexcept { return 1; }
  static constexpr NodeId input(ModuleId i) noexcept { return 2 + 2 * i; }
  static constexpr NodeId output(ModuleId i) noexcept { return 3 + 2 * i; }

  [[nodiscard]] std::size_t num_modules() const noexcept { return num_modules_; }
  [[nodiscard]] std::size_t num_nodes() const noexcept { return 2 * num_modules_ + 2; }
  [[nodiscard]] const std::vector<TimingEdge>& edges() const noexcept { return edges_; }
  [[nodiscard]] Time t_cycle() const noexcept { return t_cycle_; }
  // Timing nodes in an order where every edge except the cycle bound runs forward.
  [[nodiscard]] const std::vector<NodeId>& node_order() const noexcept { return node_order_; }

 private:
  std::size_t num_modules_;
  std::vector<TimingEdge> edges_;
  Time t_cycle_;
  std::vector<NodeId> node_order_;
};

// Throws kInvalidArgument when wire_delays does not cover every net or holds
// a negative value, kCyclicNetlist on a cyclic net graph.
TimingGraph build_timing_graph(const Netlist& netlist, std::span<const Time> wire_delays);

// Slope magnitudes b(2)..b(k) of a curve, exact.
std::vector<Rational> compute_breakpoints(const DpCurve& curve);

// Inclusive range of levels a module may still take (used by branch and bound).
struct LevelRange {
  int lo = 1;
  int hi = 1;
};

struct ExpandedNetwork {
  FlowNetwork network;
  // All breakpoint capacities are multiplied by this common denominator so
  // that every capacity is an integer.
  Flow capacity_scale = 1;
  // Per module, the parallel E1 arcs ordered from slowest to fastest level.
  std::vector<std::vector<ArcId>> module_arcs;
};

// Builds G' for the full level range of every curve.
ExpandedNetwork build_expanded_network(const TimingGraph& tg, std::span<const DpCurve> curves);
ExpandedNetwork build_expanded_network(const TimingGraph& tg, std::span<const DpCurve> curves,
                                       std::span<const LevelRange> ranges);

// Optimum of the convex (piecewise-linear interpolated) relaxation of the
// voltage assignment program, recovered from the min-cost circulation on G'.
struct Relaxation {
  std::vector<Time> potential;  // mu per timing node, mu(s) = 0
  std::vector<Time> gap;        // per module, mu(O_i) - mu(I_i)
  std::vector<int> rounded;     // per module, largest allowed level with delay <= gap
  BigRational bound;            // relaxed power, a lower bound on any discrete assignment
  Cost objective = 0;
  Flow capacity_scale = 1;
};

Relaxation solve_relaxation(const TimingGraph& tg, std::span<const DpCurve> curves,
                            std::span<const LevelRange> ranges,
                            CirculationAlgorithm algorithm = CirculationAlgorithm::kCostScaling);

struct VoltageAssignment {
  std::vector<int> level;    // per module, 1..k
  Power total_power = 0;     // sum of the (modified) curve power at the chosen level
  std::vector<Time> arrival; // earliest arrival time per timing node under the chosen delays
  bool proven_optimal = true;
  std::size_t search_nodes = 0;
};

struct AssignOptions {
  // Branch on modules whose relaxed delay falls between two levels, until the
  // discrete optimum is proven. When false the rounded relaxation is returned.
  bool exact = true;
  std::size_t node_limit = 20000;
  CirculationAlgorithm algorithm = CirculationAlgorithm::kCostScaling;
};

// Throws Error{kTimingInfeasible} when even the fastest levels miss T_cycle.
VoltageAssignment assign_voltages(const TimingGraph& tg, std::span<const DpCurve> curves,
                                  const AssignOptions& options = {});

// Longest s-t path using the delay of each module's chosen level.
Time longest_path_delay(const TimingGraph& tg, std::span<const DpCurve> curves,
                        std::span<const int> levels);

// Earliest arrival time of every timing node.
std::vector<Time> arrival_times(const TimingGraph& tg, std::span<const DpCurve> curves,
                                std::span<const int> levels);

// Critical path as a module list, for diagnostics.
std::vector<ModuleId> critical_path(const TimingGraph& tg, std::span<const DpCurve> curves,
                                    std::span<const int> levels);

// Exhaustive k^m enumeration; ties go to the lexicographically smallest level
// vector. Throws kTooLarge above `max_modules`, kTimingInfeasible.
VoltageAssignment brute_force_assign(const TimingGraph& tg, std::span<const DpCurve> curves,
                                     std::size_t max_modules = 8);

Power total_power(std::span<const DpCurve> curves, std::span<const int> levels);

}  // namespace mvls
