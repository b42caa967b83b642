#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace mvls {

using NodeId = std::size_t;
using ArcId = std::size_t;
using Flow = std::int64_t;
using Cost = std::int64_t;

struct FlowArc {
  NodeId tail = 0;
  NodeId head = 0;
  Cost cost = 0;
  Flow lower = 0;
  Flow upper = 0;
  std::string tag;
  // `upper` is a finite stand-in (the big-M constant) for an unbounded arc.
  // Solvers honour it as a capacity; residual_shortest_paths keeps the forward
  // residual arc even when the flow reaches it.
  bool uncapacitated = false;
};

// Directed multigraph with integer costs and [lower, upper] bounds. Lower
// bounds may be negative; solvers normalise them internally.
class FlowNetwork {
 public:
  FlowNetwork() = default;
  explicit FlowNetwork(std::size_t num_nodes) : num_nodes_(num_nodes) {}

  NodeId add_node() { return num_nodes_++; }
  ArcId add_arc(NodeId tail, NodeId head, Cost cost, Flow lower, Flow upper,
                std::string tag = {}, bool uncapacitated = false);

  [[nodiscard]] std::size_t num_nodes() const noexcept { return num_nodes_; }
  [[nodiscard]] const std::vector<FlowArc>& arcs() const noexcept { return arcs_; }
  [[nodiscard]] const FlowArc& arc(ArcId a) const { return arcs_.at(a); }

  // The "huge coefficient" used for unbounded capacities, if one was set.
  [[nodiscard]] Flow big_m() const noexcept { return big_m_; }
  void set_big_m(Flow m) { big_m_ = m; }

  // Throws Error{kInvalidNetwork}: bad endpoints, self loops, lower > upper.
  void validate() const;

 private:
  std::size_t num_nodes_ = 0;
  std::vector<FlowArc> arcs_;
  Flow big_m_ = 0;
};

enum class FlowStatus { kOptimal, kInfeasible };

struct FlowResult {
  std::vector<Flow> flow;  // per arc
  Cost objective = 0;      // sum of cost * flow
  Flow value = 0;          // s-t flow value in max-flow mode, 0 for circulations
  std::vector<std::optional<Cost>> potentials;  // filled by residual_shortest_paths
  FlowStatus status = FlowStatus::kOptimal;
};

enum class CirculationAlgorithm {
  kCostScaling,             // Goldberg-Tarjan push/relabel with epsilon scaling
  kSuccessiveShortestPath,  // saturate negative arcs, then route excess by Dijkstra
};

// Minimum-cost circulation honouring all bounds. Throws
// Error{kInfeasibleLowerBounds} when the lower bounds admit no circulation.
FlowResult solve_min_cost_circulation(
    const FlowNetwork& net, CirculationAlgorithm algorithm = CirculationAlgorithm::kCostScaling);

// Maximum s-t flow of minimum cost. All lower bounds must be zero; negative
// cost cycles are cancelled first, so arbitrary integer costs are accepted.
FlowResult solve_min_cost_max_flow(const FlowNetwork& net, NodeId s, NodeId t);

// Bellman-Ford distances from `src` over the residual network of `result`.
// Unreachable nodes are std::nullopt. Throws Error{kNegativeResidualCycle}
// when the flow is not optimal.
std::vector<std::optional<Cost>> residual_shortest_paths(const FlowNetwork& net,
                                                         const FlowResult& result, NodeId src);

// Distances from a virtual root joined to every node by zero-cost arcs, i.e.
// a full set of optimal node potentials. Same error contract as above.
std::vector<Cost> residual_potentials(const FlowNetwork& net, const FlowResult& result);

// Checks bounds and conservation (with `s`/`t` exempt when given); returns a
// description of the first violation, or an empty string.
std::string check_flow(const FlowNetwork& net, const FlowResult& result,
                       std::optional<NodeId> s = std::nullopt,
                       std::optional<NodeId> t = std::nullopt);

// Debug dump: one arc per line, `tail head cost lower upper tag`.
void write_network(std::ostream& os, const FlowNetwork& net);

}  // namespace mvls
