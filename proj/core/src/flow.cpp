#include "mvls/flow.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <ostream>
#include <queue>
#include <sstream>

#include "mvls/error.hpp"
#include "mvls/types.hpp"

namespace mvls {

namespace {

constexpr Cost kInfCost = std::numeric_limits<Cost>::max() / 4;
constexpr Cost kScalingAlpha = 8;

Flow checked(Wide v, const char* what) {
  if (v > std::numeric_limits<Flow>::max() || v < std::numeric_limits<Flow>::min()) {
    throw Error(ErrorCode::kOverflow, what);
  }
  return static_cast<Flow>(v);
}

// Residual graph. Arc 2i is the forward copy of input arc i, 2i+1 its reverse.
class Residual {
 public:
  explicit Residual(std::size_t n) : adj_(n) {}

  std::size_t add(NodeId u, NodeId v, Flow cap, Cost cost) {
    const std::size_t id = head_.size();
    head_.push_back(v);
    cap_.push_back(cap);
    cost_.push_back(cost);
    head_.push_back(u);
    cap_.push_back(0);
    cost_.push_back(-cost);
    adj_[u].push_back(id);
    adj_[v].push_back(id + 1);
    return id;
  }

  NodeId add_node() {
    adj_.emplace_back();
    return adj_.size() - 1;
  }

  void push(std::size_t a, Flow amount) {
    cap_[a] -= amount;
    cap_[a ^ 1] += amount;
  }

  [[nodiscard]] std::size_t num_nodes() const { return adj_.size(); }
  [[nodiscard]] std::size_t num_arcs() const { return head_.size(); }
  [[nodiscard]] NodeId head(std::size_t a) const { return head_[a]; }
  [[nodiscard]] NodeId tail(std::size_t a) const { return head_[a ^ 1]; }
  [[nodiscard]] Flow cap(std::size_t a) const { return cap_[a]; }
  [[nodiscard]] Cost cost(std::size_t a) const { return cost_[a]; }
  [[nodiscard]] const std::vector<std::size_t>& out(NodeId v) const { return adj_[v]; }

  void close(std::size_t a) {
    cap_[a] = 0;
    cap_[a ^ 1] = 0;
  }

 private:
  std::vector<std::vector<std::size_t>> adj_;
  std::vector<NodeId> head_;
  std::vector<Flow> cap_;
  std::vector<Cost> cost_;
};

// Builds the residual graph over shifted flows f' = f - lower and returns the
// per-node excess that the shifted flow must ship out.
std::vector<Flow> build_residual(const FlowNetwork& net, Residual& res) {
  std::vector<Wide> excess(net.num_nodes(), 0);
  for (const auto& a : net.arcs()) {
    res.add(a.tail, a.head, checked(Wide{a.upper} - a.lower, "arc capacity range"), a.cost);
    excess[a.head] += a.lower;
    excess[a.tail] -= a.lower;
  }
  std::vector<Flow> out(excess.size());
  for (std::size_t v = 0; v < excess.size(); ++v) out[v] = checked(excess[v], "node imbalance");
  return out;
}

FlowResult extract(const FlowNetwork& net, const Residual& res) {
  FlowResult r;
  r.flow.resize(net.arcs().size());
  Wide objective = 0;
  for (std::size_t i = 0; i < net.arcs().size(); ++i) {
    const auto& a = net.arcs()[i];
    r.flow[i] = a.lower + res.cap(2 * i + 1);
    objective += Wide{r.flow[i]} * a.cost;
  }
  r.objective = checked(objective, "objective");
  return r;
}

class Dinic {
 public:
  Dinic(Residual& res, NodeId s, NodeId t)
      : res_(res), s_(s), t_(t), level_(res.num_nodes()), it_(res.num_nodes()) {}

  Flow run() {
    Flow total = 0;
    while (bfs()) {
      std::fill(it_.begin(), it_.end(), 0);
      while (Flow f = dfs(s_, std::numeric_limits<Flow>::max())) total += f;
    }
    return total;
  }

 private:
  bool bfs() {
    std::fill(level_.begin(), level_.end(), -1);
    std::queue<NodeId> q;
    level_[s_] = 0;
    q.push(s_);
    while (!q.empty()) {
      const NodeId v = q.front();
      q.pop();
      for (auto a : res_.out(v)) {
        if (res_.cap(a) > 0 && level_[res_.head(a)] < 0) {
          level_[res_.head(a)] = level_[v] + 1;
          q.push(res_.head(a));
        }
      }
    }
    return level_[t_] >= 0;
  }

  Flow dfs(NodeId v, Flow limit) {
    if (v == t_) return limit;
    for (auto& i = it_[v]; i < res_.out(v).size(); ++i) {
      const auto a = res_.out(v)[i];
      const NodeId w = res_.head(a);
      if (res_.cap(a) <= 0 || level_[w] != level_[v] + 1) continue;
      if (Flow f = dfs(w, std::min(limit, res_.cap(a)))) {
        res_.push(a, f);
        return f;
      }
    }
    return 0;
  }

  Residual& res_;
  NodeId s_, t_;
  std::vector<int> level_;
  std::vector<std::size_t> it_;
};

// Routes the given excesses through the residual graph with a max-flow from a
// super source to a super sink; returns false when that is impossible.
bool make_feasible(Residual& res, const std::vector<Flow>& excess) {
  const std::size_t n = excess.size();
  Wide required = 0;
  for (std::size_t v = 0; v < n; ++v) {
    if (excess[v] > 0) required += excess[v];
  }
  if (required == 0) return true;
  const NodeId s = res.add_node();
  const NodeId t = res.add_node();
  std::vector<std::size_t> super_arcs;
  for (NodeId v = 0; v < n; ++v) {
    if (excess[v] > 0) super_arcs.push_back(res.add(s, v, excess[v], 0));
    if (excess[v] < 0) super_arcs.push_back(res.add(v, t, -excess[v], 0));
  }
  const Flow shipped = Dinic(res, s, t).run();
  for (auto a : super_arcs) res.close(a);
  return Wide{shipped} == required;
}

// Epsilon-scaling push/relabel on a residual graph that already carries a
// feasible circulation.
class CostScaling {
 public:
  explicit CostScaling(Residual& res)
      : res_(res),
        price_(res.num_nodes(), 0),
        excess_(res.num_nodes(), 0),
        current_(res.num_nodes(), 0),
        scale_(static_cast<Cost>(res.num_nodes()) + 1) {
    for (std::size_t a = 0; a < res_.num_arcs(); ++a) {
      const Wide c = res_.cost(a);
      checked((c < 0 ? -c : c) * scale_ * 4 * scale_, "cost too large for epsilon scaling");
    }
  }

  void run() {
    Cost eps = 0;
    for (std::size_t a = 0; a < res_.num_arcs(); ++a) {
      eps = std::max(eps, checked(Wide{scaled(a)} < 0 ? -Wide{scaled(a)} : Wide{scaled(a)},
                                  "scaled cost"));
    }
    if (eps == 0) return;
    do {
      eps = std::max<Cost>(1, eps / kScalingAlpha);
      refine(eps);
    } while (eps > 1);
  }

 private:
  [[nodiscard]] Cost scaled(std::size_t a) const { return res_.cost(a) * scale_; }
  [[nodiscard]] Cost reduced(std::size_t a) const {
    return scaled(a) + price_[res_.tail(a)] - price_[res_.head(a)];
  }

  void push(std::size_t a, Flow amount) {
    res_.push(a, amount);
    excess_[res_.tail(a)] -= amount;
    excess_[res_.head(a)] += amount;
  }

  void refine(Cost eps) {
    std::deque<NodeId> active;
    for (std::size_t a = 0; a < res_.num_arcs(); ++a) {
      if (res_.cap(a) > 0 && reduced(a) < 0) push(a, res_.cap(a));
    }
    for (NodeId v = 0; v < res_.num_nodes(); ++v) {
      current_[v] = 0;
      if (excess_[v] > 0) active.push_back(v);
    }
    while (!active.empty()) {
      const NodeId v = active.front();
      active.pop_front();
      discharge(v, eps, active);
    }
  }

  void discharge(NodeId v, Cost eps, std::deque<NodeId>& active) {
    const auto& out = res_.out(v);
    while (excess_[v] > 0) {
      if (current_[v] == out.size()) {
        relabel(v, eps);
        current_[v] = 0;
        continue;
      }
      const auto a = out[current_[v]];
      if (res_.cap(a) > 0 && reduced(a) < 0) {
        const NodeId w = res_.head(a);
        const bool was_active = excess_[w] > 0;
        push(a, std::min(excess_[v], res_.cap(a)));
        if (!was_active && excess_[w] > 0) active.push_back(w);
        if (res_.cap(a) == 0) ++current_[v];
      } else {
        ++current_[v];
      }
    }
  }

  void relabel(NodeId v, Cost eps) {
    Cost best = std::numeric_limits<Cost>::min();
    for (auto a : res_.out(v)) {
      if (res_.cap(a) > 0) best = std::max(best, price_[res_.head(a)] - scaled(a));
    }
    if (best == std::numeric_limits<Cost>::min()) {
      throw Error(ErrorCode::kInvalidNetwork, "active node without residual arcs");
    }
    price_[v] = best - eps;
  }

  Residual& res_;
  std::vector<Cost> price_;
  std::vector<Flow> excess_;
  std::vector<std::size_t> current_;
  Cost scale_;
};

// Dijkstra over reduced costs from `s`; fills `dist` (kInfCost when
// unreachable) and the arc used to reach every node.
void dijkstra(const Residual& res, const std::vector<Cost>& pot, NodeId s,
              std::vector<Cost>& dist, std::vector<std::size_t>& via) {
  using Item = std::pair<Cost, NodeId>;
  std::fill(dist.begin(), dist.end(), kInfCost);
  std::fill(via.begin(), via.end(), std::numeric_limits<std::size_t>::max());
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  dist[s] = 0;
  heap.emplace(0, s);
  while (!heap.empty()) {
    const auto [d, v] = heap.top();
    heap.pop();
    if (d != dist[v]) continue;
    for (auto a : res.out(v)) {
      if (res.cap(a) <= 0) continue;
      const NodeId w = res.head(a);
      const Cost nd = d + res.cost(a) + pot[v] - pot[w];
      if (nd < dist[w]) {
        dist[w] = nd;
        via[w] = a;
        heap.emplace(nd, w);
      }
    }
  }
}

void ssp_circulation(Residual& res, std::vector<Flow> excess) {
  const std::size_t n = excess.size();
  // Saturating every negative arc leaves only nonnegative residual costs.
  for (std::size_t a = 0; a < res.num_arcs(); a += 2) {
    if (res.cost(a) < 0 && res.cap(a) > 0) {
      const Flow c = res.cap(a);
      res.push(a, c);
      excess[res.tail(a)] = checked(Wide{excess[res.tail(a)]} - c, "excess");
      excess[res.head(a)] = checked(Wide{excess[res.head(a)]} + c, "excess");
    }
  }
  const NodeId s = res.add_node();
  const NodeId t = res.add_node();
  Wide required = 0;
  for (NodeId v = 0; v < n; ++v) {
    if (excess[v] > 0) {
      res.add(s, v, excess[v], 0);
      required += excess[v];
    } else if (excess[v] < 0) {
      res.add(v, t, -excess[v], 0);
    }
  }
  std::vector<Cost> pot(res.num_nodes(), 0), dist(res.num_nodes());
  std::vector<std::size_t> via(res.num_nodes());
  Wide shipped = 0;
  while (shipped < required) {
    dijkstra(res, pot, s, dist, via);
    if (dist[t] >= kInfCost) break;
    for (NodeId v = 0; v < res.num_nodes(); ++v) {
      if (dist[v] < kInfCost) pot[v] += dist[v];
    }
    Flow bottleneck = std::numeric_limits<Flow>::max();
    for (NodeId v = t; v != s; v = res.tail(via[v])) bottleneck = std::min(bottleneck, res.cap(via[v]));
    for (NodeId v = t; v != s; v = res.tail(via[v])) res.push(via[v], bottleneck);
    shipped += bottleneck;
  }
  if (shipped != required) {
    throw Error(ErrorCode::kInfeasibleLowerBounds, "no circulation satisfies the lower bounds");
  }
}

}  // namespace

ArcId FlowNetwork::add_arc(NodeId tail, NodeId head, Cost cost, Flow lower, Flow upper,
                           std::string tag, bool uncapacitated) {
  arcs_.push_back({tail, head, cost, lower, upper, std::move(tag), uncapacitated});
  return arcs_.size() - 1;
}

void FlowNetwork::validate() const {
  for (std::size_t i = 0; i < arcs_.size(); ++i) {
    const auto& a = arcs_[i];
    const std::string where = "arc " + std::to_string(i);
    if (a.tail >= num_nodes_ || a.head >= num_nodes_) {
      throw Error(ErrorCode::kInvalidNetwork, where + " has an endpoint out of range");
    }
    if (a.tail == a.head) throw Error(ErrorCode::kInvalidNetwork, where + " is a self loop");
    if (a.lower > a.upper) throw Error(ErrorCode::kInvalidNetwork, where + " has lower > upper");
  }
}

FlowResult solve_min_cost_circulation(const FlowNetwork& net, CirculationAlgorithm algorithm) {
  net.validate();
  Residual res(net.num_nodes());
  auto excess = build_residual(net, res);
  if (algorithm == CirculationAlgorithm::kCostScaling) {
    if (!make_feasible(res, excess)) {
      throw Error(ErrorCode::kInfeasibleLowerBounds, "no circulation satisfies the lower bounds");
    }
    CostScaling(res).run();
  } else {
    ssp_circulation(res, std::move(excess));
  }
  return extract(net, res);
}

FlowResult solve_min_cost_max_flow(const FlowNetwork& net, NodeId s, NodeId t) {
  net.validate();
  if (s >= net.num_nodes() || t >= net.num_nodes() || s == t) {
    throw Error(ErrorCode::kInvalidNetwork, "bad source/sink");
  }
  bool negative = false;
  for (const auto& a : net.arcs()) {
    if (a.lower != 0) throw Error(ErrorCode::kInvalidNetwork, "max-flow mode requires zero lower bounds");
    negative = negative || a.cost < 0;
  }
  Residual res(net.num_nodes());
  build_residual(net, res);
  std::vector<Cost> pot(net.num_nodes(), 0);
  if (negative) {
    // Cancel negative cycles first; SSP then keeps the residual cycle-free.
    CostScaling(res).run();
    std::vector<Cost> dist(net.num_nodes(), kInfCost);
    dist[s] = 0;
    for (std::size_t pass = 0; pass < net.num_nodes(); ++pass) {
      bool changed = false;
      for (std::size_t a = 0; a < res.num_arcs(); ++a) {
        if (res.cap(a) <= 0 || dist[res.tail(a)] >= kInfCost) continue;
        if (dist[res.tail(a)] + res.cost(a) < dist[res.head(a)]) {
          dist[res.head(a)] = dist[res.tail(a)] + res.cost(a);
          changed = true;
        }
      }
      if (!changed) break;
    }
    for (NodeId v = 0; v < net.num_nodes(); ++v) pot[v] = dist[v] < kInfCost ? dist[v] : 0;
  }
  std::vector<Cost> dist(net.num_nodes());
  std::vector<std::size_t> via(net.num_nodes());
  Wide value = 0;
  for (;;) {
    dijkstra(res, pot, s, dist, via);
    if (dist[t] >= kInfCost) break;
    for (NodeId v = 0; v < net.num_nodes(); ++v) {
      if (dist[v] < kInfCost) pot[v] += dist[v];
    }
    Flow bottleneck = std::numeric_limits<Flow>::max();
    for (NodeId v = t; v != s; v = res.tail(via[v])) bottleneck = std::min(bottleneck, res.cap(via[v]));
    for (NodeId v = t; v != s; v = res.tail(via[v])) res.push(via[v], bottleneck);
    value += bottleneck;
  }
  FlowResult r = extract(net, res);
  r.value = checked(value, "flow value");
  return r;
}

namespace {

struct ResidualEdge {
  NodeId from;
  NodeId to;
  Cost cost;
};

std::vector<ResidualEdge> residual_edges(const FlowNetwork& net, const FlowResult& result) {
  if (result.status != FlowStatus::kOptimal || result.flow.size() != net.arcs().size()) {
    throw Error(ErrorCode::kInvalidArgument, "flow result does not match the network");
  }
  std::vector<ResidualEdge> edges;
  edges.reserve(2 * net.arcs().size());
  for (std::size_t i = 0; i < net.arcs().size(); ++i) {
    const auto& a = net.arcs()[i];
    const Flow f = result.flow[i];
    if (f < a.upper || a.uncapacitated) edges.push_back({a.tail, a.head, a.cost});
    if (f > a.lower) edges.push_back({a.head, a.tail, -a.cost});
  }
  return edges;
}

std::vector<Cost> bellman_ford(std::size_t n, const std::vector<ResidualEdge>& edges,
                               std::vector<Cost> dist) {
  for (std::size_t pass = 0; pass <= n; ++pass) {
    bool changed = false;
    for (const auto& e : edges) {
      if (dist[e.from] >= kInfCost) continue;
      if (dist[e.from] + e.cost < dist[e.to]) {
        dist[e.to] = dist[e.from] + e.cost;
        changed = true;
      }
    }
    if (!changed) return dist;
  }
  throw Error(ErrorCode::kNegativeResidualCycle, "residual network has a negative cycle");
}

}  // namespace

std::vector<std::optional<Cost>> residual_shortest_paths(const FlowNetwork& net,
                                                         const FlowResult& result, NodeId src) {
  if (src >= net.num_nodes()) throw Error(ErrorCode::kInvalidArgument, "source out of range");
  std::vector<Cost> dist(net.num_nodes(), kInfCost);
  dist[src] = 0;
  dist = bellman_ford(net.num_nodes(), residual_edges(net, result), std::move(dist));
  std::vector<std::optional<Cost>> out(net.num_nodes());
  for (NodeId v = 0; v < net.num_nodes(); ++v) {
    if (dist[v] < kInfCost) out[v] = dist[v];
  }
  return out;
}

std::vector<Cost> residual_potentials(const FlowNetwork& net, const FlowResult& result) {
  // Starting every node at 0 is the same as a virtual root with 0-cost arcs.
  return bellman_ford(net.num_nodes(), residual_edges(net, result),
                      std::vector<Cost>(net.num_nodes(), 0));
}

std::string check_flow(const FlowNetwork& net, const FlowResult& result, std::optional<NodeId> s,
                       std::optional<NodeId> t) {
  if (result.flow.size() != net.arcs().size()) return "flow vector size mismatch";
  std::vector<Wide> balance(net.num_nodes(), 0);
  Wide objective = 0;
  for (std::size_t i = 0; i < net.arcs().size(); ++i) {
    const auto& a = net.arcs()[i];
    const Flow f = result.flow[i];
    if (f < a.lower || f > a.upper) return "arc " + std::to_string(i) + " violates its bounds";
    balance[a.tail] -= f;
    balance[a.head] += f;
    objective += Wide{f} * a.cost;
  }
  for (NodeId v = 0; v < net.num_nodes(); ++v) {
    if ((s && v == *s) || (t && v == *t)) continue;
    if (balance[v] != 0) return "conservation violated at node " + std::to_string(v);
  }
  if (s && t) {
    if (balance[*t] != result.value || balance[*s] != -Wide{result.value}) {
      return "source/sink balance does not match the flow value";
    }
  }
  if (objective != result.objective) return "objective does not equal sum of cost*flow";
  return {};
}

void write_network(std::ostream& os, const FlowNetwork& net) {
  for (const auto& a : net.arcs()) {
    os << a.tail << ' ' << a.head << ' ' << a.cost << ' ' << a.lower << ' ' << a.upper << ' '
       << (a.tag.empty() ? "-" : a.tag) << '\n';
  }
}

}  // namespace mvls
