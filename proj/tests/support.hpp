#pragma once

// Test-only oracles and instance generators. Nothing here calls the solver
// code it is used to check.

#include <algorithm>
#include <functional>
#include <limits>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "mvls/anneal.hpp"
#include "mvls/flow.hpp"
#include "mvls/model.hpp"
#include "mvls/random.hpp"
#include "mvls/shifter.hpp"
#include "mvls/voltage.hpp"

namespace mvls::test {

// ---------------------------------------------------------------------------
// Flow enumeration

struct Enumerated {
  Flow value = 0;
  Cost cost = 0;
};

// Every integer flow within the arc bounds, filtered by conservation at all
// nodes except s and t. Among feasible flows, maximizes the s-t value, then
// minimizes cost. With no s/t this is the min-cost circulation.
inline std::optional<Enumerated> enumerate_flows(const FlowNetwork& net, std::optional<NodeId> s = {},
                                                 std::optional<NodeId> t = {}) {
  const auto& arcs = net.arcs();
  std::vector<Flow> f(arcs.size());
  std::optional<Enumerated> best;
  std::function<void(std::size_t)> rec = [&](std::size_t i) {
    if (i == arcs.size()) {
      std::vector<Flow> bal(net.num_nodes(), 0);
      Cost cost = 0;
      for (std::size_t a = 0; a < arcs.size(); ++a) {
        bal[arcs[a].tail] -= f[a];
        bal[arcs[a].head] += f[a];
        cost += arcs[a].cost * f[a];
      }
      for (NodeId v = 0; v < net.num_nodes(); ++v) {
        if ((s && v == *s) || (t && v == *t)) continue;
        if (bal[v] != 0) return;
      }
      const Flow value = t ? bal[*t] : 0;
      if (!best || value > best->value || (value == best->value && cost < best->cost)) best = Enumerated{value, cost};
      return;
    }
    for (Flow x = arcs[i].lower; x <= arcs[i].upper; ++x) {
      f[i] = x;
      rec(i + 1);
    }
  };
  rec(0);
  return best;
}

inline FlowNetwork random_network(Rng& rng, std::size_t nodes, std::size_t arcs, Flow max_cap,
                                  Cost max_cost, bool allow_lower) {
  FlowNetwork net(nodes);
  for (std::size_t i = 0; i < arcs; ++i) {
    const auto u = uniform_index(rng, nodes);
    auto v = uniform_index(rng, nodes - 1);
    if (v >= u) ++v;
    const Flow hi = uniform_int(rng, 0, max_cap);
    const Flow lo = allow_lower && uniform_index(rng, 4) == 0 ? uniform_int(rng, 0, hi) : 0;
    net.add_arc(u, v, uniform_int(rng, -max_cost, max_cost), lo, hi);
  }
  return net;
}

// ---------------------------------------------------------------------------
// Voltage assignment

struct TimingInstance {
  std::size_t modules = 0;
  std::vector<Net> nets;
  std::vector<Time> wire;
  std::vector<DpCurve> curves;
  Time t_cycle = 0;

  [[nodiscard]] Netlist netlist() const {
    std::vector<ModuleBlock> blocks;
    for (std::size_t i = 0; i < modules; ++i) blocks.push_back({"m" + std::to_string(i), 1, 1});
    return Netlist(blocks, nets, t_cycle, curves.empty() ? 1 : curves[0].levels());
  }
  [[nodiscard]] TimingGraph graph() const { return build_timing_graph(netlist(), wire); }
};

// Longest path by memoized recursion over the module DAG.
inline Time oracle_delay(const TimingInstance& in, const std::vector<int>& levels) {
  std::vector<std::optional<Time>> memo(in.modules);
  std::function<Time(std::size_t)> arrive = [&](std::size_t i) -> Time {
    if (memo[i]) return *memo[i];
    Time best = 0;
    for (std::size_t j = 0; j < in.nets.size(); ++j) {
      if (in.nets[j].sink == i) best = std::max(best, arrive(in.nets[j].source) + in.wire[j]);
    }
    memo[i] = best + in.curves[i].delay(levels[i]);
    return *memo[i];
  };
  Time worst = 0;
  for (std::size_t i = 0; i < in.modules; ++i) worst = std::max(worst, arrive(i));
  return worst;
}

// Minimum power over all feasible level vectors; nullopt when none meets T.
inline std::optional<Power> oracle_power(const TimingInstance& in) {
  std::vector<int> lv(in.modules, 1);
  std::optional<Power> best;
  std::function<void(std::size_t)> rec = [&](std::size_t i) {
    if (i == in.modules) {
      if (oracle_delay(in, lv) > in.t_cycle) return;
      Power p = 0;
      for (std::size_t m = 0; m < in.modules; ++m) p += in.curves[m].power(lv[m]);
      if (!best || p < *best) best = p;
      return;
    }
    for (int q = 1; q <= in.curves[i].levels(); ++q) {
      lv[i] = q;
      rec(i + 1);
    }
  };
  rec(0);
  return best;
}

// Strictly convex decreasing curve with integer slopes.
inline std::vector<DpPoint> random_points(Rng& rng, int k, Time max_gap = 4, std::int64_t max_slope = 20) {
  std::set<std::int64_t, std::greater<>> slopes;
  while (static_cast<int>(slopes.size()) < k - 1) slopes.insert(uniform_int(rng, 1, max_slope));
  std::vector<DpPoint> pts(static_cast<std::size_t>(k));
  pts[0] = {1, uniform_int(rng, 1, 10), 0};
  auto it = slopes.begin();
  std::vector<Power> drop;
  for (int q = 1; q < k; ++q, ++it) {
    const Time gap = uniform_int(rng, 1, max_gap);
    pts[q] = {q + 1, pts[q - 1].delay + gap, 0};
    drop.push_back(*it * gap);
  }
  pts[k - 1].power = uniform_int(rng, 1, 30);
  for (int q = k - 2; q >= 0; --q) pts[q].power = pts[q + 1].power + drop[q];
  return pts;
}

// Convex curve whose slopes are arbitrary rationals (random deltas, then
// accepted only if valid).
inline std::vector<DpPoint> random_rational_points(Rng& rng, int k) {
  for (;;) {
    std::vector<DpPoint> pts(static_cast<std::size_t>(k));
    pts[0] = {1, uniform_int(rng, 1, 8), uniform_int(rng, 60, 200)};
    bool ok = true;
    for (int q = 1; q < k && ok; ++q) {
      pts[q] = {q + 1, pts[q - 1].delay + uniform_int(rng, 1, 5), pts[q - 1].power - uniform_int(rng, 1, 40)};
      ok = pts[q].power > 0;
    }
    if (!ok) continue;
    try {
      validate_dp_curve(pts, k);
      return pts;
    } catch (const Error&) {
    }
  }
}

inline std::vector<Net> random_dag(Rng& rng, std::size_t m, int edge_percent) {
  std::vector<std::size_t> perm(m);
  for (std::size_t i = 0; i < m; ++i) perm[i] = i;
  for (std::size_t i = m; i > 1; --i) std::swap(perm[i - 1], perm[uniform_index(rng, i)]);
  std::vector<Net> nets;
  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t b = a + 1; b < m; ++b) {
      if (static_cast<int>(uniform_index(rng, 100)) < edge_percent) nets.push_back({perm[a], perm[b]});
    }
  }
  return nets;
}

// Random instance; T_cycle spans from the all-fastest delay (tight) to the
// all-slowest delay (loose).
inline TimingInstance random_timing_instance(Rng& rng, std::size_t m, int k, bool rational_slopes = false,
                                             Time max_wire = 3) {
  TimingInstance in;
  in.modules = m;
  in.nets = random_dag(rng, m, 35);
  for (std::size_t j = 0; j < in.nets.size(); ++j) in.wire.push_back(uniform_int(rng, 0, max_wire));
  for (std::size_t i = 0; i < m; ++i) {
    in.curves.push_back(validate_dp_curve(rational_slopes ? random_rational_points(rng, k) : random_points(rng, k), k));
  }
  const Time lo = oracle_delay(in, std::vector<int>(m, 1));
  const Time hi = oracle_delay(in, std::vector<int>(m, k));
  in.t_cycle = uniform_int(rng, lo, hi);
  return in;
}

// ---------------------------------------------------------------------------
// Shifter assignment

// Best (max cardinality, then min cost) capacity-respecting assignment by
// exhaustive search.
inline Enumerated enumerate_assignments(const AssignmentNetwork& g) {
  std::vector<std::vector<const AssignmentNetwork::Candidate*>> options(g.num_shifters);
  for (const auto& c : g.candidates) options[c.shifter].push_back(&c);
  std::vector<std::int64_t> left = g.room_capacity;
  Enumerated best{-1, 0};
  std::function<void(std::size_t, Flow, Cost)> rec = [&](std::size_t i, Flow n, Cost cost) {
    if (i == g.num_shifters) {
      if (n > best.value || (n == best.value && cost < best.cost)) best = {n, cost};
      return;
    }
    rec(i + 1, n, cost);
    for (const auto* c : options[i]) {
      if (left[c->room] == 0) continue;
      --left[c->room];
      rec(i + 1, n + 1, cost + c->cost);
      ++left[c->room];
    }
  };
  rec(0, 0, 0);
  return best;
}

// ---------------------------------------------------------------------------
// Geometry

// Rooms tile the chip: every unit cell is covered exactly once. Only for
// small chips.
inline bool grid_tiles(const Floorplan& fp) {
  std::vector<int> cover(static_cast<std::size_t>(fp.width * fp.height), 0);
  for (const auto& r : fp.rooms) {
    if (r.rect.x < 0 || r.rect.y < 0 || r.rect.right() > fp.width || r.rect.top() > fp.height) return false;
    for (Coord y = r.rect.y; y < r.rect.top(); ++y) {
      for (Coord x = r.rect.x; x < r.rect.right(); ++x) ++cover[static_cast<std::size_t>(y * fp.width + x)];
    }
  }
  return std::all_of(cover.begin(), cover.end(), [](int c) { return c == 1; });
}

inline std::vector<ModuleBlock> random_blocks(Rng& rng, std::size_t m, Coord lo = 1, Coord hi = 12) {
  std::vector<ModuleBlock> out;
  for (std::size_t i = 0; i < m; ++i) {
    out.push_back({"b" + std::to_string(i), uniform_int(rng, lo, hi), uniform_int(rng, lo, hi)});
  }
  return out;
}

inline SlicingExpr random_expr(Rng& rng, std::size_t m, int moves, bool rotation = true) {
  SlicingExpr e = SlicingExpr::initial(m);
  for (int i = 0; i < moves; ++i) e = perturb(e, random_move(rng, rotation), rng);
  return e;
}

inline ShifterSpec unit_shifter(Coord w = 2, Coord h = 2, int k = 4) {
  std::vector<DpPoint> zero;
  for (int q = 1; q <= k; ++q) zero.push_back({q, 0, 0});
  return make_shifter_spec(w * h, w, h, zero);
}

}  // namespace mvls::test
