#include <gtest/gtest.h>

#include <sstream>

#include "mvls/error.hpp"
#include "mvls/flow.hpp"
#include "support.hpp"

namespace mvls {
namespace {

constexpr CirculationAlgorithm kAlgorithms[] = {CirculationAlgorithm::kCostScaling,
                                                CirculationAlgorithm::kSuccessiveShortestPath};

// Reduced costs are nonnegative on every residual arc.
void expect_certified(const FlowNetwork& net, const FlowResult& r) {
  const auto pi = residual_potentials(net, r);
  for (std::size_t a = 0; a < net.arcs().size(); ++a) {
    const auto& arc = net.arcs()[a];
    const Cost reduced = arc.cost + pi[arc.tail] - pi[arc.head];
    if (r.flow[a] < arc.upper) EXPECT_GE(reduced, 0) << "arc " << a;
    if (r.flow[a] > arc.lower) EXPECT_LE(reduced, 0) << "arc " << a;
  }
}

FlowNetwork triangle(Cost first) {
  FlowNetwork net(3);
  net.add_arc(0, 1, first, 0, 2, "ab");
  net.add_arc(1, 2, 1, 0, 2, "bc");
  net.add_arc(2, 0, 1, 0, 2, "ca");
  return net;
}

TEST(Circulation, NonnegativeCostsGiveZeroFlow) {
  FlowNetwork net(3);
  net.add_arc(0, 1, 3, 0, 5);
  net.add_arc(1, 2, 0, 0, 5);
  net.add_arc(2, 0, 1, 0, 5);
  for (const auto algo : kAlgorithms) {
    const auto r = solve_min_cost_circulation(net, algo);
    EXPECT_EQ(r.objective, 0);
    EXPECT_EQ(r.flow, (std::vector<Flow>{0, 0, 0}));
    EXPECT_EQ(r.status, FlowStatus::kOptimal);
  }
}

TEST(Circulation, NegativeCycleSaturates) {
  const auto net = triangle(-5);
  for (const auto algo : kAlgorithms) {
    const auto r = solve_min_cost_circulation(net, algo);
    EXPECT_EQ(r.objective, -6);
    EXPECT_EQ(r.flow, (std::vector<Flow>{2, 2, 2}));
    EXPECT_EQ(check_flow(net, r), "");
  }
  EXPECT_EQ(test::enumerate_flows(net)->cost, -6);
}

TEST(Circulation, PositiveCycleStaysEmpty) {
  const auto net = triangle(-1);
  for (const auto algo : kAlgorithms) {
    EXPECT_EQ(solve_min_cost_circulation(net, algo).objective, 0);
  }
}

TEST(Circulation, LowerBoundsAreHonoured) {
  FlowNetwork net(3);
  net.add_arc(0, 1, 4, 2, 3);
  net.add_arc(1, 2, 1, 0, 5);
  net.add_arc(2, 0, 1, 0, 5);
  for (const auto algo : kAlgorithms) {
    const auto r = solve_min_cost_circulation(net, algo);
    EXPECT_EQ(r.flow, (std::vector<Flow>{2, 2, 2}));
    EXPECT_EQ(r.objective, 12);
  }
}

TEST(Circulation, NegativeLowerBounds) {
  // An arc with negative bounds carries flow backwards.
  FlowNetwork net(2);
  net.add_arc(0, 1, 3, -4, -1);
  net.add_arc(0, 1, 1, 0, 6);
  for (const auto algo : kAlgorithms) {
    const auto r = solve_min_cost_circulation(net, algo);
    EXPECT_EQ(check_flow(net, r), "");
    EXPECT_EQ(r.flow, (std::vector<Flow>{-4, 4}));
    EXPECT_EQ(r.objective, -8);
  }
}

TEST(Circulation, InfeasibleLowerBounds) {
  FlowNetwork net(2);
  net.add_arc(0, 1, 0, 1, 2);
  net.add_arc(1, 0, 0, 0, 0);
  for (const auto algo : kAlgorithms) {
    try {
      solve_min_cost_circulation(net, algo);
      ADD_FAILURE() << "expected an error";
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kInfeasibleLowerBounds);
    }
  }
}

TEST(Circulation, RandomSmallNetworksMatchEnumeration) {
  Rng rng(2024);
  int checked = 0;
  for (int trial = 0; trial < 400; ++trial) {
    const std::size_t nodes = 2 + uniform_index(rng, 5);
    const std::size_t arcs = 1 + uniform_index(rng, 8);
    const auto net = test::random_network(rng, nodes, arcs, arcs > 6 ? 2 : 3, 6, true);
    const auto oracle = test::enumerate_flows(net);
    for (const auto algo : kAlgorithms) {
      if (!oracle) {
        EXPECT_THROW(solve_min_cost_circulation(net, algo), Error);
        continue;
      }
      const auto r = solve_min_cost_circulation(net, algo);
      ASSERT_EQ(check_flow(net, r), "");
      EXPECT_EQ(r.objective, oracle->cost) << "trial " << trial;
      expect_certified(net, r);
      ++checked;
    }
  }
  EXPECT_GT(checked, 400);
}

TEST(Circulation, AlgorithmsAgreeOnLargerNetworks) {
  Rng rng(99);
  for (int trial = 0; trial < 60; ++trial) {
    const auto net = test::random_network(rng, 30, 120, 50, 100, false);
    const auto a = solve_min_cost_circulation(net, CirculationAlgorithm::kCostScaling);
    const auto b = solve_min_cost_circulation(net, CirculationAlgorithm::kSuccessiveShortestPath);
    EXPECT_EQ(a.objective, b.objective);
    expect_certified(net, a);
    expect_certified(net, b);
  }
}

TEST(MaxFlow, SingleArc) {
  FlowNetwork net(2);
  net.add_arc(0, 1, 2, 0, 3);
  const auto r = solve_min_cost_max_flow(net, 0, 1);
  EXPECT_EQ(r.value, 3);
  EXPECT_EQ(r.objective, 6);
}

TEST(MaxFlow, ParallelArcs) {
  FlowNetwork net(2);
  net.add_arc(0, 1, 5, 0, 1);
  net.add_arc(0, 1, 1, 0, 1);
  const auto r = solve_min_cost_max_flow(net, 0, 1);
  EXPECT_EQ(r.value, 2);
  EXPECT_EQ(r.objective, 6);
}

TEST(MaxFlow, BipartiteTwoByTwo) {
  // s=0, t=1, shifters 2,3, rooms 4,5.
  FlowNetwork net(6);
  net.add_arc(0, 2, 0, 0, 1);
  net.add_arc(0, 3, 0, 0, 1);
  const Cost c[2][2] = {{1, 4}, {2, 3}};
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) net.add_arc(2 + i, 4 + j, c[i][j], 0, 1);
  }
  net.add_arc(4, 1, 0, 0, 1);
  net.add_arc(5, 1, 0, 0, 1);
  const auto r = solve_min_cost_max_flow(net, 0, 1);
  EXPECT_EQ(r.value, 2);
  EXPECT_EQ(r.objective, 4);
  // Both perfect matchings cost 4 (1+3 and 4+2); the oracle agrees.
  EXPECT_EQ(test::enumerate_flows(net, 0, 1)->cost, 4);
}

TEST(MaxFlow, RejectsLowerBounds) {
  FlowNetwork net(2);
  net.add_arc(0, 1, 0, 1, 2);
  EXPECT_THROW(solve_min_cost_max_flow(net, 0, 1), Error);
}

TEST(MaxFlow, RandomSmallNetworksMatchEnumeration) {
  Rng rng(77);
  for (int trial = 0; trial < 400; ++trial) {
    const std::size_t nodes = 2 + uniform_index(rng, 5);
    const std::size_t arcs = 1 + uniform_index(rng, 8);
    const auto net = test::random_network(rng, nodes, arcs, arcs > 6 ? 2 : 3, 6, false);
    const auto oracle = test::enumerate_flows(net, 0, 1);
    const auto r = solve_min_cost_max_flow(net, 0, 1);
    ASSERT_EQ(check_flow(net, r, 0, 1), "");
    EXPECT_EQ(r.value, oracle->value) << "trial " << trial;
    EXPECT_EQ(r.objective, oracle->cost) << "trial " << trial;
  }
}

TEST(Residual, EmptyFlowIsPlainShortestPaths) {
  FlowNetwork net(4);
  net.add_arc(0, 1, 4, 0, 1);
  net.add_arc(0, 2, 1, 0, 1);
  net.add_arc(2, 1, 2, 0, 1);
  FlowResult empty;
  empty.flow.assign(3, 0);
  const auto d = residual_shortest_paths(net, empty, 0);
  EXPECT_EQ(d[0], 0);
  EXPECT_EQ(d[1], 3);
  EXPECT_EQ(d[2], 1);
  EXPECT_FALSE(d[3].has_value());
}

TEST(Residual, OptimalCycleHasDistances) {
  const auto net = triangle(-5);
  const auto r = solve_min_cost_circulation(net);
  const auto d = residual_shortest_paths(net, r, 0);
  // Only reverse arcs remain: 0->2 (-1), 2->1 (-1), 1->0 (+5).
  EXPECT_EQ(d[0], 0);
  EXPECT_EQ(d[2], -1);
  EXPECT_EQ(d[1], -2);
}

TEST(Residual, NonOptimalFlowIsDetected) {
  const auto net = triangle(-5);
  FlowResult zero;
  zero.flow.assign(3, 0);
  try {
    residual_shortest_paths(net, zero, 0);
    ADD_FAILURE() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNegativeResidualCycle);
  }
}

TEST(Residual, DistancesSatisfyTriangleInequalityProperty) {
  Rng rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const auto net = test::random_network(rng, 8, 20, 4, 9, false);
    const auto r = solve_min_cost_circulation(net);
    const auto d = residual_shortest_paths(net, r, 0);
    for (std::size_t a = 0; a < net.arcs().size(); ++a) {
      const auto& arc = net.arcs()[a];
      if (r.flow[a] < arc.upper && d[arc.tail]) {
        ASSERT_TRUE(d[arc.head].has_value());
        EXPECT_LE(*d[arc.head], *d[arc.tail] + arc.cost);
      }
      if (r.flow[a] > arc.lower && d[arc.head]) {
        ASSERT_TRUE(d[arc.tail].has_value());
        EXPECT_LE(*d[arc.tail], *d[arc.head] - arc.cost);
      }
    }
  }
}

TEST(Residual, UncapacitatedArcKeepsForwardResidual) {
  for (const bool unbounded : {false, true}) {
    FlowNetwork net(2);
    net.add_arc(0, 1, -1, 0, 3, "big", unbounded);
    net.add_arc(1, 0, 0, 0, 3);
    const auto r = solve_min_cost_circulation(net);
    EXPECT_EQ(r.flow[0], 3);
    const auto d = residual_shortest_paths(net, r, 0);
    // Saturated: only the zero-cost reverse of the return arc reaches node 1.
    EXPECT_EQ(d[1], unbounded ? -1 : 0);
  }
}

TEST(FlowNetwork, ValidateRejectsBadArcs) {
  FlowNetwork loop(2);
  loop.add_arc(1, 1, 0, 0, 1);
  EXPECT_THROW(loop.validate(), Error);
  FlowNetwork inverted(2);
  inverted.add_arc(0, 1, 0, 3, 1);
  EXPECT_THROW(inverted.validate(), Error);
}

TEST(FlowNetwork, CheckFlowReportsViolations) {
  const auto net = triangle(-5);
  FlowResult r;
  r.flow = {1, 2, 2};
  EXPECT_NE(check_flow(net, r), "");
  r.flow = {3, 3, 3};
  EXPECT_NE(check_flow(net, r), "");
}

TEST(FlowNetwork, TextDump) {
  FlowNetwork net(2);
  net.add_arc(0, 1, -3, 0, 7, "e1");
  net.add_arc(1, 0, 2, 1, 4);
  std::ostringstream os;
  write_network(os, net);
  EXPECT_EQ(os.str(), "0 1 -3 0 7 e1\n1 0 2 1 4 -\n");
}

}  // namespace
}  // namespace mvls
