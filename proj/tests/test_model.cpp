#include <gtest/gtest.h>

#include "mvls/error.hpp"
#include "mvls/model.hpp"
#include "support.hpp"

namespace mvls {
namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::kInvalidArgument;
}

TEST(DpCurve, AcceptsConvexCurve) {
  const auto c = validate_dp_curve({{1, 2, 90}, {2, 4, 50}, {3, 8, 30}}, 3);
  EXPECT_EQ(c.levels(), 3);
  EXPECT_EQ(c.delay(3), 8);
  EXPECT_EQ(c.power(1), 90);
}

TEST(DpCurve, PowerIncreaseIsNotMonotone) {
  EXPECT_EQ(code_of([] { validate_dp_curve({{1, 2, 50}, {2, 4, 90}}, 2); }), ErrorCode::kNotMonotone);
}

TEST(DpCurve, DecreasingSlopesAreValid) {
  // Slopes 20 then 10.
  EXPECT_NO_THROW(validate_dp_curve({{1, 2, 90}, {2, 4, 50}, {3, 6, 30}}, 3));
}

TEST(DpCurve, IncreasingSlopesAreNotConvex) {
  // Slopes 5 then 25.
  EXPECT_EQ(code_of([] { validate_dp_curve({{1, 2, 90}, {2, 4, 80}, {3, 6, 30}}, 3); }),
            ErrorCode::kNotConvex);
}

TEST(DpCurve, EqualSlopesAreNotConvex) {
  EXPECT_EQ(code_of([] { validate_dp_curve({{1, 0, 40}, {2, 1, 30}, {3, 2, 20}}, 3); }),
            ErrorCode::kNotConvex);
}

TEST(DpCurve, WrongArity) {
  EXPECT_EQ(code_of([] { validate_dp_curve({{1, 2, 90}, {2, 4, 50}}, 3); }), ErrorCode::kWrongArity);
  EXPECT_EQ(code_of([] { validate_dp_curve({}, 1); }), ErrorCode::kWrongArity);
}

TEST(DpCurve, DelayMustIncrease) {
  EXPECT_EQ(code_of([] { validate_dp_curve({{1, 4, 90}, {2, 4, 50}}, 2); }), ErrorCode::kNotMonotone);
}

TEST(DpCurve, NegativeValuesRejected) {
  EXPECT_EQ(code_of([] { validate_dp_curve({{1, -1, 90}, {2, 4, 50}}, 2); }), ErrorCode::kNotMonotone);
}

TEST(DpCurve, LevelsMustBeInOrder) {
  EXPECT_EQ(code_of([] { validate_dp_curve({{2, 2, 90}, {1, 4, 50}}, 2); }), ErrorCode::kNotMonotone);
}

TEST(DpCurve, SinglePointIsValid) {
  const auto c = validate_dp_curve({{1, 3, 7}}, 1);
  EXPECT_EQ(c.levels(), 1);
}

TEST(DpCurve, PrefixKeepsValidity) {
  const auto c = validate_dp_curve({{1, 2, 90}, {2, 4, 50}, {3, 8, 30}}, 3);
  const auto p = c.prefix(2);
  EXPECT_EQ(p.levels(), 2);
  EXPECT_EQ(p.points()[1], (DpPoint{2, 4, 50}));
  EXPECT_THROW((void)c.prefix(4), Error);
}

// Every interior point lies strictly below the chord of its neighbours.
TEST(DpCurve, InterpolationIsConvexProperty) {
  Rng rng(7);
  for (int trial = 0; trial < 500; ++trial) {
    const int k = static_cast<int>(uniform_int(rng, 3, 6));
    const auto c = validate_dp_curve(test::random_rational_points(rng, k), k);
    for (int q = 2; q < k; ++q) {
      const Wide d0 = c.delay(q - 1), d1 = c.delay(q), d2 = c.delay(q + 1);
      const Wide p0 = c.power(q - 1), p1 = c.power(q), p2 = c.power(q + 1);
      // p1 < p0 + (p2 - p0) * (d1 - d0) / (d2 - d0)
      EXPECT_LT(p1 * (d2 - d0), p0 * (d2 - d0) + (p2 - p0) * (d1 - d0));
    }
  }
}

TEST(ShifterSpec, DerivedDimensions) {
  const auto s = make_shifter_spec(10, 5, 2, {});
  EXPECT_EQ(s.width, 5);
  EXPECT_EQ(s.height, 2);
  EXPECT_EQ(s.area, 10);
  const auto r = make_shifter_spec(7, 1, 1, {});
  EXPECT_EQ(r.width, 3);
  EXPECT_EQ(r.height, 2);
  EXPECT_EQ(r.area, r.width * r.height);
  EXPECT_THROW(make_shifter_spec(0, 1, 1, {}), Error);
}

TEST(ModifyCurve, ZeroOverheadIsIdentity) {
  const auto c = validate_dp_curve({{1, 2, 90}, {2, 4, 50}}, 2);
  const auto s = make_shifter_spec(4, 1, 1, {{1, 0, 0}, {2, 0, 0}});
  EXPECT_EQ(modify_dp_curve(c, s), c);
}

TEST(ModifyCurve, PointwiseSum) {
  const auto c = validate_dp_curve({{1, 2, 90}, {2, 4, 50}, {3, 8, 30}}, 3);
  const auto s = make_shifter_spec(4, 1, 1, {{1, 1, 8}, {2, 2, 4}, {3, 4, 2}});
  const auto m = modify_dp_curve(c, s);
  EXPECT_EQ(m.points(), (std::vector<DpPoint>{{1, 3, 98}, {2, 6, 54}, {3, 12, 32}}));
}

TEST(ModifyCurve, BrokenOrderIsResultNotConvex) {
  const auto c = validate_dp_curve({{1, 2, 90}, {2, 4, 50}}, 2);
  const auto s = make_shifter_spec(4, 1, 1, {{1, 0, 0}, {2, 10, 100}});
  EXPECT_EQ(code_of([&] { modify_dp_curve(c, s); }), ErrorCode::kResultNotConvex);
}

TEST(ModifyCurve, TopLevelOverheadCanBeSkipped) {
  const auto c = validate_dp_curve({{1, 2, 90}, {2, 4, 50}}, 2);
  const auto s = make_shifter_spec(4, 1, 1, {{1, 1, 5}, {2, 1, 5}});
  EXPECT_EQ(modify_dp_curve(c, s, false).points()[0], (DpPoint{1, 2, 90}));
  EXPECT_EQ(modify_dp_curve(c, s, false).points()[1], (DpPoint{2, 5, 55}));
}

// Adding a convex, decreasing power overhead on the same delays keeps the
// curve valid.
TEST(ModifyCurve, SumOnSharedDelaysIsValidProperty) {
  Rng rng(11);
  for (int trial = 0; trial < 300; ++trial) {
    const int k = static_cast<int>(uniform_int(rng, 2, 5));
    const auto a = validate_dp_curve(test::random_rational_points(rng, k), k);
    // Overhead slope at level q is k - q + 2: decreasing in q.
    std::vector<Power> pw(static_cast<std::size_t>(k));
    pw.back() = uniform_int(rng, 0, 5);
    for (int q = k - 1; q >= 1; --q) {
      pw[static_cast<std::size_t>(q - 1)] = pw[static_cast<std::size_t>(q)] + (a.delay(q + 1) - a.delay(q)) * (k - q + 1);
    }
    std::vector<DpPoint> other, overhead;
    for (int q = 1; q <= k; ++q) {
      other.push_back({q, a.delay(q), pw[static_cast<std::size_t>(q - 1)]});
      overhead.push_back({q, 0, pw[static_cast<std::size_t>(q - 1)]});
    }
    ASSERT_NO_THROW(validate_dp_curve(other, k));
    EXPECT_NO_THROW(modify_dp_curve(a, make_shifter_spec(4, 1, 1, overhead)));
  }
}

TEST(Decompose, SingleSink) {
  const std::vector<RawNet> raw{{"a", {"b"}}};
  EXPECT_EQ(decompose_multipin(raw), (std::vector<NamedNet>{{"a", "b"}}));
}

TEST(Decompose, FanOut) {
  const std::vector<RawNet> raw{{"a", {"b", "c", "d"}}};
  EXPECT_EQ(decompose_multipin(raw), (std::vector<NamedNet>{{"a", "b"}, {"a", "c"}, {"a", "d"}}));
}

TEST(Decompose, EmptyNet) {
  const std::vector<RawNet> raw{{"a", {}}};
  EXPECT_EQ(code_of([&] { decompose_multipin(raw); }), ErrorCode::kEmptyNet);
}

TEST(Decompose, LengthIsSinkCountProperty) {
  Rng rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<RawNet> raw;
    std::size_t sinks = 0;
    for (std::size_t n = uniform_index(rng, 6); n > 0; --n) {
      RawNet r{"s", {}};
      for (std::size_t j = 1 + uniform_index(rng, 4); j > 0; --j) r.sinks.push_back("t" + std::to_string(j));
      sinks += r.sinks.size();
      raw.push_back(r);
    }
    EXPECT_EQ(decompose_multipin(raw).size(), sinks);
  }
}

TEST(Netlist, RejectsCycle) {
  const std::vector<ModuleBlock> b{{"a", 1, 1}, {"b", 1, 1}};
  EXPECT_EQ(code_of([&] { Netlist(b, {{0, 1}, {1, 0}}, 10, 2); }), ErrorCode::kCyclicNetlist);
}

TEST(Netlist, RejectsUnknownEndpoint) {
  const std::vector<ModuleBlock> b{{"a", 1, 1}};
  const std::vector<NamedNet> nets{{"a", "zz"}};
  EXPECT_EQ(code_of([&] { Netlist::from_named(b, nets, 10, 2); }), ErrorCode::kUnknownModule);
}

TEST(Netlist, RejectsDuplicateAndEmptyBlocks) {
  EXPECT_EQ(code_of([] { Netlist({{"a", 1, 1}, {"a", 2, 2}}, {}, 1, 2); }), ErrorCode::kDuplicateName);
  EXPECT_EQ(code_of([] { Netlist({{"a", 0, 1}}, {}, 1, 2); }), ErrorCode::kInvalidArgument);
}

TEST(Netlist, TopologicalOrderRespectsNets) {
  Rng rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t m = 1 + uniform_index(rng, 9);
    const auto nets = test::random_dag(rng, m, 40);
    std::vector<ModuleBlock> blocks;
    for (std::size_t i = 0; i < m; ++i) blocks.push_back({"m" + std::to_string(i), 1, 1});
    const Netlist nl(blocks, nets, 0, 2);
    std::vector<std::size_t> pos(m);
    for (std::size_t i = 0; i < m; ++i) pos[nl.topological_order()[i]] = i;
    for (const auto& n : nets) EXPECT_LT(pos[n.source], pos[n.sink]);
    EXPECT_EQ(nl.index_of("m0"), 0u);
  }
}

TEST(TopologicalSort, EmptyGraphIsNotACycle) {
  const auto order = topological_sort(0, {});
  ASSERT_TRUE(order.has_value());
  EXPECT_TRUE(order->empty());
}

}  // namespace
}  // namespace mvls
