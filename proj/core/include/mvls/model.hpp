#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mvls/types.hpp"

namespace mvls {

// One (voltage level, delay, power) sample of a power-delay curve. Level 1 is
// the highest supply voltage, hence the smallest delay and the largest power.
struct DpPoint {
  int level = 0;
  Time delay = 0;
  Power power = 0;

  friend bool operator==(const DpPoint&, const DpPoint&) = default;
};

// A validated DP-curve: exactly k points ordered by level, delays strictly
// increasing, powers strictly decreasing, and slope magnitudes
//   b(q) = (p[q-1] - p[q]) / (d[q] - d[q-1])
// strictly decreasing in q. Only `validate_dp_curve` and `modify_dp_curve`
// can produce one, so holding a DpCurve is proof of the invariants.
class DpCurve {
 public:
  [[nodiscard]] const std::vector<DpPoint>& points() const noexcept { return points_; }
  [[nodiscard]] int levels() const noexcept { return static_cast<int>(points_.size()); }
  // 1-based accessors, matching the level numbering.
  [[nodiscard]] Time delay(int level) const { return points_.at(level - 1).delay; }
  [[nodiscard]] Power power(int level) const { return points_.at(level - 1).power; }

  // The curve restricted to its first `k` levels (nested voltage sets).
  [[nodiscard]] DpCurve prefix(int k) const;

  friend bool operator==(const DpCurve&, const DpCurve&) = default;

 private:
  explicit DpCurve(std::vector<DpPoint> points) : points_(std::move(points)) {}

  friend DpCurve validate_dp_curve(std::vector<DpPoint> points, int k);

  std::vector<DpPoint> points_;
};

// Throws Error{kWrongArity | kNotMonotone | kNotConvex}.
DpCurve validate_dp_curve(std::vector<DpPoint> points, int k);

// Level-shifter description. Width and height are derived from area and
// aspect ratio (width:height); `area` is then redefined as width*height.
struct ShifterSpec {
  Area area = 0;
  std::int64_t ratio_num = 1;
  std::int64_t ratio_den = 1;
  Coord width = 0;
  Coord height = 0;
  // Per-level (delay, power) overhead, indexed by the driving module's level.
  std::vector<DpPoint> overhead;
};

ShifterSpec make_shifter_spec(Area area, std::int64_t ratio_num, std::int64_t ratio_den,
                              std::vector<DpPoint> overhead);

// Adds the shifter overhead of level q to point q of the curve. With
// `overhead_at_top_level == false`, level 1 is left untouched.
// Throws Error{kResultNotConvex} when the sum breaks the curve invariants.
DpCurve modify_dp_curve(const DpCurve& curve, const ShifterSpec& spec,
                        bool overhead_at_top_level = true);

struct ModuleBlock {
  std::string name;
  Coord width = 0;
  Coord height = 0;
};

struct RawNet {
  std::string source;
  std::vector<std::string> sinks;
};

struct NamedNet {
  std::string source;
  std::string sink;

  friend bool operator==(const NamedNet&, const NamedNet&) = default;
};

// One (source, sink) net per sink, in input order. Throws Error{kEmptyNet}.
std::vector<NamedNet> decompose_multipin(std::span<const RawNet> raw_nets);

struct Net {
  ModuleId source = 0;
  ModuleId sink = 0;

  friend bool operator==(const Net&, const Net&) = default;
};

// A validated netlist: two-pin nets over an acyclic module graph.
class Netlist {
 public:
  // Throws kInvalidArgument, kUnknownModule, kDuplicateName or kCyclicNetlist.
  Netlist(std::vector<ModuleBlock> modules, std::vector<Net> nets, Time t_cycle, int k);

  // Resolves named nets against the module list.
  static Netlist from_named(std::vector<ModuleBlock> modules, std::span<const NamedNet> nets,
                            Time t_cycle, int k);

  [[nodiscard]] const std::vector<ModuleBlock>& modules() const noexcept { return modules_; }
  [[nodiscard]] const std::vector<Net>& nets() const noexcept { return nets_; }
  [[nodiscard]] std::size_t size() const noexcept { return modules_.size(); }
  [[nodiscard]] Time t_cycle() const noexcept { return t_cycle_; }
  [[nodiscard]] int k() const noexcept { return k_; }

  // Module index by name; throws kUnknownModule.
  [[nodiscard]] ModuleId index_of(const std::string& name) const;

  // Modules in a topological order of the net graph.
  [[nodiscard]] const std::vector<ModuleId>& topological_order() const noexcept { return topo_; }

 private:
  std::vector<ModuleBlock> modules_;
  std::vector<Net> nets_;
  Time t_cycle_;
  int k_;
  std::vector<ModuleId> topo_;
};

// Kahn ordering of `count` nodes; std::nullopt when the edges contain a cycle.
std::optional<std::vector<std::size_t>> topological_sort(std::size_t count,
                                                         std::span<const Net> edges);

}  // namespace mvls
