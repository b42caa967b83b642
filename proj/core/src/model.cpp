#include "mvls/model.hpp"

#include <cmath>
#include <queue>
#include <unordered_map>

#include "mvls/error.hpp"

namespace mvls {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNotConvex: return "NotConvex";
    case ErrorCode::kNotMonotone: return "NotMonotone";
    case ErrorCode::kWrongArity: return "WrongArity";
    case ErrorCode::kResultNotConvex: return "ResultNotConvex";
    case ErrorCode::kEmptyNet: return "EmptyNet";
    case ErrorCode::kCyclicNetlist: return "CyclicNetlist";
    case ErrorCode::kUnknownModule: return "UnknownModule";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kInvalidNetwork: return "InvalidNetwork";
    case ErrorCode::kInfeasibleLowerBounds: return "InfeasibleLowerBounds";
    case ErrorCode::kNegativeResidualCycle: return "NegativeResidualCycle";
    case ErrorCode::kTimingInfeasible: return "TimingInfeasible";
    case ErrorCode::kTooLarge: return "TooLarge";
    case ErrorCode::kMalformedExpression: return "MalformedExpression";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kDuplicateName: return "DuplicateName";
    case ErrorCode::kUnknownBlock: return "UnknownBlock";
    case ErrorCode::kOverflow: return "Overflow";
    case ErrorCode::kIo: return "Io";
  }
  return "Unknown";
}

double to_double(const Rational& r) {
  return static_cast<double>(r.numerator()) / static_cast<double>(r.denominator());
}

double to_double(const BigRational& r) { return r.convert_to<double>(); }

DpCurve DpCurve::prefix(int k) const {
  if (k < 1 || k > levels()) {
    throw Error(ErrorCode::kWrongArity,
                "prefix of " + std::to_string(k) + " levels from a " +
                    std::to_string(levels()) + "-level curve");
  }
  return DpCurve(std::vector<DpPoint>(points_.begin(), points_.begin() + k));
}

DpCurve validate_dp_curve(std::vector<DpPoint> points, int k) {
  if (points.empty() || k < 1 || static_cast<int>(points.size()) != k) {
    throw Error(ErrorCode::kWrongArity, "curve has " + std::to_string(points.size()) +
                                            " points, expected " + std::to_string(k));
  }
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& pt = points[i];
    if (pt.level != static_cast<int>(i) + 1) {
      throw Error(ErrorCode::kNotMonotone, "levels must run 1..k in order");
    }
    if (pt.delay < 0 || pt.power < 0) {
      throw Error(ErrorCode::kNotMonotone, "delays and powers must be nonnegative");
    }
    if (i > 0) {
      if (pt.delay <= points[i - 1].delay) {
        throw Error(ErrorCode::kNotMonotone,
                    "delay must strictly increase at level " + std::to_string(pt.level));
      }
      if (pt.power >= points[i - 1].power) {
        throw Error(ErrorCode::kNotMonotone,
                    "power must strictly decrease at level " + std::to_string(pt.level));
      }
    }
  }
  // b(q) > b(q+1), cross-multiplied to stay in integers.
  for (std::size_t q = 1; q + 1 < points.size(); ++q) {
    const Wide dp_left = points[q - 1].power - points[q].power;
    const Wide dd_left = points[q].delay - points[q - 1].delay;
    const Wide dp_right = points[q].power - points[q + 1].power;
    const Wide dd_right = points[q + 1].delay - points[q].delay;
    if (dp_left * dd_right <= dp_right * dd_left) {
      throw Error(ErrorCode::kNotConvex,
                  "slope magnitude does not decrease at level " + std::to_string(q + 2));
    }
  }
  return DpCurve(std::move(points));
}

ShifterSpec make_shifter_spec(Area area, std::int64_t ratio_num, std::int64_t ratio_den,
                              std::vector<DpPoint> overhead) {
  if (area <= 0 || ratio_num <= 0 || ratio_den <= 0) {
    throw Error(ErrorCode::kInvalidArgument, "shifter area and ratio must be positive");
  }
  for (std::size_t i = 0; i < overhead.size(); ++i) {
    if (overhead[i].level != static_cast<int>(i) + 1) {
      throw Error(ErrorCode::kInvalidArgument, "shifter overhead levels must run 1..k");
    }
    if (overhead[i].delay < 0 || overhead[i].power < 0) {
      throw Error(ErrorCode::kInvalidArgument, "shifter overhead must be nonnegative");
    }
  }
  ShifterSpec spec;
  spec.ratio_num = ratio_num;
  spec.ratio_den = ratio_den;
  const double a = static_cast<double>(area);
  spec.width = std::max<Coord>(
      1, std::llround(std::sqrt(a * static_cast<double>(ratio_num) / static_cast<double>(ratio_den))));
  spec.height = std::max<Coord>(1, std::llround(a / static_cast<double>(spec.width)));
  spec.area = spec.width * spec.height;
  spec.overhead = std::move(overhead);
  return spec;
}

DpCurve modify_dp_curve(const DpCurve& curve, const ShifterSpec& spec,
                        bool overhead_at_top_level) {
  if (static_cast<int>(spec.overhead.size()) < curve.levels()) {
    throw Error(ErrorCode::kWrongArity, "shifter overhead has fewer levels than the curve");
  }
  std::vector<DpPoint> sum = curve.points();
  for (std::size_t i = 0; i < sum.size(); ++i) {
    if (i == 0 && !overhead_at_top_level) continue;
    sum[i].delay += spec.overhead[i].delay;
    sum[i].power += spec.overhead[i].power;
  }
  try {
    return validate_dp_curve(std::move(sum), curve.levels());
  } catch (const Error& e) {
    throw Error(ErrorCode::kResultNotConvex, e.what());
  }
}

std::vector<NamedNet> decompose_multipin(std::span<const RawNet> raw_nets) {
  std::vector<NamedNet> out;
  for (const auto& net : raw_nets) {
    if (net.sinks.empty()) {
      throw Error(ErrorCode::kEmptyNet, "net driven by '" + net.source + "' has no sinks");
    }
    for (const auto& sink : net.sinks) out.push_back({net.source, sink});
  }
  return out;
}

std::optional<std::vector<std::size_t>> topological_sort(std::size_t count,
                                                         std::span<const Net> edges) {
  std::vector<std::vector<std::size_t>> fanout(count);
  std::vector<std::size_t> indegree(count, 0);
  for (const auto& e : edges) {
    fanout[e.source].push_back(e.sink);
    ++indegree[e.sink];
  }
  // Min-heap keeps the order deterministic and stable with respect to ids.
  std::priority_queue<std::size_t, std::vector<std::size_t>, std::greater<>> ready;
  for (std::size_t v = 0; v < count; ++v) {
    if (indegree[v] == 0) ready.push(v);
  }
  std::vector<std::size_t> order;
  order.reserve(count);
  while (!ready.empty()) {
    const auto v = ready.top();
    ready.pop();
    order.push_back(v);
    for (auto w : fanout[v]) {
      if (--indegree[w] == 0) ready.push(w);
    }
  }
  if (order.size() != count) return std::nullopt;
  return order;
}

Netlist::Netlist(std::vector<ModuleBlock> modules, std::vector<Net> nets, Time t_cycle, int k)
    : modules_(std::move(modules)), nets_(std::move(nets)), t_cycle_(t_cycle), k_(k) {
  if (k_ < 1) throw Error(ErrorCode::kInvalidArgument, "k must be at least 1");
  if (t_cycle_ < 0) throw Error(ErrorCode::kInvalidArgument, "T_cycle must be nonnegative");
  std::unordered_map<std::string, ModuleId> seen;
  for (ModuleId i = 0; i < modules_.size(); ++i) {
    const auto& m = modules_[i];
    if (m.width <= 0 || m.height <= 0) {
      throw Error(ErrorCode::kInvalidArgument, "module '" + m.name + "' has non-positive size");
    }
    if (!seen.emplace(m.name, i).second) {
      throw Error(ErrorCode::kDuplicateName, "module '" + m.name + "' appears twice");
    }
  }
  for (const auto& n : nets_) {
    if (n.source >= modules_.size() || n.sink >= modules_.size()) {
      throw Error(ErrorCode::kUnknownModule, "net endpoint out of range");
    }
  }
  auto order = topological_sort(modules_.size(), nets_);
  if (!order) throw Error(ErrorCode::kCyclicNetlist, "net graph contains a cycle");
  topo_ = std::move(*order);
}

Netlist Netlist::from_named(std::vector<ModuleBlock> modules, std::span<const NamedNet> nets,
                            Time t_cycle, int k) {
  std::unordered_map<std::string, ModuleId> index;
  for (ModuleId i = 0; i < modules.size(); ++i) index.emplace(modules[i].name, i);
  std::vector<Net> resolved;
  resolved.reserve(nets.size());
  for (const auto& n : nets) {
    const auto s = index.find(n.source);
    const auto t = index.find(n.sink);
    if (s == index.end() || t == index.end()) {
      throw Error(ErrorCode::kUnknownModule,
                  "net " + n.source + " -> " + n.sink + " names a missing module");
    }
    resolved.push_back({s->second, t->second});
  }
  return Netlist(std::move(modules), std::move(resolved), t_cycle, k);
}

ModuleId Netlist::index_of(const std::string& name) const {
  for (ModuleId i = 0; i < modules_.size(); ++i) {
    if (modules_[i].name == name) return i;
  }
  throw Error(ErrorCode::kUnknownModule, "no module named '" + name + "'");
}

}  // namespace mvls
