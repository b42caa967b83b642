#include "mvls/shifter.hpp"

#include <algorithm>
#include <cstdlib>
#include <map>

#include "mvls/error.hpp"

namespace mvls {

namespace {

Coord detour2(Point2 src, Point2 via, Point2 dst) {
  return manhattan2(src, via) + manhattan2(via, dst) - manhattan2(src, dst);
}

Point2 module_center(const Floorplan& fp, ModuleId m) { return center2(fp.rooms.at(m).module); }

struct Grid {
  Coord w = 0;
  Coord h = 0;
  Coord cols = 0;
  Coord rows = 0;
};

Grid best_grid(const Rect& part, const ShifterSpec& spec) {
  if (part.empty()) return {};
  const Grid upright{spec.width, spec.height, part.w / spec.width, part.h / spec.height};
  const Grid turned{spec.height, spec.width, part.w / spec.height, part.h / spec.width};
  return turned.cols * turned.rows > upright.cols * upright.rows ? turned : upright;
}

}  // namespace

std::vector<Shifter> required_shifters(std::span<const Net> nets, std::span<const int> levels) {
  std::vector<Shifter> out;
  for (std::size_t j = 0; j < nets.size(); ++j) {
    const int src = levels[nets[j].source];
    const int dst = levels[nets[j].sink];
    if (src > dst) out.push_back({out.size(), j, nets[j], src, dst});
  }
  return out;
}

bool too_narrow(const Rect& part, const ShifterSpec& spec) {
  const bool upright = part.w >= spec.width && part.h >= spec.height;
  const bool turned = part.w >= spec.height && part.h >= spec.width;
  return !upright && !turned;
}

std::int64_t num_ls(const WhitespaceParts& parts, const ShifterSpec& spec) {
  if (spec.area <= 0) throw Error(ErrorCode::kInvalidArgument, "shifter area must be positive");
  const auto area_of = [&](const Rect& r) -> Area { return r.empty() ? 0 : r.area(); };
  Area a1 = too_narrow(parts.p1, spec) ? 0 : area_of(parts.p1);
  Area a2 = too_narrow(parts.p2, spec) ? 0 : area_of(parts.p2);
  if (a1 % spec.area > a2 % spec.area) {
    a1 += area_of(parts.p3);
  } else {
    a2 += area_of(parts.p3);
  }
  return a1 / spec.area + a2 / spec.area;
}

std::int64_t num_ls(const Room& room, const ShifterSpec& spec) {
  return num_ls(whitespace_parts(room), spec);
}

MergedWhitespace merge_whitespace(const Room& room, const ShifterSpec& spec) {
  const auto parts = whitespace_parts(room);
  const Area a1 = too_narrow(parts.p1, spec) || parts.p1.empty() ? 0 : parts.p1.area();
  const Area a2 = too_narrow(parts.p2, spec) || parts.p2.empty() ? 0 : parts.p2.area();
  MergedWhitespace m;
  m.corner_in_first = a1 % spec.area > a2 % spec.area;
  const Rect& r = room.rect;
  if (m.corner_in_first) {
    m.first = {parts.p1.x, r.y, parts.p1.w, r.h};
    m.second = parts.p2;
  } else {
    m.first = parts.p1;
    m.second = {r.x, parts.p2.y, r.w, parts.p2.h};
  }
  return m;
}

bool feasible(const Shifter& shifter, const Room& room, const Floorplan& fp,
              const ShifterSpec& spec, Coord window) {
  if (num_ls(room, spec) < 1) return false;
  const Point2 a = module_center(fp, shifter.endpoints.source);
  const Point2 b = module_center(fp, shifter.endpoints.sink);
  const Coord x0 = std::min(a.x, b.x) - 2 * window, x1 = std::max(a.x, b.x) + 2 * window;
  const Coord y0 = std::min(a.y, b.y) - 2 * window, y1 = std::max(a.y, b.y) + 2 * window;
  const Rect& r = room.rect;
  return 2 * r.x <= x1 && 2 * r.right() >= x0 && 2 * r.y <= y1 && 2 * r.top() >= y0;
}

Coord assign_cost(const Shifter& shifter, const Room& room, const Floorplan& fp) {
  return detour2(module_center(fp, shifter.endpoints.source), center2(room.rect),
                 module_center(fp, shifter.endpoints.sink)) / 2;
}

Coord default_window(const Floorplan& fp) {
  if (fp.rooms.empty()) return 0;
  Coord sum = 0;
  for (const auto& r : fp.rooms) sum += r.rect.w + r.rect.h;
  return sum / static_cast<Coord>(4 * fp.rooms.size());
}

FlowNetwork AssignmentNetwork::to_flow_network() const {
  const std::size_t rooms = room_capacity.size();
  FlowNetwork net(2 + num_shifters + rooms);
  for (std::size_t i = 0; i < num_shifters; ++i) {
    net.add_arc(0, 2 + i, 0, 0, 1, "s:ls" + std::to_string(i));
  }
  for (const auto& c : candidates) {
    net.add_arc(2 + c.shifter, 2 + num_shifters + c.room, c.cost, 0, 1,
                "ls" + std::to_string(c.shifter) + ":r" + std::to_string(c.room));
  }
  for (std::size_t j = 0; j < rooms; ++j) {
    if (room_capacity[j] > 0) {
      net.add_arc(2 + num_shifters + j, 1, 0, 0, room_capacity[j], "r" + std::to_string(j) + ":t");
    }
  }
  return net;
}

AssignmentNetwork build_assignment_network(std::span<const Shifter> shifters, const Floorplan& fp,
                                           const ShifterSpec& spec, Coord window) {
  AssignmentNetwork g;
  g.num_shifters = shifters.size();
  g.room_capacity.reserve(fp.rooms.size());
  for (const auto& room : fp.rooms) g.room_capacity.push_back(num_ls(room, spec));
  for (const auto& s : shifters) {
    for (std::size_t j = 0; j < fp.rooms.size(); ++j) {
      if (g.room_capacity[j] > 0 && feasible(s, fp.rooms[j], fp, spec, window)) {
        g.candidates.push_back({s.id, j, assign_cost(s, fp.rooms[j], fp)});
      }
    }
  }
  return g;
}

AssignmentSolution solve_assignment(const AssignmentNetwork& network) {
  const FlowNetwork net = network.to_flow_network();
  const FlowResult flow = solve_min_cost_max_flow(net, 0, 1);
  AssignmentSolution sol;
  sol.room_of.resize(network.num_shifters);
  const std::size_t first = network.num_shifters;  // candidate arcs follow the s arcs
  for (std::size_t c = 0; c < network.candidates.size(); ++c) {
    if (flow.flow[first + c] > 0) {
      const auto& cand = network.candidates[c];
      sol.room_of[cand.shifter] = cand.room;
      sol.total_cost += cand.cost;
      ++sol.assigned;
    }
  }
  return sol;
}

std::vector<Rect> place_in_room(const Room& room, std::size_t count, const ShifterSpec& spec) {
  std::vector<Rect> out;
  const auto merged = merge_whitespace(room, spec);
  for (const Rect& part : {merged.first, merged.second}) {
    const Grid g = best_grid(part, spec);
    for (Coord r = 0; r < g.rows && out.size() < count; ++r) {
      for (Coord c = 0; c < g.cols && out.size() < count; ++c) {
        out.push_back({part.x + c * g.w, part.y + r * g.h, g.w, g.h});
      }
    }
  }
  return out;
}

Rect els_place(const Shifter& shifter, const Floorplan& fp, const ShifterSpec& spec) {
  const Rect& src = fp.rooms.at(shifter.endpoints.source).module;
  const Point2 sink = module_center(fp, shifter.endpoints.sink);
  const Point2 p = clamp2(sink, src);
  const Coord w = spec.width, h = spec.height;
  const auto floor_half = [](Coord v) { return v >= 0 ? v / 2 : -((1 - v) / 2); };
  const Coord cx = floor_half(p.x - w), cy = floor_half(p.y - h);
  // Side facing the sink: the axis where the sink centre lies farther out.
  const Coord dx = std::abs(sink.x - p.x), dy = std::abs(sink.y - p.y);
  if (dx > dy) return sink.x > p.x ? Rect{src.right(), cy, w, h} : Rect{src.x - w, cy, w, h};
  if (sink.y < p.y) return Rect{cx, src.y - h, w, h};
  return Rect{cx, src.top(), w, h};
}

ShifterAssignment assign_shifters(std::span<const Shifter> shifters, const Floorplan& fp,
                                  std::span<const Net> nets, const ShifterSpec& spec,
                                  Coord window) {
  ShifterAssignment sa;
  sa.shifters.resize(shifters.size());
  for (std::size_t i = 0; i < shifters.size(); ++i) {
    if (shifters[i].id != i) throw Error(ErrorCode::kInvalidArgument, "shifter ids must be 0..n-1");
    sa.shifters[i].shifter = shifters[i];
  }
  const auto network = build_assignment_network(shifters, fp, spec, window);
  const auto solution = solve_assignment(network);
  sa.flow_cost = solution.total_cost;

  std::map<std::size_t, std::vector<std::size_t>> by_room;
  for (std::size_t i = 0; i < shifters.size(); ++i) {
    if (solution.room_of[i]) by_room[*solution.room_of[i]].push_back(i);
  }
  for (const auto& [room, members] : by_room) {
    const auto rects = place_in_room(fp.rooms[room], members.size(), spec);
    for (std::size_t k = 0; k < rects.size(); ++k) {
      sa.shifters[members[k]].rect = rects[k];
      sa.shifters[members[k]].room = room;
    }
  }
  for (auto& ps : sa.shifters) {
    if (ps.room) {
      ++sa.assigned;
    } else {
      ps.rect = els_place(ps.shifter, fp, spec);
      ++sa.els;
    }
  }
  sa.ilo_percent = compute_ilo(sa.shifters, fp, nets);
  return sa;
}

Rational compute_ilo(std::span<const PlacedShifter> shifters, const Floorplan& fp,
                     std::span<const Net> nets) {
  Coord total2 = 0;
  for (const auto& n : nets) total2 += manhattan2(module_center(fp, n.source), module_center(fp, n.sink));
  if (total2 == 0) return Rational(0);
  Coord extra2 = 0;
  for (const auto& ps : shifters) {
    extra2 += detour2(module_center(fp, ps.shifter.endpoints.source), center2(ps.rect),
                      module_center(fp, ps.shifter.endpoints.sink));
  }
  return Rational(100 * extra2, total2);
}

Coord wirelength_with_shifters(std::span<const PlacedShifter> shifters, const Floorplan& fp,
                               std::span<const Net> nets) {
  Coord total2 = 0;
  for (const auto& n : nets) total2 += manhattan2(module_center(fp, n.source), module_center(fp, n.sink));
  for (const auto& ps : shifters) {
    total2 += detour2(module_center(fp, ps.shifter.endpoints.source), center2(ps.rect),
                      module_center(fp, ps.shifter.endpoints.sink));
  }
  return total2 / 2;
}

std::string check_shifter_placement(const ShifterAssignment& sa, const Floorplan& fp) {
  const Rect chip{0, 0, fp.width, fp.height};
  std::vector<const PlacedShifter*> inside;
  for (const auto& ps : sa.shifters) {
    if (!ps.room) continue;
    const std::string id = "shifter " + std::to_string(ps.shifter.id);
    const Room& room = fp.rooms.at(*ps.room);
    if (!chip.contains(ps.rect)) return id + " leaves the chip";
    if (!room.rect.contains(ps.rect)) return id + " leaves its room";
    if (ps.rect.overlaps(room.module)) return id + " overlaps the room's module";
    inside.push_back(&ps);
  }
  for (std::size_t i = 0; i < inside.size(); ++i) {
    for (std::size_t j = i + 1; j < inside.size(); ++j) {
      if (inside[i]->rect.overlaps(inside[j]->rect)) {
        return "shifters " + std::to_string(inside[i]->shifter.id) + " and " +
               std::to_string(inside[j]->shifter.id) + " overlap";
      }
    }
  }
  return {};
}

}  // namespace mvls
