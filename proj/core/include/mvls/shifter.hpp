#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mvls/floorplan.hpp"
#include "mvls/flow.hpp"
#include "mvls/model.hpp"

namespace mvls {

// A level shifter needed on a net whose driver runs at a lower voltage (a
// larger level index) than its sink.
struct Shifter {
  std::size_t id = 0;
  std::size_t net = 0;  // index into the netlist's nets
  Net endpoints;
  int driver_level = 0;
  int sink_level = 0;
};

std::vector<Shifter> required_shifters(std::span<const Net> nets, std::span<const int> levels);

// True when the shifter rectangle fits the part in neither orientation.
bool too_narrow(const Rect& part, const ShifterSpec& spec);

// Whitespace capacity estimate over the three parts of a room: zero out
// too-narrow p1/p2, merge p3 into whichever of p1/p2 leaves the larger
// remainder modulo the shifter area (ties merge into p2), then count whole
// shifter areas in each.
std::int64_t num_ls(const WhitespaceParts& parts, const ShifterSpec& spec);
std::int64_t num_ls(const Room& room, const ShifterSpec& spec);

// Geometry after the corner merge chosen by num_ls: the corner joins p1
// (forming the full right column) or p2 (forming the full top row).
struct MergedWhitespace {
  Rect first;   // p1, possibly extended by p3
  Rect second;  // p2, possibly extended by p3
  bool corner_in_first = false;
};

MergedWhitespace merge_whitespace(const Room& room, const ShifterSpec& spec);

// fr_ij: the room has capacity and intersects the bounding box of the net's
// endpoint centres grown by `window` on every side.
bool feasible(const Shifter& shifter, const Room& room, const Floorplan& fp,
              const ShifterSpec& spec, Coord window);

// F_ij: Manhattan detour of routing the net through the room centre.
Coord assign_cost(const Shifter& shifter, const Room& room, const Floorplan& fp);

// Half the mean room dimension.
Coord default_window(const Floorplan& fp);

// The bipartite network G*: shifters on one side, rooms on the other.
struct AssignmentNetwork {
  struct Candidate {
    std::size_t shifter = 0;
    std::size_t room = 0;
    Coord cost = 0;
  };
  std::size_t num_shifters = 0;
  std::vector<std::int64_t> room_capacity;  // NumLS per room
  std::vector<Candidate> candidates;        // pairs with fr_ij = 1

  // s = 0, t = 1, shifter i = 2 + i, room j = 2 + num_shifters + j.
  [[nodiscard]] FlowNetwork to_flow_network() const;
};

AssignmentNetwork build_assignment_network(std::span<const Shifter> shifters, const Floorplan& fp,
                                           const ShifterSpec& spec, Coord window);

struct AssignmentSolution {
  std::vector<std::optional<std::size_t>> room_of;  // per shifter
  Coord total_cost = 0;
  std::int64_t assigned = 0;
};

// Min-cost max-flow over G*.
AssignmentSolution solve_assignment(const AssignmentNetwork& network);

struct PlacedShifter {
  Shifter shifter;
  Rect rect;
  std::optional<std::size_t> room;  // nullopt: the shifter is in ELS
};

struct ShifterAssignment {
  std::vector<PlacedShifter> shifters;  // indexed by shifter id
  std::int64_t assigned = 0;
  std::int64_t els = 0;
  Coord flow_cost = 0;
  Rational ilo_percent{0};
};

// Greedy row-major packing into the merged parts, first part first, choosing
// the orientation that fits the most shifters in each part. Returns at most
// `count` rectangles.
std::vector<Rect> place_in_room(const Room& room, std::size_t count, const ShifterSpec& spec);

// Fallback position for an ELS shifter: abutting the driver module at the
// boundary point nearest the sink centre.
Rect els_place(const Shifter& shifter, const Floorplan& fp, const ShifterSpec& spec);

ShifterAssignment assign_shifters(std::span<const Shifter> shifters, const Floorplan& fp,
                                  std::span<const Net> nets, const ShifterSpec& spec,
                                  Coord window);

// 100 * (sum of shifter detours) / (sum of all net lengths); 0 for an empty
// netlist.
Rational compute_ilo(std::span<const PlacedShifter> shifters, const Floorplan& fp,
                     std::span<const Net> nets);

// Net lengths plus shifter detours (doubled coordinates, halved at the end).
Coord wirelength_with_shifters(std::span<const PlacedShifter> shifters, const Floorplan& fp,
                               std::span<const Net> nets);

// Empty when room-assigned shifters sit inside their room's whitespace, inside
// the chip, and pairwise apart.
std::string check_shifter_placement(const ShifterAssignment& sa, const Floorplan& fp);

}  // namespace mvls
