#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mvls/model.hpp"
#include "mvls/random.hpp"
#include "mvls/types.hpp"

namespace mvls {

struct Rect {
  Coord x = 0;
  Coord y = 0;
  Coord w = 0;
  Coord h = 0;

  [[nodiscard]] Area area() const noexcept { return w * h; }
  [[nodiscard]] Coord right() const noexcept { return x + w; }
  [[nodiscard]] Coord top() const noexcept { return y + h; }
  [[nodiscard]] bool empty() const noexcept { return w <= 0 || h <= 0; }
  // Interiors intersect (touching edges do not count).
  [[nodiscard]] bool overlaps(const Rect& o) const noexcept {
    return !empty() && !o.empty() && x < o.right() && o.x < right() && y < o.top() && o.y < top();
  }
  [[nodiscard]] bool contains(const Rect& o) const noexcept {
    return o.x >= x && o.y >= y && o.right() <= right() && o.top() <= top();
  }

  friend bool operator==(const Rect&, const Rect&) = default;
};

// Points in doubled coordinates, so rectangle centres stay integral.
struct Point2 {
  Coord x = 0;
  Coord y = 0;
};

inline Point2 center2(const Rect& r) noexcept { return {2 * r.x + r.w, 2 * r.y + r.h}; }

inline Coord manhattan2(Point2 a, Point2 b) noexcept {
  return (a.x > b.x ? a.x - b.x : b.x - a.x) + (a.y > b.y ? a.y - b.y : b.y - a.y);
}

// Closest point of `r` to `p`, in doubled coordinates.
Point2 clamp2(Point2 p, const Rect& r) noexcept;

// Right strip, top strip and corner of a room around its module.
struct WhitespaceParts {
  Rect p1;
  Rect p2;
  Rect p3;
};

struct Room {
  Rect rect;
  Rect module;  // module footprint at the room origin
  WhitespaceParts parts;
};

// Room of the given rectangle holding a w x h module at its origin.
Room make_room(const Rect& rect, Coord module_w, Coord module_h);

WhitespaceParts whitespace_parts(const Room& room);

struct Floorplan {
  Coord width = 0;
  Coord height = 0;
  std::vector<Room> rooms;  // indexed by module id

  [[nodiscard]] Area area() const noexcept { return width * height; }
  [[nodiscard]] Area module_area() const noexcept;
  // (chip area - module area) / chip area * 100.
  [[nodiscard]] BigRational white_space_percent() const;
};

// Empty string when the rooms tile the chip exactly and each room holds its
// module at its origin; otherwise a description of the first violation.
std::string check_floorplan(const Floorplan& fp);

// Normalized Polish expression. Operands are module ids; operators are
// kHorizontal (children stacked, first operand at the bottom) and kVertical
// (children side by side, first operand on the left).
class SlicingExpr {
 public:
  static constexpr int kHorizontal = -1;
  static constexpr int kVertical = -2;

  // Throws Error{kMalformedExpression}.
  SlicingExpr(std::vector<int> tokens, std::size_t num_modules, std::vector<bool> rotated = {});

  // Alternating-cut expression 0 1 V 2 H 3 V ...
  static SlicingExpr initial(std::size_t num_modules);

  [[nodiscard]] const std::vector<int>& tokens() const noexcept { return tokens_; }
  [[nodiscard]] const std::vector<bool>& rotated() const noexcept { return rotated_; }
  [[nodiscard]] std::size_t num_modules() const noexcept { return rotated_.size(); }
  [[nodiscard]] std::string to_string() const;

  static bool is_operator(int token) noexcept { return token < 0; }

  friend bool operator==(const SlicingExpr&, const SlicingExpr&) = default;

 private:
  std::vector<int> tokens_;
  std::vector<bool> rotated_;
};

enum class Move {
  kSwapOperands,          // M1
  kComplementChain,       // M2
  kSwapOperandOperator,   // M3
  kRotate,                // only when rotation is enabled
};

// Deterministic move primitives. Indices count operands, chains, or token
// positions respectively; out-of-range or illegal requests return nullopt.
std::optional<SlicingExpr> swap_operands(const SlicingExpr& expr, std::size_t operand_index);
std::optional<SlicingExpr> complement_chain(const SlicingExpr& expr, std::size_t chain_index);
std::optional<SlicingExpr> swap_operand_operator(const SlicingExpr& expr, std::size_t position);
SlicingExpr rotate_module(const SlicingExpr& expr, ModuleId module);

std::size_t count_chains(const SlicingExpr& expr);

// Random instance of the requested move; M3 retries and falls back to M1.
SlicingExpr perturb(const SlicingExpr& expr, Move move, Rng& rng);

// Draws a move uniformly from M1..M3 (and rotation when allowed).
Move random_move(Rng& rng, bool allow_rotation);

// Bottom-up dimension combination followed by top-down slack distribution;
// slack always goes to the right/top child. Throws kMalformedExpression.
Floorplan pack(const SlicingExpr& expr, std::span<const ModuleBlock> modules);

// Manhattan distance between module centres over all two-pin nets; distances
// are accumulated in doubled coordinates and the total is halved (rounding down).
Coord hpwl(const Floorplan& fp, std::span<const Net> nets);

// Connected components of the same-level room adjacency graph (rooms are
// adjacent when they share a boundary segment of positive length).
std::int64_t voltage_islands(const Floorplan& fp, std::span<const int> levels);

struct PhiWeights {
  BigRational area = 1;
  BigRational wirelength = 1;
  BigRational power = 1;
  BigRational islands = 0;
  BigRational unassigned = 0;

  // Throws kInvalidArgument when a weight is negative or all are zero.
  void validate() const;
};

struct PhiMetrics {
  Area area = 0;          // A: chip area
  Coord wirelength = 0;   // W: wirelength including shifter detours
  Power power = 0;        // P: total modified power
  std::int64_t islands = 0;     // R: voltage islands
  std::int64_t unassigned = 0;  // N: shifters left in ELS
};

BigRational cost_phi(const PhiMetrics& metrics, const PhiWeights& weights);

}  // namespace mvls
