#include "mvls/floorplan.hpp"

#include <algorithm>
#include <numeric>

#include "mvls/error.hpp"

namespace mvls {

namespace {

struct TreeNode {
  int token = 0;
  std::size_t left = 0;
  std::size_t right = 0;
  Coord w = 0;
  Coord h = 0;
};

bool positive_overlap(Coord a0, Coord a1, Coord b0, Coord b1) {
  return std::min(a1, b1) > std::max(a0, b0);
}

bool adjacent(const Rect& a, const Rect& b) {
  if ((a.right() == b.x || b.right() == a.x) && positive_overlap(a.y, a.top(), b.y, b.top())) {
    return true;
  }
  return (a.top() == b.y || b.top() == a.y) && positive_overlap(a.x, a.right(), b.x, b.right());
}

std::size_t find_root(std::vector<std::size_t>& parent, std::size_t v) {
  while (parent[v] != v) {
    parent[v] = parent[parent[v]];
    v = parent[v];
  }
  return v;
}

// Maximal runs of operators as [begin, end) token ranges.
std::vector<std::pair<std::size_t, std::size_t>> chains(const std::vector<int>& tokens) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  std::size_t i = 0;
  while (i < tokens.size()) {
    if (!SlicingExpr::is_operator(tokens[i])) {
      ++i;
      continue;
    }
    const std::size_t begin = i;
    while (i < tokens.size() && SlicingExpr::is_operator(tokens[i])) ++i;
    out.emplace_back(begin, i);
  }
  return out;
}

bool well_formed(const std::vector<int>& tokens) {
  std::size_t operands = 0, operators = 0;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (SlicingExpr::is_operator(tokens[i])) {
      ++operators;
      if (operators >= operands) return false;
      if (i > 0 && tokens[i - 1] == tokens[i]) return false;
    } else {
      ++operands;
    }
  }
  return true;
}

}  // namespace

Point2 clamp2(Point2 p, const Rect& r) noexcept {
  return {std::clamp(p.x, 2 * r.x, 2 * r.right()), std::clamp(p.y, 2 * r.y, 2 * r.top())};
}

Room make_room(const Rect& rect, Coord module_w, Coord module_h) {
  Room room;
  room.rect = rect;
  room.module = {rect.x, rect.y, module_w, module_h};
  room.parts = whitespace_parts(room);
  return room;
}

WhitespaceParts whitespace_parts(const Room& room) {
  const Rect& r = room.rect;
  const Coord wm = room.module.w;
  const Coord hm = room.module.h;
  WhitespaceParts p;
  p.p1 = {r.x + wm, r.y, r.w - wm, hm};
  p.p2 = {r.x, r.y + hm, wm, r.h - hm};
  p.p3 = {r.x + wm, r.y + hm, r.w - wm, r.h - hm};
  return p;
}

Area Floorplan::module_area() const noexcept {
  Area a = 0;
  for (const auto& r : rooms) a += r.module.area();
  return a;
}

BigRational Floorplan::white_space_percent() const {
  if (area() == 0) return 0;
  return BigRational(area() - module_area()) * 100 / BigRational(area());
}

std::string check_floorplan(const Floorplan& fp) {
  const Rect chip{0, 0, fp.width, fp.height};
  Area total = 0;
  for (std::size_t i = 0; i < fp.rooms.size(); ++i) {
    const auto& room = fp.rooms[i];
    const std::string id = "room " + std::to_string(i);
    if (room.rect.empty()) return id + " is empty";
    if (!chip.contains(room.rect)) return id + " leaves the chip";
    if (room.module.x != room.rect.x || room.module.y != room.rect.y) {
      return id + " does not hold its module at the origin";
    }
    if (!room.rect.contains(room.module)) return id + " is smaller than its module";
    total += room.rect.area();
  }
  if (total != fp.area()) return "room areas do not sum to the chip area";
  for (std::size_t i = 0; i < fp.rooms.size(); ++i) {
    for (std::size_t j = i + 1; j < fp.rooms.size(); ++j) {
      if (fp.rooms[i].rect.overlaps(fp.rooms[j].rect)) {
        return "rooms " + std::to_string(i) + " and " + std::to_string(j) + " overlap";
      }
    }
  }
  return {};
}

SlicingExpr::SlicingExpr(std::vector<int> tokens, std::size_t num_modules,
                         std::vector<bool> rotated)
    : tokens_(std::move(tokens)), rotated_(std::move(rotated)) {
  if (rotated_.empty()) rotated_.assign(num_modules, false);
  if (rotated_.size() != num_modules) {
    throw Error(ErrorCode::kMalformedExpression, "rotation flags do not match module count");
  }
  if (num_modules == 0) {
    if (!tokens_.empty()) throw Error(ErrorCode::kMalformedExpression, "tokens without modules");
    return;
  }
  std::vector<bool> seen(num_modules, false);
  std::size_t operands = 0;
  for (int t : tokens_) {
    if (is_operator(t)) {
      if (t != kHorizontal && t != kVertical) {
        throw Error(ErrorCode::kMalformedExpression, "unknown operator");
      }
      continue;
    }
    if (static_cast<std::size_t>(t) >= num_modules || seen[static_cast<std::size_t>(t)]) {
      throw Error(ErrorCode::kMalformedExpression, "operand out of range or repeated");
    }
    seen[static_cast<std::size_t>(t)] = true;
    ++operands;
  }
  if (operands != num_modules || tokens_.size() != 2 * num_modules - 1) {
    throw Error(ErrorCode::kMalformedExpression, "operand/operator count mismatch");
  }
  if (!well_formed(tokens_)) {
    throw Error(ErrorCode::kMalformedExpression, "not a normalized postfix expression");
  }
}

SlicingExpr SlicingExpr::initial(std::size_t num_modules) {
  std::vector<int> tokens;
  for (std::size_t i = 0; i < num_modules; ++i) {
    tokens.push_back(static_cast<int>(i));
    if (i > 0) tokens.push_back(i % 2 == 1 ? kVertical : kHorizontal);
  }
  return SlicingExpr(std::move(tokens), num_modules);
}

std::string SlicingExpr::to_string() const {
  std::string s;
  for (int t : tokens_) {
    if (!s.empty()) s += ' ';
    if (t == kHorizontal) {
      s += 'H';
    } else if (t == kVertical) {
      s += 'V';
    } else {
      s += std::to_string(t);
      if (rotated_[static_cast<std::size_t>(t)]) s += 'r';
    }
  }
  return s;
}

std::optional<SlicingExpr> swap_operands(const SlicingExpr& expr, std::size_t operand_index) {
  std::vector<std::size_t> positions;
  for (std::size_t i = 0; i < expr.tokens().size(); ++i) {
    if (!SlicingExpr::is_operator(expr.tokens()[i])) positions.push_back(i);
  }
  if (operand_index + 1 >= positions.size()) return std::nullopt;
  auto tokens = expr.tokens();
  std::swap(tokens[positions[operand_index]], tokens[positions[operand_index + 1]]);
  return SlicingExpr(std::move(tokens), expr.num_modules(), expr.rotated());
}

std::size_t count_chains(const SlicingExpr& expr) { return chains(expr.tokens()).size(); }

std::optional<SlicingExpr> complement_chain(const SlicingExpr& expr, std::size_t chain_index) {
  const auto runs = chains(expr.tokens());
  if (chain_index >= runs.size()) return std::nullopt;
  auto tokens = expr.tokens();
  for (std::size_t i = runs[chain_index].first; i < runs[chain_index].second; ++i) {
    tokens[i] = tokens[i] == SlicingExpr::kHorizontal ? SlicingExpr::kVertical
                                                      : SlicingExpr::kHorizontal;
  }
  return SlicingExpr(std::move(tokens), expr.num_modules(), expr.rotated());
}

std::optional<SlicingExpr> swap_operand_operator(const SlicingExpr& expr, std::size_t position) {
  const auto& t = expr.tokens();
  if (position + 1 >= t.size()) return std::nullopt;
  if (SlicingExpr::is_operator(t[position]) == SlicingExpr::is_operator(t[position + 1])) {
    return std::nullopt;
  }
  auto tokens = t;
  std::swap(tokens[position], tokens[position + 1]);
  if (!well_formed(tokens)) return std::nullopt;
  return SlicingExpr(std::move(tokens), expr.num_modules(), expr.rotated());
}

SlicingExpr rotate_module(const SlicingExpr& expr, ModuleId module) {
  auto rotated = expr.rotated();
  rotated.at(module) = !rotated.at(module);
  return SlicingExpr(expr.tokens(), expr.num_modules(), std::move(rotated));
}

SlicingExpr perturb(const SlicingExpr& expr, Move move, Rng& rng) {
  const std::size_t m = expr.num_modules();
  if (m < 2) return move == Move::kRotate && m == 1 ? rotate_module(expr, 0) : expr;
  switch (move) {
    case Move::kSwapOperands:
      return *swap_operands(expr, uniform_index(rng, m - 1));
    case Move::kComplementChain:
      return *complement_chain(expr, uniform_index(rng, count_chains(expr)));
    case Move::kSwapOperandOperator: {
      const std::size_t attempts = 2 * expr.tokens().size();
      for (std::size_t a = 0; a < attempts; ++a) {
        if (auto next = swap_operand_operator(expr, uniform_index(rng, expr.tokens().size() - 1))) {
          return *next;
        }
      }
      return *swap_operands(expr, uniform_index(rng, m - 1));
    }
    case Move::kRotate:
      return rotate_module(expr, uniform_index(rng, m));
  }
  return expr;
}

Move random_move(Rng& rng, bool allow_rotation) {
  switch (uniform_index(rng, allow_rotation ? 4 : 3)) {
    case 0: return Move::kSwapOperands;
    case 1: return Move::kComplementChain;
    case 2: return Move::kSwapOperandOperator;
    default: return Move::kRotate;
  }
}

Floorplan pack(const SlicingExpr& expr, std::span<const ModuleBlock> modules) {
  if (modules.size() != expr.num_modules()) {
    throw Error(ErrorCode::kMalformedExpression, "expression and module list disagree");
  }
  Floorplan fp;
  if (modules.empty()) return fp;

  std::vector<TreeNode> nodes;
  nodes.reserve(expr.tokens().size());
  std::vector<std::size_t> stack;
  for (int t : expr.tokens()) {
    TreeNode n;
    n.token = t;
    if (!SlicingExpr::is_operator(t)) {
      const auto i = static_cast<std::size_t>(t);
      const bool rot = expr.rotated()[i];
      n.w = rot ? modules[i].height : modules[i].width;
      n.h = rot ? modules[i].width : modules[i].height;
    } else {
      if (stack.size() < 2) throw Error(ErrorCode::kMalformedExpression, "operator underflow");
      n.right = stack.back();
      stack.pop_back();
      n.left = stack.back();
      stack.pop_back();
      const auto& l = nodes[n.left];
      const auto& r = nodes[n.right];
      if (t == SlicingExpr::kHorizontal) {
        n.w = std::max(l.w, r.w);
        n.h = l.h + r.h;
      } else {
        n.w = l.w + r.w;
        n.h = std::max(l.h, r.h);
      }
    }
    nodes.push_back(n);
    stack.push_back(nodes.size() - 1);
  }
  if (stack.size() != 1) throw Error(ErrorCode::kMalformedExpression, "dangling operands");

  fp.width = nodes.back().w;
  fp.height = nodes.back().h;
  fp.rooms.resize(modules.size());
  std::vector<std::pair<std::size_t, Rect>> todo{{nodes.size() - 1, Rect{0, 0, fp.width, fp.height}}};
  while (!todo.empty()) {
    const auto [idx, rect] = todo.back();
    todo.pop_back();
    const auto& n = nodes[idx];
    if (!SlicingExpr::is_operator(n.token)) {
      fp.rooms[static_cast<std::size_t>(n.token)] = make_room(rect, n.w, n.h);
      continue;
    }
    const auto& l = nodes[n.left];
    if (n.token == SlicingExpr::kHorizontal) {
      todo.push_back({n.left, Rect{rect.x, rect.y, rect.w, l.h}});
      todo.push_back({n.right, Rect{rect.x, rect.y + l.h, rect.w, rect.h - l.h}});
    } else {
      todo.push_back({n.left, Rect{rect.x, rect.y, l.w, rect.h}});
      todo.push_back({n.right, Rect{rect.x + l.w, rect.y, rect.w - l.w, rect.h}});
    }
  }
  return fp;
}

Coord hpwl(const Floorplan& fp, std::span<const Net> nets) {
  Coord total2 = 0;
  for (const auto& n : nets) {
    total2 += manhattan2(center2(fp.rooms.at(n.source).module), center2(fp.rooms.at(n.sink).module));
  }
  return total2 / 2;
}

std::int64_t voltage_islands(const Floorplan& fp, std::span<const int> levels) {
  const std::size_t m = fp.rooms.size();
  if (levels.size() != m) throw Error(ErrorCode::kInvalidArgument, "one level per room required");
  std::vector<std::size_t> parent(m);
  std::iota(parent.begin(), parent.end(), 0);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      if (levels[i] == levels[j] && adjacent(fp.rooms[i].rect, fp.rooms[j].rect)) {
        parent[find_root(parent, i)] = find_root(parent, j);
      }
    }
  }
  std::int64_t components = 0;
  for (std::size_t i = 0; i < m; ++i) {
    if (find_root(parent, i) == i) ++components;
  }
  return components;
}

void PhiWeights::validate() const {
  const std::array<const BigRational*, 5> all{&area, &wirelength, &power, &islands, &unassigned};
  bool any = false;
  for (const auto* w : all) {
    if (*w < 0) throw Error(ErrorCode::kInvalidArgument, "Phi weights must be nonnegative");
    any = any || *w > 0;
  }
  if (!any) throw Error(ErrorCode::kInvalidArgument, "at least one Phi weight must be positive");
}

BigRational cost_phi(const PhiMetrics& metrics, const PhiWeights& weights) {
  return weights.area * metrics.area + weights.wirelength * metrics.wirelength +
         weights.power * metrics.power + weights.islands * metrics.islands +
         weights.unassigned * metrics.unassigned;
}

}  // namespace mvls
