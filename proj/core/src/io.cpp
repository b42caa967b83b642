#include "mvls/io.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "mvls/error.hpp"

namespace mvls {

namespace {

struct Line {
  std::size_t number = 0;
  std::vector<std::string_view> tokens;
};

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; }

// Splits into non-empty, comment-stripped lines of whitespace-separated
// tokens. Characters in `extra` also separate tokens.
std::vector<Line> tokenize(std::string_view text, std::string_view extra = {}) {
  std::vector<Line> out;
  std::size_t number = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++number;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    Line l{number, {}};
    std::size_t i = 0;
    while (i < line.size()) {
      const auto sep = [&](char c) { return is_space(c) || extra.find(c) != std::string_view::npos; };
      while (i < line.size() && sep(line[i])) ++i;
      const std::size_t start = i;
      while (i < line.size() && !sep(line[i])) ++i;
      if (i > start) l.tokens.push_back(line.substr(start, i - start));
    }
    if (!l.tokens.empty()) out.push_back(std::move(l));
  }
  return out;
}

std::int64_t to_int(std::string_view tok, std::size_t line) {
  std::int64_t v = 0;
  const auto* end = tok.data() + tok.size();
  const auto [ptr, ec] = std::from_chars(tok.data(), end, v);
  if (ec != std::errc{} || ptr != end) {
    throw ParseError(line, "expected an integer, got '" + std::string(tok) + "'");
  }
  return v;
}

double to_real(std::string_view tok, std::size_t line) {
  try {
    std::size_t used = 0;
    const double v = std::stod(std::string(tok), &used);
    if (used == tok.size()) return v;
  } catch (const std::exception&) {
  }
  throw ParseError(line, "expected a number, got '" + std::string(tok) + "'");
}

std::vector<DpPoint> to_points(const Line& l, std::size_t first) {
  if ((l.tokens.size() - first) % 3 != 0 || l.tokens.size() == first) {
    throw ParseError(l.number, "expected (level delay power) triples");
  }
  std::vector<DpPoint> pts;
  for (std::size_t i = first; i < l.tokens.size(); i += 3) {
    pts.push_back({static_cast<int>(to_int(l.tokens[i], l.number)), to_int(l.tokens[i + 1], l.number),
                   to_int(l.tokens[i + 2], l.number)});
  }
  return pts;
}

void append_points(std::string& out, std::span<const DpPoint> pts) {
  for (const auto& p : pts) {
    out += " (" + std::to_string(p.level) + ' ' + std::to_string(p.delay) + ' ' +
           std::to_string(p.power) + ')';
  }
}

std::map<std::string, ModuleId, std::less<>> index_blocks(std::span<const ModuleBlock> blocks) {
  std::map<std::string, ModuleId, std::less<>> idx;
  for (ModuleId i = 0; i < blocks.size(); ++i) idx.emplace(blocks[i].name, i);
  return idx;
}

}  // namespace

std::vector<ModuleBlock> parse_blocks(std::string_view text) {
  std::vector<ModuleBlock> out;
  std::map<std::string, std::size_t, std::less<>> seen;
  for (const auto& l : tokenize(text)) {
    if (l.tokens.size() != 3) throw ParseError(l.number, "expected '<name> <width> <height>'");
    ModuleBlock b{std::string(l.tokens[0]), to_int(l.tokens[1], l.number), to_int(l.tokens[2], l.number)};
    if (b.width <= 0 || b.height <= 0) throw ParseError(l.number, "dimensions must be positive");
    if (!seen.emplace(b.name, l.number).second) {
      throw Error(ErrorCode::kDuplicateName, "block '" + b.name + "' on line " + std::to_string(l.number));
    }
    out.push_back(std::move(b));
  }
  return out;
}

std::string format_blocks(std::span<const ModuleBlock> blocks) {
  std::string out;
  for (const auto& b : blocks) {
    out += b.name + ' ' + std::to_string(b.width) + ' ' + std::to_string(b.height) + '\n';
  }
  return out;
}

std::vector<RawNet> parse_nets(std::string_view text, std::span<const ModuleBlock> blocks) {
  const auto idx = index_blocks(blocks);
  std::vector<RawNet> out;
  for (const auto& l : tokenize(text)) {
    if (l.tokens[0] != "net") throw ParseError(l.number, "expected 'net'");
    if (l.tokens.size() < 3) throw ParseError(l.number, "a net needs a source and at least one sink");
    RawNet n;
    for (std::size_t i = 1; i < l.tokens.size(); ++i) {
      if (!idx.contains(l.tokens[i])) {
        throw Error(ErrorCode::kUnknownBlock,
                    "'" + std::string(l.tokens[i]) + "' on line " + std::to_string(l.number));
      }
      if (i == 1) {
        n.source = l.tokens[i];
      } else {
        n.sinks.emplace_back(l.tokens[i]);
      }
    }
    out.push_back(std::move(n));
  }
  return out;
}

std::string format_nets(std::span<const RawNet> nets) {
  std::string out;
  for (const auto& n : nets) {
    out += "net " + n.source;
    for (const auto& s : n.sinks) out += ' ' + s;
    out += '\n';
  }
  return out;
}

SpecFile parse_spec(std::string_view text) {
  SpecFile spec;
  bool have_k = false, have_shifter = false;
  std::map<std::string, std::size_t, std::less<>> seen;
  for (const auto& l : tokenize(text, "()")) {
    const auto key = l.tokens[0];
    if (key == "k") {
      if (l.tokens.size() != 2) throw ParseError(l.number, "expected 'k <int>'");
      spec.k = static_cast<int>(to_int(l.tokens[1], l.number));
      if (spec.k < 1) throw ParseError(l.number, "k must be at least 1");
      have_k = true;
    } else if (key == "tcycle") {
      if (l.tokens.size() != 2) throw ParseError(l.number, "expected 'tcycle <int>'");
      spec.t_cycle = to_int(l.tokens[1], l.number);
    } else if (key == "shifter") {
      if (l.tokens.size() < 3) throw ParseError(l.number, "expected 'shifter <area> <num>:<den> ...'");
      spec.shifter_area = to_int(l.tokens[1], l.number);
      const auto ratio = l.tokens[2];
      const auto colon = ratio.find(':');
      if (colon == std::string_view::npos) throw ParseError(l.number, "ratio must be <num>:<den>");
      spec.ratio_num = to_int(ratio.substr(0, colon), l.number);
      spec.ratio_den = to_int(ratio.substr(colon + 1), l.number);
      spec.shifter_overhead = to_points(l, 3);
      have_shifter = true;
    } else if (key == "curve") {
      if (l.tokens.size() < 2) throw ParseError(l.number, "expected 'curve <name> ...'");
      std::string name(l.tokens[1]);
      if (!seen.emplace(name, l.number).second) {
        throw Error(ErrorCode::kDuplicateName, "curve '" + name + "' on line " + std::to_string(l.number));
      }
      spec.curves.emplace_back(std::move(name), to_points(l, 2));
    } else {
      throw ParseError(l.number, "unknown directive '" + std::string(key) + "'");
    }
  }
  if (!have_k) throw ParseError(0, "missing 'k' line");
  if (!have_shifter) throw ParseError(0, "missing 'shifter' line");
  return spec;
}

std::string format_spec(const SpecFile& spec) {
  std::string out = "k " + std::to_string(spec.k) + '\n';
  if (spec.t_cycle) out += "tcycle " + std::to_string(*spec.t_cycle) + '\n';
  out += "shifter " + std::to_string(spec.shifter_area) + ' ' + std::to_string(spec.ratio_num) + ':' +
         std::to_string(spec.ratio_den);
  append_points(out, spec.shifter_overhead);
  out += '\n';
  for (const auto& [name, pts] : spec.curves) {
    out += "curve " + name;
    append_points(out, pts);
    out += '\n';
  }
  return out;
}

std::vector<ModuleBlock> parse_gsrc_blocks(std::string_view text) {
  std::vector<ModuleBlock> out;
  std::map<std::string, std::size_t, std::less<>> seen;
  for (const auto& l : tokenize(text, "(),")) {
    if (l.tokens.size() < 2) continue;
    const auto kind = l.tokens[1];
    if (kind == ":" || l.tokens[0] == "UCSC" || l.tokens[0] == "UCLA" || kind == "terminal") continue;
    ModuleBlock b;
    b.name = l.tokens[0];
    if (kind == "hardrectilinear") {
      if (l.tokens.size() < 3) throw ParseError(l.number, "missing vertex count");
      const auto n = to_int(l.tokens[2], l.number);
      if (n < 3 || l.tokens.size() != static_cast<std::size_t>(3 + 2 * n)) {
        throw ParseError(l.number, "vertex list does not match its count");
      }
      Coord x0 = 0, x1 = 0, y0 = 0, y1 = 0;
      for (std::int64_t v = 0; v < n; ++v) {
        const auto x = static_cast<Coord>(std::llround(to_real(l.tokens[3 + 2 * v], l.number)));
        const auto y = static_cast<Coord>(std::llround(to_real(l.tokens[4 + 2 * v], l.number)));
        if (v == 0) {
          x0 = x1 = x;
          y0 = y1 = y;
        }
        x0 = std::min(x0, x);
        x1 = std::max(x1, x);
        y0 = std::min(y0, y);
        y1 = std::max(y1, y);
      }
      b.width = x1 - x0;
      b.height = y1 - y0;
    } else if (kind == "softrectangular") {
      if (l.tokens.size() < 3) throw ParseError(l.number, "missing soft block area");
      const double area = to_real(l.tokens[2], l.number);
      b.width = b.height = static_cast<Coord>(std::ceil(std::sqrt(area)));
    } else {
      throw ParseError(l.number, "unsupported block kind '" + std::string(kind) + "'");
    }
    if (b.width <= 0 || b.height <= 0) throw ParseError(l.number, "degenerate block");
    if (!seen.emplace(b.name, l.number).second) {
      throw Error(ErrorCode::kDuplicateName, "block '" + b.name + "' on line " + std::to_string(l.number));
    }
    out.push_back(std::move(b));
  }
  return out;
}

std::vector<RawNet> parse_gsrc_nets(std::string_view text, std::span<const ModuleBlock> blocks) {
  const auto idx = index_blocks(blocks);
  std::vector<RawNet> out;
  std::vector<ModuleId> pins;
  std::int64_t remaining = 0;
  std::size_t net_line = 0;
  const auto flush = [&] {
    std::sort(pins.begin(), pins.end());
    pins.erase(std::unique(pins.begin(), pins.end()), pins.end());
    if (pins.size() >= 2) {
      RawNet n{blocks[pins[0]].name, {}};
      for (std::size_t i = 1; i < pins.size(); ++i) n.sinks.push_back(blocks[pins[i]].name);
      out.push_back(std::move(n));
    }
    pins.clear();
  };
  for (const auto& l : tokenize(text, ":")) {
    const auto key = l.tokens[0];
    if (key == "UCLA" || key == "NumNets" || key == "NumPins") continue;
    if (key == "NetDegree") {
      if (remaining > 0) throw ParseError(net_line, "net has fewer pins than its degree");
      if (l.tokens.size() < 2) throw ParseError(l.number, "missing net degree");
      remaining = to_int(l.tokens[1], l.number);
      net_line = l.number;
      if (remaining == 0) flush();
      continue;
    }
    if (remaining == 0) throw ParseError(l.number, "pin outside a net");
    if (auto it = idx.find(key); it != idx.end()) pins.push_back(it->second);
    if (--remaining == 0) flush();
  }
  if (remaining > 0) throw ParseError(net_line, "net has fewer pins than its degree");
  return out;
}

std::string format_floorplan(const Floorplan& fp, std::span<const ModuleBlock> modules,
                             std::span<const int> levels) {
  std::string out = "chip " + std::to_string(fp.width) + ' ' + std::to_string(fp.height) + '\n';
  for (std::size_t i = 0; i < fp.rooms.size(); ++i) {
    const auto& r = fp.rooms[i];
    out += modules[i].name;
    for (const Coord v : {r.module.x, r.module.y, r.module.w, r.module.h, r.rect.x, r.rect.y, r.rect.w, r.rect.h}) {
      out += ' ' + std::to_string(v);
    }
    out += ' ' + std::to_string(levels[i]) + '\n';
  }
  return out;
}

ParsedFloorplan parse_floorplan(std::string_view text) {
  ParsedFloorplan out;
  bool have_chip = false;
  for (const auto& l : tokenize(text)) {
    if (l.tokens[0] == "chip") {
      if (l.tokens.size() != 3) throw ParseError(l.number, "expected 'chip <w> <h>'");
      out.floorplan.width = to_int(l.tokens[1], l.number);
      out.floorplan.height = to_int(l.tokens[2], l.number);
      have_chip = true;
      continue;
    }
    if (l.tokens.size() != 10) throw ParseError(l.number, "expected 10 fields per module");
    std::array<Coord, 8> v{};
    for (std::size_t i = 0; i < 8; ++i) v[i] = to_int(l.tokens[i + 1], l.number);
    Room room = make_room({v[4], v[5], v[6], v[7]}, v[2], v[3]);
    if (room.module != Rect{v[0], v[1], v[2], v[3]}) {
      throw ParseError(l.number, "module is not at its room origin");
    }
    out.floorplan.rooms.push_back(room);
    out.names.emplace_back(l.tokens[0]);
    out.levels.push_back(static_cast<int>(to_int(l.tokens[9], l.number)));
  }
  if (!have_chip) throw ParseError(0, "missing 'chip' line");
  return out;
}

std::string format_shifters(const ShifterAssignment& sa, std::span<const ModuleBlock> modules) {
  std::string out;
  for (const auto& ps : sa.shifters) {
    out += std::to_string(ps.shifter.id) + ' ' + modules[ps.shifter.endpoints.source].name + ' ' +
           modules[ps.shifter.endpoints.sink].name;
    for (const Coord v : {ps.rect.x, ps.rect.y, ps.rect.w, ps.rect.h}) out += ' ' + std::to_string(v);
    out += ps.room ? " room\n" : " els\n";
  }
  return out;
}

std::vector<ParsedShifter> parse_shifters(std::string_view text) {
  std::vector<ParsedShifter> out;
  for (const auto& l : tokenize(text)) {
    if (l.tokens.size() != 8) throw ParseError(l.number, "expected 8 fields per shifter");
    ParsedShifter s;
    s.id = static_cast<std::size_t>(to_int(l.tokens[0], l.number));
    s.source = l.tokens[1];
    s.sink = l.tokens[2];
    s.rect = {to_int(l.tokens[3], l.number), to_int(l.tokens[4], l.number), to_int(l.tokens[5], l.number),
              to_int(l.tokens[6], l.number)};
    if (l.tokens[7] == "room") {
      s.in_room = true;
    } else if (l.tokens[7] != "els") {
      throw ParseError(l.number, "status must be 'room' or 'els'");
    }
    out.push_back(std::move(s));
  }
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write '" + path + "'");
  out << text;
  if (!out) throw Error(ErrorCode::kIo, "write failed for '" + path + "'");
}

}  // namespace mvls
