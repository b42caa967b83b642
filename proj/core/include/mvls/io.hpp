#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mvls/floorplan.hpp"
#include "mvls/model.hpp"
#include "mvls/shifter.hpp"

namespace mvls {

// `<name> <width> <height>` per line, `#` starts a comment.
// Throws ParseError or Error{kDuplicateName}.
std::vector<ModuleBlock> parse_blocks(std::string_view text);
std::string format_blocks(std::span<const ModuleBlock> blocks);

// `net <source> <sink> [<sink>...]` per line. Throws ParseError or
// Error{kUnknownBlock}.
std::vector<RawNet> parse_nets(std::string_view text, std::span<const ModuleBlock> blocks);
std::string format_nets(std::span<const RawNet> nets);

// Contents of a spec file. Curves keep file order; points are unvalidated.
struct SpecFile {
  int k = 0;
  std::optional<Time> t_cycle;
  Area shifter_area = 0;
  std::int64_t ratio_num = 1;
  std::int64_t ratio_den = 1;
  std::vector<DpPoint> shifter_overhead;
  std::vector<std::pair<std::string, std::vector<DpPoint>>> curves;
};

// Lines: `k <int>`, `tcycle <int>`, `shifter <area> <num>:<den> (l d p)...`,
// `curve <name> (l d p)...`. Parentheses are optional. Throws ParseError.
SpecFile parse_spec(std::string_view text);
std::string format_spec(const SpecFile& spec);

// Subset of the GSRC bookshelf formats: hard rectilinear blocks (bounding
// box), soft blocks (square of the given area), terminals ignored. Nets are
// oriented from their lowest-index block, which keeps the module graph
// acyclic; pins on terminals are dropped and single-block nets discarded.
std::vector<ModuleBlock> parse_gsrc_blocks(std::string_view text);
std::vector<RawNet> parse_gsrc_nets(std::string_view text, std::span<const ModuleBlock> blocks);

// Floorplan lines: `chip <w> <h>`, then per module
// `<module> x y w h room_x room_y room_w room_h <level>`.
std::string format_floorplan(const Floorplan& fp, std::span<const ModuleBlock> modules,
                             std::span<const int> levels);

struct ParsedFloorplan {
  Floorplan floorplan;
  std::vector<std::string> names;
  std::vector<int> levels;
};

ParsedFloorplan parse_floorplan(std::string_view text);

// `<id> <net_src> <net_sink> x y w h room|els` per shifter.
std::string format_shifters(const ShifterAssignment& sa, std::span<const ModuleBlock> modules);

struct ParsedShifter {
  std::size_t id = 0;
  std::string source;
  std::string sink;
  Rect rect;
  bool in_room = false;
};

std::vector<ParsedShifter> parse_shifters(std::string_view text);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view text);

}  // namespace mvls
