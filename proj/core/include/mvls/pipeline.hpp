#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mvls/anneal.hpp"
#include "mvls/io.hpp"

namespace mvls {

// Curves are generated with this many levels and truncated, so specs for a
// smaller k are prefixes of specs for a larger one.
inline constexpr int kMaxLevels = 8;

struct GenSpecOptions {
  std::uint64_t seed = 0;
  int k = 4;
  Time quantum = 1;          // delay gaps are multiples of this
  Time delay_min = 4;        // range of d^1
  Time delay_max = 20;
  int max_gap = 3;           // delay gap between levels, in quanta
  std::int64_t max_slope = 24;  // slope magnitudes are distinct integers in [1, max_slope]
  Power power_min = 10;      // range of the slowest level's power
  Power power_max = 60;
  Area shifter_area = 4;
  std::int64_t ratio_num = 1;
  std::int64_t ratio_den = 1;
  Rational tcycle_factor{13, 10};  // T_cycle = ceil(factor * all-fastest critical delay)
};

SpecFile gen_spec(const GenSpecOptions& options, std::span<const ModuleBlock> blocks,
                  std::span<const RawNet> nets);

// Random blocks and a random acyclic netlist (nets point from lower to higher
// block index).
struct SynthOptions {
  std::uint64_t seed = 0;
  std::size_t modules = 10;
  std::size_t nets = 15;
  std::size_t max_fanout = 3;
  Coord min_side = 4;
  Coord max_side = 24;
};

struct SynthDesign {
  std::vector<ModuleBlock> blocks;
  std::vector<RawNet> nets;
};

SynthDesign synth_design(const SynthOptions& options);

// Validated problem: curves from the spec truncated to `k` (0 keeps the
// spec's k) and modified by the shifter overhead.
Problem build_problem(std::vector<ModuleBlock> blocks, std::span<const RawNet> nets,
                      const SpecFile& spec, int k = 0, std::optional<Time> t_cycle = std::nullopt,
                      bool overhead_at_top_level = true);

struct ReportRow {
  std::string dataset;
  int k = 0;
  Power power_cost = 0;
  Coord wirelength_with_ls = 0;
  std::int64_t ls_number = 0;
  BigRational ilo_percent = 0;
  BigRational white_space_percent = 0;
  double runtime_seconds = 0;
};

inline constexpr std::string_view kReportHeader =
    "dataset,k,power_cost,wirelength_with_ls,ls_number,ilo_percent,white_space_percent,runtime_seconds";

// Header, one line per row, then an `Avg` line. Percentages carry two
// decimals, runtime three.
std::string emit_report(std::span<const ReportRow> rows);

// Data rows of a report; `Avg` lines are skipped. Throws ParseError.
std::vector<ReportRow> parse_report(std::string_view text);

// Rooms, then modules filled by level, then shifters; y grows upwards.
std::string emit_svg(const Floorplan& fp, std::span<const int> levels, const ShifterAssignment& shifters);

// Decimal rendering rounded half away from zero.
std::string format_fixed(const BigRational& value, int digits);

struct RunConfig {
  std::string dataset = "design";
  std::uint64_t seed = 0;
  AnnealConfig anneal;
};

struct RunOutput {
  AnnealResult result;
  ReportRow row;
  std::string floorplan;
  std::string shifters;
  std::string svg;
};

// Anneal, then serialize. A timing failure is rethrown with the all-fastest
// critical path appended.
RunOutput run_pipeline(const Problem& problem, const RunConfig& config,
                       const AnnealObserver& observer = {});

}  // namespace mvls
