#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>

#include <CLI11.hpp>

#include "mvls/error.hpp"
#include "mvls/pipeline.hpp"

namespace {

using namespace mvls;

constexpr int kExitInput = 2;
constexpr int kExitTiming = 3;

Rational parse_rational(const std::string& s) {
  const auto slash = s.find('/');
  try {
    if (slash == std::string::npos) return Rational(std::stoll(s));
    return Rational(std::stoll(s.substr(0, slash)), std::stoll(s.substr(slash + 1)));
  } catch (const std::exception&) {
    throw Error(ErrorCode::kInvalidArgument, "expected a rational like 3/2, got '" + s + "'");
  }
}

PhiWeights parse_weights(const std::string& s) {
  std::vector<BigRational> v;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    const auto comma = s.find(',', pos);
    const Rational r = parse_rational(s.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos));
    v.emplace_back(r.numerator(), r.denominator());
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  if (v.size() != 5) throw Error(ErrorCode::kInvalidArgument, "--weights takes five values A,W,P,R,N");
  PhiWeights w{v[0], v[1], v[2], v[3], v[4]};
  w.validate();
  return w;
}

struct Design {
  std::vector<ModuleBlock> blocks;
  std::vector<RawNet> nets;
};

Design load_design(const std::string& blocks, const std::string& nets, bool gsrc) {
  Design d;
  d.blocks = gsrc ? parse_gsrc_blocks(read_file(blocks)) : parse_blocks(read_file(blocks));
  d.nets = gsrc ? parse_gsrc_nets(read_file(nets), d.blocks) : parse_nets(read_file(nets), d.blocks);
  return d;
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
  } else {
    write_file(path, text);
  }
}

std::string pretty(const std::string& csv) {
  std::vector<std::vector<std::string>> cells;
  std::vector<std::size_t> width;
  std::size_t pos = 0;
  while (pos < csv.size()) {
    const auto nl = csv.find('\n', pos);
    const std::string line = csv.substr(pos, nl - pos);
    pos = nl == std::string::npos ? csv.size() : nl + 1;
    cells.emplace_back();
    std::size_t p = 0;
    for (;;) {
      const auto c = line.find(',', p);
      cells.back().push_back(line.substr(p, c == std::string::npos ? c : c - p));
      if (cells.back().size() > width.size()) width.push_back(0);
      width[cells.back().size() - 1] = std::max(width[cells.back().size() - 1], cells.back().back().size());
      if (c == std::string::npos) break;
      p = c + 1;
    }
  }
  std::string out;
  for (const auto& row : cells) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += "  ";
      out += std::string(width[i] - row[i].size(), ' ') + row[i];
    }
    out += '\n';
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Voltage-island floorplanning with level shifter placement"};
  app.require_subcommand(1);

  // synth
  SynthOptions so;
  std::string synth_blocks, synth_nets;
  auto* synth = app.add_subcommand("synth", "Generate a random block/net design");
  synth->add_option("--seed", so.seed, "RNG seed")->required();
  synth->add_option("--modules", so.modules, "Number of blocks");
  synth->add_option("--nets", so.nets, "Number of multi-pin nets");
  synth->add_option("--max-fanout", so.max_fanout, "Maximum sinks per net");
  synth->add_option("--min-side", so.min_side);
  synth->add_option("--max-side", so.max_side);
  synth->add_option("--out-blocks", synth_blocks, "Blocks file to write")->required();
  synth->add_option("--out-nets", synth_nets, "Nets file to write")->required();

  // gen-spec
  GenSpecOptions go;
  std::string gs_blocks, gs_nets, gs_out, gs_factor = "13/10";
  bool gs_gsrc = false;
  auto* gen = app.add_subcommand("gen-spec", "Generate DP-curves, shifter spec and T_cycle");
  gen->add_option("--seed", go.seed, "RNG seed")->required();
  gen->add_option("--blocks", gs_blocks)->required();
  gen->add_option("--nets", gs_nets)->required();
  gen->add_flag("--gsrc", gs_gsrc, "Inputs are GSRC .blocks/.nets files");
  gen->add_option("--k", go.k, "Number of voltage levels");
  gen->add_option("--quantum", go.quantum, "Delay gap quantum");
  gen->add_option("--delay-min", go.delay_min);
  gen->add_option("--delay-max", go.delay_max);
  gen->add_option("--max-gap", go.max_gap);
  gen->add_option("--max-slope", go.max_slope);
  gen->add_option("--power-min", go.power_min);
  gen->add_option("--power-max", go.power_max);
  gen->add_option("--shifter-area", go.shifter_area);
  gen->add_option("--tcycle-factor", gs_factor, "T_cycle over the all-fastest critical delay, e.g. 13/10");
  gen->add_option("-o,--out", gs_out, "Spec file to write (default stdout)");

  // run
  RunConfig rc;
  std::string r_blocks, r_nets, r_spec, r_out = ".", r_kappa = "0", r_weights;
  int r_k = 0;
  std::optional<Time> r_tcycle;
  std::optional<Coord> r_window;
  bool r_gsrc = false, r_no_top = false, r_pretty = false;
  auto* run = app.add_subcommand("run", "Floorplan, assign voltages and place level shifters");
  run->add_option("--seed", rc.seed, "RNG seed")->required();
  run->add_option("--blocks", r_blocks)->required();
  run->add_option("--nets", r_nets)->required();
  run->add_option("--spec", r_spec)->required();
  run->add_flag("--gsrc", r_gsrc, "Inputs are GSRC .blocks/.nets files");
  run->add_option("--k", r_k, "Voltage levels to use (default: the spec's)");
  run->add_option("--tcycle", r_tcycle, "Override the spec's T_cycle");
  run->add_option("--dataset", rc.dataset, "Dataset name in the report");
  run->add_option("--alpha", rc.anneal.alpha, "Cooling factor");
  run->add_option("--beta", rc.anneal.beta, "Moves per temperature per module");
  run->add_option("--accept", rc.anneal.initial_acceptance, "Initial uphill acceptance ratio");
  run->add_option("--ls-every", rc.anneal.ls_every, "Shifter assignment cadence in accepted moves");
  run->add_option("--kappa", r_kappa, "Wire delay per unit length, e.g. 1/10");
  run->add_option("--window", r_window, "Shifter search window");
  run->add_option("--weights", r_weights, "Phi weights A,W,P,R,N (default: calibrated)");
  run->add_option("--max-temperatures", rc.anneal.max_temperatures);
  run->add_option("--stall", rc.anneal.stall_temperatures, "Stop after this many temperatures without improvement");
  run->add_flag("--rotate", rc.anneal.allow_rotation, "Allow module rotation");
  run->add_flag("--no-top-overhead", r_no_top, "Do not add shifter overhead at level 1");
  run->add_flag("--pretty", r_pretty, "Print aligned columns instead of CSV");
  run->add_option("--out", r_out, "Output directory");

  // report
  std::vector<std::string> rep_inputs;
  std::string rep_out;
  bool rep_pretty = false;
  auto* report = app.add_subcommand("report", "Merge report rows and append the average line");
  report->add_option("inputs", rep_inputs, "Report CSV files")->required();
  report->add_option("-o,--out", rep_out);
  report->add_flag("--pretty", rep_pretty, "Aligned columns instead of CSV");

  // render
  std::string rd_fp, rd_ls, rd_out;
  auto* render = app.add_subcommand("render", "Render a floorplan (and shifters) as SVG");
  render->add_option("--floorplan", rd_fp)->required();
  render->add_option("--shifters", rd_ls);
  render->add_option("-o,--out", rd_out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc_parse = app.exit(e);
    return rc_parse == 0 ? 0 : kExitInput;
  }

  try {
    if (*synth) {
      const auto d = synth_design(so);
      write_file(synth_blocks, format_blocks(d.blocks));
      write_file(synth_nets, format_nets(d.nets));
    } else if (*gen) {
      go.tcycle_factor = parse_rational(gs_factor);
      const auto d = load_design(gs_blocks, gs_nets, gs_gsrc);
      emit(gs_out, format_spec(gen_spec(go, d.blocks, d.nets)));
    } else if (*run) {
      rc.anneal.kappa = parse_rational(r_kappa);
      rc.anneal.window = r_window;
      if (!r_weights.empty()) rc.anneal.weights = parse_weights(r_weights);
      auto d = load_design(r_blocks, r_nets, r_gsrc);
      const auto spec = parse_spec(read_file(r_spec));
      const auto problem = build_problem(std::move(d.blocks), d.nets, spec, r_k, r_tcycle, !r_no_top);
      const auto out = run_pipeline(problem, rc);
      std::filesystem::create_directories(r_out);
      const std::filesystem::path dir(r_out);
      const std::string csv = emit_report(std::span(&out.row, 1));
      write_file((dir / "report.csv").string(), csv);
      write_file((dir / "floorplan.txt").string(), out.floorplan);
      write_file((dir / "shifters.txt").string(), out.shifters);
      write_file((dir / "layout.svg").string(), out.svg);
      std::cout << (r_pretty ? pretty(csv) : csv);
    } else if (*report) {
      std::vector<ReportRow> rows;
      for (const auto& path : rep_inputs) {
        auto r = parse_report(read_file(path));
        rows.insert(rows.end(), r.begin(), r.end());
      }
      const std::string csv = emit_report(rows);
      emit(rep_out, rep_pretty ? pretty(csv) : csv);
    } else if (*render) {
      const auto parsed = parse_floorplan(read_file(rd_fp));
      if (const auto bad = check_floorplan(parsed.floorplan); !bad.empty()) {
        throw Error(ErrorCode::kInvalidArgument, "invalid floorplan: " + bad);
      }
      std::map<std::string, ModuleId> idx;
      for (ModuleId i = 0; i < parsed.names.size(); ++i) idx[parsed.names[i]] = i;
      ShifterAssignment sa;
      if (!rd_ls.empty()) {
        for (const auto& s : parse_shifters(read_file(rd_ls))) {
          if (!idx.contains(s.source) || !idx.contains(s.sink)) {
            throw Error(ErrorCode::kUnknownBlock, "shifter " + std::to_string(s.id) + " names an unknown module");
          }
          PlacedShifter ps;
          ps.shifter.id = s.id;
          ps.shifter.endpoints = {idx[s.source], idx[s.sink]};
          ps.rect = s.rect;
          if (s.in_room) ps.room = 0;
          sa.shifters.push_back(ps);
        }
      }
      emit(rd_out, emit_svg(parsed.floorplan, parsed.levels, sa));
    }
  } catch (const Error& e) {
    std::cerr << "mvls: " << e.what() << '\n';
    return e.code() == ErrorCode::kTimingInfeasible ? kExitTiming : kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "mvls: " << e.what() << '\n';
    return kExitInput;
  }
  return 0;
}
