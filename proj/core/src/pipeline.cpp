#include "mvls/pipeline.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cstdio>
#include <limits>
#include <map>
#include <set>

#include "mvls/error.hpp"
#include "mvls/random.hpp"

namespace mvls {

namespace {

using boost::multiprecision::cpp_int;

std::vector<DpPoint> random_curve(Rng& rng, const GenSpecOptions& o) {
  std::set<std::int64_t, std::greater<>> slopes;
  while (slopes.size() < static_cast<std::size_t>(kMaxLevels - 1)) slopes.insert(uniform_int(rng, 1, o.max_slope));
  std::vector<DpPoint> pts(kMaxLevels);
  pts[0].delay = uniform_int(rng, o.delay_min, o.delay_max);
  const Power floor = uniform_int(rng, o.power_min, o.power_max);
  std::vector<Power> drops;
  auto it = slopes.begin();
  for (int q = 1; q < kMaxLevels; ++q, ++it) {
    const Time gap = o.quantum * uniform_int(rng, 1, o.max_gap);
    pts[q].delay = pts[q - 1].delay + gap;
    drops.push_back(*it * gap);
  }
  pts[kMaxLevels - 1].power = floor;
  for (int q = kMaxLevels - 2; q >= 0; --q) pts[q].power = pts[q + 1].power + drops[q];
  for (int q = 0; q < kMaxLevels; ++q) pts[q].level = q + 1;
  return pts;
}

std::vector<DpPoint> take(std::span<const DpPoint> pts, int k) {
  return {pts.begin(), pts.begin() + std::min<std::size_t>(pts.size(), static_cast<std::size_t>(k))};
}

BigRational parse_decimal(std::string_view tok, std::size_t line) {
  const bool neg = !tok.empty() && tok[0] == '-';
  if (neg) tok.remove_prefix(1);
  cpp_int num = 0, den = 1;
  bool dot = false, digits = false;
  for (const char c : tok) {
    if (c == '.' && !dot) {
      dot = true;
    } else if (c >= '0' && c <= '9') {
      num = num * 10 + (c - '0');
      if (dot) den *= 10;
      digits = true;
    } else {
      throw ParseError(line, "expected a decimal, got '" + std::string(tok) + "'");
    }
  }
  if (!digits) throw ParseError(line, "expected a decimal");
  BigRational v(num, den);
  return neg ? BigRational(-v) : v;
}

std::int64_t parse_int(std::string_view tok, std::size_t line) {
  const BigRational v = parse_decimal(tok, line);
  if (denominator(v) != 1) throw ParseError(line, "expected an integer, got '" + std::string(tok) + "'");
  return static_cast<std::int64_t>(numerator(v));
}

std::string format_mean(const BigRational& v) {
  return denominator(v) == 1 ? numerator(v).str() : format_fixed(v, 2);
}

std::string format_runtime(double s) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f", s);
  return buf;
}

std::string timing_diagnostic(const Problem& p) {
  const std::vector<Time> zero(p.netlist.nets().size(), 0);
  const auto tg = build_timing_graph(p.netlist, zero);
  const std::vector<int> fastest(p.netlist.size(), 1);
  std::string path;
  for (const ModuleId m : critical_path(tg, p.curves, fastest)) {
    if (!path.empty()) path += " -> ";
    path += p.netlist.modules()[m].name;
  }
  return "critical path at the fastest levels: " + path + " (delay " +
         std::to_string(longest_path_delay(tg, p.curves, fastest)) + ", T_cycle " +
         std::to_string(p.netlist.t_cycle()) + ")";
}

}  // namespace

SpecFile gen_spec(const GenSpecOptions& o, std::span<const ModuleBlock> blocks, std::span<const RawNet> nets) {
  if (o.k < 1 || o.k > kMaxLevels) throw Error(ErrorCode::kInvalidArgument, "k must be in 1..8");
  if (o.quantum < 1 || o.max_gap < 1 || o.delay_min < 0 || o.delay_min > o.delay_max ||
      o.power_min < 1 || o.power_min > o.power_max || o.max_slope < kMaxLevels - 1) {
    throw Error(ErrorCode::kInvalidArgument, "bad generation ranges");
  }
  Rng rng(o.seed);
  // Constant shifter delay; power overhead falls linearly with the level.
  const Time ls_delay = o.quantum * uniform_int(rng, 1, 2);
  const Power ls_power = uniform_int(rng, 1, 3);
  std::vector<DpPoint> overhead;
  for (int q = 1; q <= kMaxLevels; ++q) overhead.push_back({q, ls_delay, ls_power * (kMaxLevels - q + 1)});
  const ShifterSpec full = make_shifter_spec(o.shifter_area, o.ratio_num, o.ratio_den, overhead);

  SpecFile spec;
  spec.k = o.k;
  spec.shifter_area = o.shifter_area;
  spec.ratio_num = o.ratio_num;
  spec.ratio_den = o.ratio_den;
  spec.shifter_overhead = take(overhead, o.k);
  for (const auto& b : blocks) {
    std::optional<std::vector<DpPoint>> curve;
    for (int attempt = 0; attempt < 1000 && !curve; ++attempt) {
      auto pts = random_curve(rng, o);
      try {
        modify_dp_curve(validate_dp_curve(pts, kMaxLevels), full);
        curve = std::move(pts);
      } catch (const Error&) {
      }
    }
    if (!curve) throw Error(ErrorCode::kInvalidArgument, "could not draw a curve compatible with the shifter");
    spec.curves.emplace_back(b.name, take(*curve, o.k));
  }

  const Problem p = build_problem({blocks.begin(), blocks.end()}, nets, spec, o.k,
                                  std::numeric_limits<Time>::max() / 4);
  const auto tg = build_timing_graph(p.netlist, std::vector<Time>(p.netlist.nets().size(), 0));
  const Wide crit = longest_path_delay(tg, p.curves, std::vector<int>(p.netlist.size(), 1));
  const Wide num = o.tcycle_factor.numerator(), den = o.tcycle_factor.denominator();
  spec.t_cycle = static_cast<Time>((crit * num + den - 1) / den);
  return spec;
}

SynthDesign synth_design(const SynthOptions& o) {
  if (o.modules == 0 || o.min_side < 1 || o.min_side > o.max_side || o.max_fanout < 1) {
    throw Error(ErrorCode::kInvalidArgument, "bad synthesis options");
  }
  Rng rng(o.seed);
  SynthDesign d;
  for (std::size_t i = 0; i < o.modules; ++i) {
    d.blocks.push_back({"sb" + std::to_string(i), uniform_int(rng, o.min_side, o.max_side),
                        uniform_int(rng, o.min_side, o.max_side)});
  }
  if (o.modules < 2) return d;
  for (std::size_t n = 0; n < o.nets; ++n) {
    const auto src = static_cast<std::size_t>(uniform_index(rng, o.modules - 1));
    const std::size_t room = o.modules - src - 1;
    const auto fanout = 1 + uniform_index(rng, std::min(o.max_fanout, room));
    std::set<std::size_t> sinks;
    while (sinks.size() < fanout) sinks.insert(src + 1 + uniform_index(rng, room));
    RawNet net{d.blocks[src].name, {}};
    for (const auto s : sinks) net.sinks.push_back(d.blocks[s].name);
    d.nets.push_back(std::move(net));
  }
  return d;
}

Problem build_problem(std::vector<ModuleBlock> blocks, std::span<const RawNet> nets, const SpecFile& spec,
                      int k, std::optional<Time> t_cycle, bool overhead_at_top_level) {
  if (k == 0) k = spec.k;
  if (k < 1 || k > spec.k) {
    throw Error(ErrorCode::kInvalidArgument,
                "k = " + std::to_string(k) + " exceeds the spec's " + std::to_string(spec.k) + " levels");
  }
  if (static_cast<int>(spec.shifter_overhead.size()) != spec.k) {
    throw Error(ErrorCode::kWrongArity, "shifter overhead must list k levels");
  }
  for (std::size_t i = 0; i < spec.shifter_overhead.size(); ++i) {
    const auto& o = spec.shifter_overhead[i];
    if (o.level != static_cast<int>(i) + 1 || o.delay < 0 || o.power < 0) {
      throw Error(ErrorCode::kInvalidArgument, "shifter overhead must be nonnegative and ordered by level");
    }
  }
  Problem p{Netlist({}, {}, 0, 1), {}, make_shifter_spec(spec.shifter_area, spec.ratio_num, spec.ratio_den,
                                                         take(spec.shifter_overhead, k))};
  std::map<std::string, const std::vector<DpPoint>*, std::less<>> by_name;
  for (const auto& [name, pts] : spec.curves) by_name.emplace(name, &pts);
  std::set<std::string, std::less<>> names;
  for (const auto& b : blocks) {
    names.insert(b.name);
    const auto it = by_name.find(b.name);
    if (it == by_name.end()) throw Error(ErrorCode::kUnknownModule, "no curve for block '" + b.name + "'");
    const DpCurve base = validate_dp_curve(*it->second, spec.k).prefix(k);
    p.curves.push_back(modify_dp_curve(base, p.shifter, overhead_at_top_level));
  }
  for (const auto& [name, pts] : spec.curves) {
    if (!names.contains(name)) throw Error(ErrorCode::kUnknownBlock, "curve for unknown block '" + name + "'");
  }
  const auto t = t_cycle ? t_cycle : spec.t_cycle;
  if (!t) throw Error(ErrorCode::kInvalidArgument, "no T_cycle given");
  p.netlist = Netlist::from_named(std::move(blocks), decompose_multipin(nets), *t, k);
  return p;
}

std::string format_fixed(const BigRational& value, int digits) {
  cpp_int scale = 1;
  for (int i = 0; i < digits; ++i) scale *= 10;
  const BigRational scaled = value * BigRational(scale);
  cpp_int n = numerator(scaled);
  const cpp_int d = denominator(scaled);
  const bool neg = n < 0;
  if (neg) n = -n;
  const cpp_int q = (2 * n + d) / (2 * d);
  std::string whole = cpp_int(q / scale).str();
  std::string frac = cpp_int(q % scale).str();
  if (digits > 0) frac.insert(0, static_cast<std::size_t>(digits) - frac.size(), '0');
  std::string out = (neg && q != 0 ? "-" : "") + whole;
  if (digits > 0) out += '.' + frac;
  return out;
}

std::string emit_report(std::span<const ReportRow> rows) {
  if (rows.empty()) throw Error(ErrorCode::kInvalidArgument, "a report needs at least one row");
  std::string out(kReportHeader);
  out += '\n';
  BigRational power = 0, wl = 0, ls = 0, ilo = 0, ws = 0;
  double runtime = 0;
  bool same_k = true;
  for (const auto& r : rows) {
    out += r.dataset + ',' + std::to_string(r.k) + ',' + std::to_string(r.power_cost) + ',' +
           std::to_string(r.wirelength_with_ls) + ',' + std::to_string(r.ls_number) + ',' +
           format_fixed(r.ilo_percent, 2) + ',' + format_fixed(r.white_space_percent, 2) + ',' +
           format_runtime(r.runtime_seconds) + '\n';
    power += r.power_cost;
    wl += r.wirelength_with_ls;
    ls += r.ls_number;
    ilo += r.ilo_percent;
    ws += r.white_space_percent;
    runtime += r.runtime_seconds;
    same_k = same_k && r.k == rows.front().k;
  }
  const BigRational n(static_cast<std::int64_t>(rows.size()));
  out += "Avg," + (same_k ? std::to_string(rows.front().k) : std::string()) + ',' + format_mean(power / n) + ',' +
         format_mean(wl / n) + ',' + format_mean(ls / n) + ',' + format_fixed(ilo / n, 2) + ',' +
         format_fixed(ws / n, 2) + ',' + format_runtime(runtime / static_cast<double>(rows.size())) + '\n';
  return out;
}

std::vector<ReportRow> parse_report(std::string_view text) {
  std::vector<ReportRow> rows;
  std::size_t number = 0;
  bool header = false;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++number;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    if (!header) {
      if (line != kReportHeader) throw ParseError(number, "unexpected report header");
      header = true;
      continue;
    }
    std::vector<std::string_view> f;
    for (std::size_t pos = 0;;) {
      const auto comma = line.find(',', pos);
      f.push_back(line.substr(pos, comma == std::string_view::npos ? comma : comma - pos));
      if (comma == std::string_view::npos) break;
      pos = comma + 1;
    }
    if (f.size() != 8) throw ParseError(number, "expected 8 columns");
    if (f[0] == "Avg") continue;
    ReportRow r;
    r.dataset = f[0];
    r.k = static_cast<int>(parse_int(f[1], number));
    r.power_cost = parse_int(f[2], number);
    r.wirelength_with_ls = parse_int(f[3], number);
    r.ls_number = parse_int(f[4], number);
    r.ilo_percent = parse_decimal(f[5], number);
    r.white_space_percent = parse_decimal(f[6], number);
    r.runtime_seconds = static_cast<double>(parse_decimal(f[7], number));
    rows.push_back(std::move(r));
  }
  if (!header) throw ParseError(number, "empty report");
  return rows;
}

std::string emit_svg(const Floorplan& fp, std::span<const int> levels, const ShifterAssignment& shifters) {
  static constexpr std::array<const char*, kMaxLevels> palette = {
      "#d73027", "#fc8d59", "#fee090", "#e0f3f8", "#91bfdb", "#4575b4", "#7b3294", "#1a9850"};
  const auto rect = [](const Rect& r, const std::string& attrs) {
    return "<rect x=\"" + std::to_string(r.x) + "\" y=\"" + std::to_string(r.y) + "\" width=\"" +
           std::to_string(r.w) + "\" height=\"" + std::to_string(r.h) + "\" " + attrs + "/>\n";
  };
  const std::string w = std::to_string(fp.width), h = std::to_string(fp.height);
  std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " + w + ' ' + h + "\" width=\"" + w +
                    "\" height=\"" + h + "\">\n<g transform=\"matrix(1 0 0 -1 0 " + h + ")\">\n";
  for (const auto& room : fp.rooms) {
    out += rect(room.rect, "class=\"room\" fill=\"none\" stroke=\"#555555\" vector-effect=\"non-scaling-stroke\"");
  }
  for (std::size_t i = 0; i < fp.rooms.size(); ++i) {
    const int level = levels[i] >= 1 ? levels[i] : 1;
    out += rect(fp.rooms[i].module, "class=\"module\" data-level=\"" + std::to_string(level) + "\" fill=\"" +
                                        palette[static_cast<std::size_t>(level - 1) % palette.size()] + "\"");
  }
  for (const auto& s : shifters.shifters) {
    out += rect(s.rect, std::string("class=\"shifter\" fill=\"#222222\" data-status=\"") +
                            (s.room ? "room" : "els") + "\"");
  }
  out += "</g>\n</svg>\n";
  return out;
}

RunOutput run_pipeline(const Problem& problem, const RunConfig& config, const AnnealObserver& observer) {
  const auto start = std::chrono::steady_clock::now();
  RunOutput out;
  try {
    out.result = anneal(problem, config.anneal, config.seed, observer);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kTimingInfeasible) throw;
    throw Error(ErrorCode::kTimingInfeasible, timing_diagnostic(problem));
  }
  const auto& r = out.result;
  const auto& modules = problem.netlist.modules();
  out.row.dataset = config.dataset;
  out.row.k = problem.netlist.k();
  out.row.power_cost = r.voltage.total_power;
  out.row.wirelength_with_ls = r.metrics.wirelength;
  out.row.ls_number = static_cast<std::int64_t>(r.shifters.shifters.size());
  out.row.ilo_percent = BigRational(r.shifters.ilo_percent.numerator(), r.shifters.ilo_percent.denominator());
  out.row.white_space_percent = r.floorplan.white_space_percent();
  out.floorplan = format_floorplan(r.floorplan, modules, r.voltage.level);
  out.shifters = format_shifters(r.shifters, modules);
  out.svg = emit_svg(r.floorplan, r.voltage.level, r.shifters);
  out.row.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

}  // namespace mvls
