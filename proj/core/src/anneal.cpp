#include "mvls/anneal.hpp"

#include <cmath>
#include <map>
#include <string>

#include "mvls/error.hpp"
#include "mvls/random.hpp"

namespace mvls {

std::vector<Time> wire_delays(const Floorplan& fp, std::span<const Net> nets, const Rational& kappa) {
  if (kappa < 0) throw Error(ErrorCode::kInvalidArgument, "kappa must be nonnegative");
  std::vector<Time> out;
  out.reserve(nets.size());
  const Wide num = kappa.numerator();
  const Wide den = Wide{kappa.denominator()} * 2;
  for (const auto& n : nets) {
    const Wide d2 = manhattan2(center2(fp.rooms.at(n.source).module), center2(fp.rooms.at(n.sink).module));
    out.push_back(static_cast<Time>((num * d2 + den - 1) / den));
  }
  return out;
}

namespace {

PhiMetrics fresh_metrics(const Problem& p, const Floorplan& fp, const VoltageAssignment& va,
                         const ShifterAssignment& sa) {
  PhiMetrics m;
  m.area = fp.area();
  m.wirelength = wirelength_with_shifters(sa.shifters, fp, p.netlist.nets());
  m.power = va.total_power;
  m.islands = voltage_islands(fp, va.level);
  m.unassigned = sa.els;
  return m;
}

ShifterAssignment place_shifters(const Problem& p, const Floorplan& fp, const VoltageAssignment& va,
                                 const AnnealConfig& config) {
  const auto& nets = p.netlist.nets();
  const auto shifters = required_shifters(nets, va.level);
  return assign_shifters(shifters, fp, nets, p.shifter, config.window.value_or(default_window(fp)));
}

class Annealer {
 public:
  struct State {
    SlicingExpr expr;
    Floorplan fp;
    VoltageAssignment va;
    Coord hpwl = 0;
    std::int64_t islands = 0;
    // Shifter data; stale when `sa` is empty.
    Coord detour = 0;
    std::int64_t els = 0;
    std::optional<ShifterAssignment> sa;
    BigRational phi;
  };

  Annealer(const Problem& p, const AnnealConfig& c, const AnnealObserver& obs)
      : p_(p), c_(c), obs_(obs) {}

  std::optional<State> evaluate(const SlicingExpr& expr) {
    ++evaluations_;
    State s{expr, pack(expr, p_.netlist.modules()), {}, 0, 0, 0, 0, std::nullopt, 0};
    const auto& nets = p_.netlist.nets();
    const auto* entry = voltage(wire_delays(s.fp, nets, c_.kappa));
    if (!entry->va) return std::nullopt;
    s.va = *entry->va;
    if (obs_) obs_(CandidateView{s.fp, entry->tg, p_.curves, s.va});
    s.hpwl = hpwl(s.fp, nets);
    s.islands = voltage_islands(s.fp, s.va.level);
    return s;
  }

  void refresh(State& s) {
    s.sa = place_shifters(p_, s.fp, s.va, c_);
    s.detour = wirelength_with_shifters(s.sa->shifters, s.fp, p_.netlist.nets()) - s.hpwl;
    s.els = s.sa->els;
  }

  [[nodiscard]] PhiMetrics metrics(const State& s) const {
    return {s.fp.area(), s.hpwl + s.detour, s.va.total_power, s.islands, s.els};
  }

  void score(State& s, const PhiWeights& w) const { s.phi = cost_phi(metrics(s), w); }

  [[nodiscard]] std::size_t evaluations() const noexcept { return evaluations_; }
  [[nodiscard]] const std::optional<Error>& last_failure() const noexcept { return failure_; }

 private:
  struct Entry {
    TimingGraph tg;
    std::optional<VoltageAssignment> va;
  };

  const Entry* voltage(const std::vector<Time>& delays) {
    if (auto it = cache_.find(delays); it != cache_.end()) return &it->second;
    if (cache_.size() >= 4096) cache_.clear();
    Entry e{build_timing_graph(p_.netlist, delays), std::nullopt};
    try {
      e.va = assign_voltages(e.tg, p_.curves, c_.assign);
    } catch (const Error& err) {
      if (err.code() != ErrorCode::kTimingInfeasible) throw;
      failure_ = err;
    }
    return &cache_.emplace(delays, std::move(e)).first->second;
  }

  const Problem& p_;
  const AnnealConfig& c_;
  const AnnealObserver& obs_;
  std::map<std::vector<Time>, Entry> cache_;
  std::size_t evaluations_ = 0;
  std::optional<Error> failure_;
};

PhiWeights calibrate(const std::vector<PhiMetrics>& samples, std::size_t modules) {
  PhiWeights w;
  w.area = 1;
  w.power = 1;
  if (samples.empty()) {
    w.wirelength = 1;
    w.islands = 0;
    w.unassigned = 0;
    return w;
  }
  BigRational sum_a = 0, sum_w = 0;
  for (const auto& s : samples) {
    sum_a += s.area;
    sum_w += s.wirelength;
  }
  const auto n = static_cast<std::int64_t>(samples.size());
  w.wirelength = sum_w > 0 ? BigRational(sum_a / sum_w) : BigRational(1);
  w.islands = sum_a / BigRational(10 * static_cast<std::int64_t>(modules) * n);
  w.unassigned = 0;
  BigRational mean = 0;
  for (const auto& s : samples) mean += cost_phi(s, w);
  w.unassigned = BigRational(10) * mean / BigRational(n);
  if (w.unassigned == 0) w.unassigned = 1;
  return w;
}

}  // namespace

Evaluation evaluate(const Problem& problem, const SlicingExpr& expr, const AnnealConfig& config) {
  Evaluation ev;
  ev.floorplan = pack(expr, problem.netlist.modules());
  const auto& nets = problem.netlist.nets();
  const auto tg = build_timing_graph(problem.netlist, wire_delays(ev.floorplan, nets, config.kappa));
  ev.voltage = assign_voltages(tg, problem.curves, config.assign);
  ev.shifters = place_shifters(problem, ev.floorplan, ev.voltage, config);
  ev.metrics = fresh_metrics(problem, ev.floorplan, ev.voltage, ev.shifters);
  return ev;
}

AnnealResult anneal(const Problem& problem, const AnnealConfig& config, std::uint64_t seed,
                    const AnnealObserver& observer) {
  const std::size_t m = problem.netlist.size();
  if (m == 0) throw Error(ErrorCode::kInvalidArgument, "empty netlist");
  if (problem.curves.size() != m) throw Error(ErrorCode::kInvalidArgument, "one curve per module");
  if (!(config.alpha > 0 && config.alpha < 1) || config.beta < 1 || config.ls_every < 1 ||
      !(config.initial_acceptance > 0 && config.initial_acceptance < 1)) {
    throw Error(ErrorCode::kInvalidArgument, "bad annealing schedule");
  }
  if (config.weights) config.weights->validate();

  Rng rng(seed);
  Annealer an(problem, config, observer);
  const SlicingExpr start = SlicingExpr::initial(m);

  // Random walk used to calibrate the weights and the initial temperature.
  std::vector<std::optional<Annealer::State>> walk;
  walk.push_back(an.evaluate(start));
  const int samples = m > 1 ? config.calibration_samples : 0;
  SlicingExpr walk_expr = start;
  for (int i = 0; i < samples; ++i) {
    walk_expr = perturb(walk_expr, random_move(rng, config.allow_rotation), rng);
    walk.push_back(an.evaluate(walk_expr));
  }
  std::vector<PhiMetrics> sample_metrics;
  for (auto& s : walk) {
    if (!s) continue;
    an.refresh(*s);
    sample_metrics.push_back(an.metrics(*s));
  }
  AnnealResult result{start, {}, {}, {}, {}, config.weights.value_or(calibrate(sample_metrics, m)),
                      0, {}, 0, 0};
  const PhiWeights& w = result.weights;

  double uphill = 0;
  int uphill_count = 0;
  for (std::size_t i = 1; i < walk.size(); ++i) {
    if (!walk[i] || !walk[i - 1]) continue;
    an.score(*walk[i], w);
    an.score(*walk[i - 1], w);
    const double d = to_double(BigRational(walk[i]->phi - walk[i - 1]->phi));
    if (d > 0) {
      uphill += d;
      ++uphill_count;
    }
  }
  const double t0 = uphill_count > 0 ? (uphill / uphill_count) / -std::log(config.initial_acceptance) : 1.0;

  std::optional<Annealer::State> cur = walk.front();
  std::optional<Annealer::State> best;
  if (cur) {
    an.score(*cur, w);
    best = cur;
  }
  int accepted = 0;
  double temp = t0;
  int stall = 0;
  while (m > 1 && result.temperatures < config.max_temperatures &&
         temp > t0 * config.final_temperature_ratio && stall < config.stall_temperatures) {
    bool improved = false;
    for (int i = 0; i < config.beta * static_cast<int>(m); ++i) {
      const SlicingExpr& from = cur ? cur->expr : start;
      auto cand = an.evaluate(perturb(from, random_move(rng, config.allow_rotation), rng));
      if (!cand) continue;
      if (cur) {
        cand->detour = cur->detour;
        cand->els = cur->els;
      } else {
        an.refresh(*cand);
      }
      an.score(*cand, w);
      bool accept = !cur || cand->phi <= cur->phi;
      if (!accept) {
        const double delta = to_double(BigRational(cand->phi - cur->phi));
        accept = uniform_unit(rng) < std::exp(-delta / temp);
      }
      if (!accept) continue;
      cur = std::move(cand);
      ++accepted;
      if (!cur->sa && (accepted % config.ls_every == 0 || (best && cur->phi < best->phi))) {
        an.refresh(*cur);
        an.score(*cur, w);
      }
      if (!best || cur->phi < best->phi) {
        best = cur;
        improved = true;
      }
    }
    if (best) result.checkpoints.push_back(best->phi);
    temp *= config.alpha;
    ++result.temperatures;
    stall = improved ? 0 : stall + 1;
  }

  if (!best) {
    if (an.last_failure()) throw *an.last_failure();
    throw Error(ErrorCode::kTimingInfeasible, "no floorplan admits a feasible voltage assignment");
  }
  if (!best->sa) an.refresh(*best);
  an.score(*best, w);
  result.expr = best->expr;
  result.floorplan = best->fp;
  result.voltage = best->va;
  result.shifters = *best->sa;
  result.metrics = an.metrics(*best);
  result.phi = best->phi;
  result.evaluations = an.evaluations();
  return result;
}

}  // namespace mvls
