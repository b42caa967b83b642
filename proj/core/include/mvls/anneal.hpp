#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "mvls/floorplan.hpp"
#include "mvls/model.hpp"
#include "mvls/shifter.hpp"
#include "mvls/voltage.hpp"

namespace mvls {

// Everything the annealer optimizes over. `curves` are the modified curves,
// one per module, already truncated to the netlist's k.
struct Problem {
  Netlist netlist;
  std::vector<DpCurve> curves;
  ShifterSpec shifter;
};

struct AnnealConfig {
  double alpha = 0.9;               // geometric cooling factor
  int beta = 10;                    // moves per temperature = beta * m
  double initial_acceptance = 0.9;  // target uphill acceptance at T0
  int ls_every = 5;                 // shifter assignment cadence, in accepted moves
  Rational kappa{0};                // wire delay = ceil(kappa * net length)
  std::optional<Coord> window;      // shifter search window; default_window when unset
  std::optional<PhiWeights> weights;  // calibrated from random samples when unset
  bool allow_rotation = false;
  double final_temperature_ratio = 1e-3;
  int max_temperatures = 200;
  int stall_temperatures = 30;      // stop after this many temperatures without a new best
  int calibration_samples = 40;
  AssignOptions assign;
};

// Per-net wire delays for a floorplan.
std::vector<Time> wire_delays(const Floorplan& fp, std::span<const Net> nets, const Rational& kappa);

// One voltage-assignment evaluation inside the annealer.
struct CandidateView {
  const Floorplan& floorplan;
  const TimingGraph& timing;
  std::span<const DpCurve> curves;
  const VoltageAssignment& voltage;
};

using AnnealObserver = std::function<void(const CandidateView&)>;

struct AnnealResult {
  SlicingExpr expr = SlicingExpr::initial(1);
  Floorplan floorplan;
  VoltageAssignment voltage;
  ShifterAssignment shifters;
  PhiMetrics metrics;
  PhiWeights weights;
  BigRational phi;
  std::vector<BigRational> checkpoints;  // best phi at the end of each temperature
  std::size_t evaluations = 0;
  int temperatures = 0;
};

// Full evaluation of one floorplan: voltage assignment, shifter assignment
// and the Phi metrics. Throws kTimingInfeasible.
struct Evaluation {
  Floorplan floorplan;
  VoltageAssignment voltage;
  ShifterAssignment shifters;
  PhiMetrics metrics;
};

Evaluation evaluate(const Problem& problem, const SlicingExpr& expr, const AnnealConfig& config);

// Simulated annealing over slicing floorplans. Deterministic for a given
// seed. Throws kTimingInfeasible when no visited floorplan admits a feasible
// voltage assignment.
AnnealResult anneal(const Problem& problem, const AnnealConfig& config, std::uint64_t seed,
                    const AnnealObserver& observer = {});

}  // namespace mvls
