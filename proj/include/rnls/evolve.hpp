#pragma once

#include <filesystem>
#include <vector>

#include "rnls/functionals.hpp"
#include "rnls/grid.hpp"
#include "rnls/nonlinearity.hpp"

namespace rnls {

// One monitor sample. The CSV columns are the first six fields;
// f_abs_integral is kept in memory for the weighted f-L1 audits.
struct MonitorRow {
    double t = 0;
    double mass = 0;
    double energy = 0;
    double grad_sq = 0;
    double g_abs_integral = 0;  // int |G(u)| dx
    double sup_norm = 0;
    double f_abs_integral = 0;  // int |f(u)| dx
};

struct EvolveConfig {
    double dt = 1e-3;
    int monitor_stride = 1;
    int snapshot_stride = 100;
    double sup_abort = 1e4;          // blowup suspicion thresholds
    double grad_abort = 1e8;
    double boundary_limit = 1e-6;    // |u|^2 fraction allowed in r >= 0.9 r_max
    bool nonlinear = true;           // false: pure linear flow (reference runs)
};

struct Trajectory {
    Equation equation = Equation::NLS;
    Nonlinearity nl;
    std::vector<EvolutionState> states;  // snapshots, always includes t=0 and T
    std::vector<MonitorRow> monitor;
    double dt = 0;
    bool nonlinear = true;

    const EvolutionState& initial() const { return states.front(); }
    const EvolutionState& final_state() const { return states.back(); }
    double end_time() const { return monitor.back().t; }

    // Snapshot with time closest to t; throws if none within dt.
    const EvolutionState& snapshot_at(double t) const;
};

// Free flow by time t (either sign): NLS symbol e^{+i t k^2} on Hankel
// modes (equation convention i u_t - Delta u = f(u)); NLKG rotation by
// cos/sin(t sqrt(1+k^2)) acting on (u, u_t).
EvolutionState linear_propagate(const EvolutionState& state, double t);

// Strang splitting: half nonlinear phase, full linear flow, half phase.
EvolutionState step_nls(const EvolutionState& state, double dt, const Nonlinearity& nl);

// Trigonometric (Gautschi-type) leapfrog: half impulse on u_t, exact
// linear rotation, half impulse. Time-reversible.
EvolutionState step_nlkg(const EvolutionState& state, double dt, const Nonlinearity& nl);

Trajectory evolve(const EvolutionState& initial, const Nonlinearity& nl, double T,
                  const EvolveConfig& cfg = {});

MonitorRow monitor_row(const EvolutionState& state, const Nonlinearity& nl,
                       bool nonlinear = true);

// Header pinned to `t,mass,energy,grad_sq,g_integral,sup_norm`.
void write_monitor_csv(const Trajectory& traj, const std::filesystem::path& path);

}  // namespace rnls
