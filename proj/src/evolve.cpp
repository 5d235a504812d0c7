#include "rnls/evolve.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

namespace rnls {

namespace {

Eigen::VectorXcd apply_real(const Eigen::MatrixXd& M, const Eigen::VectorXcd& v) {
    Eigen::VectorXcd out(v.size());
    out.real() = M * v.real();
    out.imag() = M * v.imag();
    return out;
}

// Hankel coefficients c = O (sqrt(w) . u) and back.
Eigen::VectorXcd to_modes(const RadialField& u) {
    const auto& g = *u.grid();
    Eigen::VectorXcd y(u.size());
    y.real() = g.sqrt_weights().cwiseProduct(u.values().real().matrix());
    y.imag() = g.sqrt_weights().cwiseProduct(u.values().imag().matrix());
    return apply_real(g.transform_matrix(), y);
}

RadialField from_modes(const GridPtr& grid, const Eigen::VectorXcd& c) {
    Eigen::VectorXcd y = apply_real(grid->transform_matrix(), c);
    Eigen::VectorXcd out(y.size());
    out.real() = grid->inv_sqrt_weights().cwiseProduct(y.real().matrix());
    out.imag() = grid->inv_sqrt_weights().cwiseProduct(y.imag().matrix());
    return RadialField(grid, std::move(out));
}

RadialField half_kick(const RadialField& v, const RadialField& u, double dt,
                      const Nonlinearity& nl) {
    Eigen::VectorXcd out = v.values();
    for (int j = 0; j < u.size(); ++j) out[j] += dt * eval_f(u.values()[j], nl);
    return RadialField(v.grid(), std::move(out));
}

}  // namespace

EvolutionState linear_propagate(const EvolutionState& state, double t) {
    const GridPtr& grid = state.u.grid();
    const auto& k = grid->wavenumbers();  // throws UnsupportedGrid on uniform grids
    if (state.equation == Equation::NLS) {
        Eigen::VectorXcd c = to_modes(state.u);
        for (int m = 0; m < c.size(); ++m)
            c[m] *= std::polar(1.0, k[m] * k[m] * t);
        return EvolutionState::nls(from_modes(grid, c), state.t + t);
    }
    if (!state.u_t) throw InvalidField("nlkg state without u_t");
    Eigen::VectorXcd cu = to_modes(state.u);
    Eigen::VectorXcd cv = to_modes(*state.u_t);
    for (int m = 0; m < cu.size(); ++m) {
        const double om = std::sqrt(1 + k[m] * k[m]);
        const double cs = std::cos(om * t), sn = std::sin(om * t);
        const std::complex<double> a = cu[m], b = cv[m];
        cu[m] = cs * a + sn / om * b;
        cv[m] = -om * sn * a + cs * b;
    }
    return EvolutionState::nlkg(from_modes(grid, cu), from_modes(grid, cv), state.t + t);
}

EvolutionState step_nls(const EvolutionState& state, double dt, const Nonlinearity& nl) {
    if (state.equation != Equation::NLS) throw InvalidField("step_nls on a non-NLS state");
    RadialField u = nonlinear_phase_step(state.u, dt / 2, nl);
    EvolutionState mid = linear_propagate(EvolutionState::nls(std::move(u), state.t), dt);
    return EvolutionState::nls(nonlinear_phase_step(mid.u, dt / 2, nl), state.t + dt);
}

EvolutionState step_nlkg(const EvolutionState& state, double dt, const Nonlinearity& nl) {
    if (state.equation != Equation::NLKG || !state.u_t)
        throw InvalidField("step_nlkg on a non-NLKG state");
    RadialField v = half_kick(*state.u_t, state.u, dt / 2, nl);
    EvolutionState mid = linear_propagate(
        EvolutionState::nlkg(state.u, std::move(v), state.t), dt);
    v = half_kick(*mid.u_t, mid.u, dt / 2, nl);
    return EvolutionState::nlkg(mid.u, std::move(v), state.t + dt);
}

MonitorRow monitor_row(const EvolutionState& state, const Nonlinearity& nl,
                       bool nonlinear) {
    MonitorRow row;
    row.t = state.t;
    const H1Norms n = h1_norms(state.u);
    row.mass = n.mass_sq;
    row.grad_sq = n.grad_sq;
    row.sup_norm = sup_norm(state.u);
    if (nonlinear) {
        row.energy = energy(state, nl);
        row.g_abs_integral = integral_abs_G(state.u, nl);
        row.f_abs_integral = integral_abs_f(state.u, nl);
    } else {
        row.energy = 0.5 * n.grad_sq;
        if (state.equation == Equation::NLKG)
            row.energy += 0.5 * n.mass_sq + 0.5 * h1_norms(*state.u_t).mass_sq;
    }
    return row;
}

Trajectory evolve(const EvolutionState& initial, const Nonlinearity& nl, double T,
                  const EvolveConfig& cfg) {
    if (!(T > 0)) throw std::invalid_argument("evolve requires T > 0");
    if (!(cfg.dt > 0)) throw std::invalid_argument("evolve requires dt > 0");
    if (cfg.monitor_stride > cfg.snapshot_stride)
        throw std::invalid_argument("monitor stride must not exceed snapshot stride");

    Trajectory traj;
    traj.equation = initial.equation;
    traj.nl = nl;
    traj.dt = cfg.dt;
    traj.nonlinear = cfg.nonlinear;

    const long n_steps = std::lround(T / cfg.dt);
    EvolutionState state = initial;
    traj.states.push_back(state);
    traj.monitor.push_back(monitor_row(state, nl, cfg.nonlinear));

    for (long step = 1; step <= n_steps; ++step) {
        if (cfg.nonlinear)
            state = state.equation == Equation::NLS ? step_nls(state, cfg.dt, nl)
                                                    : step_nlkg(state, cfg.dt, nl);
        else
            state = linear_propagate(state, cfg.dt);
        state.t = initial.t + step * cfg.dt;  // avoid additive time drift

        const bool last = step == n_steps;
        if (step % cfg.monitor_stride == 0 || last) {
            MonitorRow row = monitor_row(state, nl, cfg.nonlinear);
            if (!std::isfinite(row.mass) || !std::isfinite(row.sup_norm))
                throw InvalidField("non-finite field during evolution at t = " +
                                   std::to_string(row.t));
            if (row.sup_norm > cfg.sup_abort || row.grad_sq > cfg.grad_abort)
                throw BlowupSuspected("monitor thresholds exceeded at t = " +
                                      std::to_string(row.t));
            if (row.mass > 0 &&
                boundary_mass_fraction(state.u, 0.9) > cfg.boundary_limit)
                throw BoundaryContamination("outer 10% of the domain holds > " +
                                            std::to_string(cfg.boundary_limit) +
                                            " of the mass at t = " + std::to_string(row.t));
            traj.monitor.push_back(row);
        }
        if (step % cfg.snapshot_stride == 0 || last) traj.states.push_back(state);
    }
    return traj;
}

const EvolutionState& Trajectory::snapshot_at(double t) const {
    const EvolutionState* best = nullptr;
    for (const auto& s : states)
        if (!best || std::abs(s.t - t) < std::abs(best->t - t)) best = &s;
    if (!best || std::abs(best->t - t) > dt)
        throw std::invalid_argument("no snapshot near t = " + std::to_string(t));
    return *best;
}

void write_monitor_csv(const Trajectory& traj, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << "t,mass,energy,grad_sq,g_integral,sup_norm\n";
    char buf[256];
    for (const auto& r : traj.monitor) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", r.t,
                      r.mass, r.energy, r.grad_sq, r.g_abs_integral, r.sup_norm);
        out << buf;
    }
}

}  // namespace rnls
