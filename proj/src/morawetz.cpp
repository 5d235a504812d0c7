#include "rnls/morawetz.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <json.hpp>

namespace rnls {

namespace {

// The fixed bump: 1 on [0,1], exp(1 - 1/(1-(s-1)^2)) on (1,2), 0 beyond.
double chi_bump(double s) {
    if (s <= 1) return 1;
    if (s >= 2) return 0;
    const double tau = s - 1;
    return std::exp(1 - 1 / (1 - tau * tau));
}

double chi_bump_d1(double s) {
    if (s <= 1 || s >= 2) return 0;
    const double tau = s - 1, A = 1 - tau * tau;
    return -2 * tau / (A * A) * chi_bump(s);
}

double chi_bump_d2(double s) {
    if (s <= 1 || s >= 2) return 0;
    const double tau = s - 1, A = 1 - tau * tau;
    const double g1 = -2 * tau / (A * A);
    const double g2 = -2 / (A * A) - 8 * tau * tau / (A * A * A);
    return (g2 + g1 * g1) * chi_bump(s);
}

// Linear interpolation of a monitor series plus exact piecewise-linear
// quadrature of f(t) * series(t) over [a, b] (trapezoid per segment).
double series_integral(const std::vector<MonitorRow>& rows, double a, double b,
                       const std::function<double(const MonitorRow&)>& pick,
                       const std::function<double(double)>& weight) {
    if (rows.size() < 2) throw std::invalid_argument("monitor series too short");
    const double t0 = rows.front().t, t1 = rows.back().t;
    if (a < t0 - 1e-12 || b > t1 + 1e-12 || a >= b)
        throw std::invalid_argument("window [" + std::to_string(a) + ", " +
                                    std::to_string(b) + "] outside the trajectory");
    a = std::max(a, t0);
    b = std::min(b, t1);
    auto value_at = [&](double t, size_t seg) {
        const double tl = rows[seg].t, tr = rows[seg + 1].t;
        const double th = tr > tl ? (t - tl) / (tr - tl) : 0.0;
        return (1 - th) * pick(rows[seg]) + th * pick(rows[seg + 1]);
    };
    double sum = 0;
    for (size_t i = 0; i + 1 < rows.size(); ++i) {
        const double lo = std::max(a, rows[i].t), hi = std::min(b, rows[i + 1].t);
        if (lo >= hi) continue;
        const double fl = weight(lo) * value_at(lo, i);
        const double fh = weight(hi) * value_at(hi, i);
        sum += 0.5 * (fl + fh) * (hi - lo);
    }
    return sum;
}

}  // namespace

CutoffWeights CutoffWeights::build(double R, const GridPtr& grid) {
    if (!(R > 0)) throw std::invalid_argument("cutoff radius must be positive");
    if (2 * R >= grid->r_max())
        throw DomainTooSmall("cutoff needs 2R < r_max (R = " + std::to_string(R) +
                             ", r_max = " + std::to_string(grid->r_max()) + ")");
    CutoffWeights cw;
    cw.R_ = R;
    cw.grid_ = grid;
    const int n = grid->n();
    cw.phi_.resize(n);
    cw.dphi_.resize(n);
    cw.d2phi_.resize(n);
    cw.d3phi_.resize(n);
    cw.phi_over_r_.resize(n);
    cw.chi_.resize(n);

    auto chi_sq = [](double s) { const double c = chi_bump(s); return c * c; };
    // phi(2R)/R, the plateau value of phi/R past the support of chi.
    const double plateau =
        1 + boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
                chi_sq, 1.0, 2.0, 10, 1e-13);

    for (int j = 0; j < n; ++j) {
        const double r = grid->nodes()[j];
        const double s = r / R;
        const double c = chi_bump(s), c1 = chi_bump_d1(s), c2 = chi_bump_d2(s);
        cw.chi_[j] = c;
        cw.dphi_[j] = c * c;
        cw.d2phi_[j] = 2 * c * c1 / R;
        cw.d3phi_[j] = 2 * (c1 * c1 + c * c2) / (R * R);
        if (s <= 1)
            cw.phi_[j] = r;
        else if (s >= 2)
            cw.phi_[j] = R * plateau;
        else
            cw.phi_[j] = R * (1 + boost::math::quadrature::gauss_kronrod<double, 15>::
                                      integrate(chi_sq, 1.0, s, 10, 1e-13));
        cw.phi_over_r_[j] = cw.phi_[j] / r;
    }
    return cw;
}

double morawetz_quantity(const EvolutionState& state, const CutoffWeights& cw) {
    if (state.u.grid() != cw.grid())
        throw std::invalid_argument("cutoff weights built on a different grid");
    const RadialField du = radial_derivative(state.u);
    const auto& w = cw.grid()->weights();
    double sum = 0;
    if (state.equation == Equation::NLS) {
        for (int j = 0; j < state.u.size(); ++j)
            sum += w[j] * cw.phi()[j] *
                   std::imag(state.u.values()[j] * std::conj(du.values()[j]));
        return 0.5 * sum;
    }
    if (!state.u_t) throw InvalidField("nlkg state without u_t");
    // -Re int u_t (h.grad(conj u) + q conj u): the sign and real part are
    // forced by q = div h / 2 (the |u_t|^2 corrections cancel only then),
    // so that dM/dt satisfies the same four-term display as the NLS case.
    for (int j = 0; j < state.u.size(); ++j) {
        const double q = 0.5 * (cw.dphi()[j] + cw.phi_over_r()[j]);
        const std::complex<double> inner =
            cw.phi()[j] * std::conj(du.values()[j]) + q * std::conj(state.u.values()[j]);
        sum -= w[j] * std::real(state.u_t->values()[j] * inner);
    }
    return sum;
}

MorawetzRhs morawetz_rhs(const EvolutionState& state, const CutoffWeights& cw,
                         const Nonlinearity& nl, bool nonlinear) {
    if (state.u.grid() != cw.grid())
        throw std::invalid_argument("cutoff weights built on a different grid");
    const RadialField du = radial_derivative(state.u);
    const auto& w = cw.grid()->weights();
    const auto& r = cw.grid()->nodes();
    MorawetzRhs rhs;
    for (int j = 0; j < state.u.size(); ++j) {
        const double usq = std::norm(state.u.values()[j]);
        const double dusq = std::norm(du.values()[j]);
        const double G = nonlinear ? eval_G(state.u.values()[j], nl) : 0.0;
        rhs.main += w[j] * cw.dphi()[j] * (dusq - G);
        rhs.dispersive += w[j] * (cw.d3phi()[j] + 2 / r[j] * cw.d2phi()[j]) * usq;
        rhs.exterior += w[j] * (cw.phi_over_r()[j] - cw.dphi()[j]) *
                        (-usq / (4 * r[j] * r[j]) - 0.5 * G);
    }
    rhs.dispersive *= -0.25;
    rhs.radial_null = 0.0;  // |grad u|^2 - |d_r u|^2 vanishes for radial u
    return rhs;
}

MorawetzReport identity_residual(const Trajectory& traj, const CutoffWeights& cw,
                                 double T1, double T2) {
    if (!(T1 < T2) || T1 < traj.initial().t - 1e-12 ||
        T2 > traj.final_state().t + 1e-12)
        throw std::invalid_argument("window [T1, T2] must lie inside the trajectory");
    std::vector<const EvolutionState*> win;
    for (const auto& s : traj.states)
        if (s.t >= T1 - 1e-12 && s.t <= T2 + 1e-12) win.push_back(&s);
    if (win.size() < 3)
        throw std::invalid_argument("identity_residual needs >= 3 snapshots in the window");

    MorawetzReport rep;
    rep.R = cw.R();
    std::vector<double> M(win.size());
    for (size_t i = 0; i < win.size(); ++i) M[i] = morawetz_quantity(*win[i], cw);
    for (size_t i = 1; i + 1 < win.size(); ++i) {
        MorawetzReport::Row row;
        row.t = win[i]->t;
        row.M = M[i];
        row.dMdt = (M[i + 1] - M[i - 1]) / (win[i + 1]->t - win[i - 1]->t);
        row.rhs = morawetz_rhs(*win[i], cw, traj.nl, traj.nonlinear).total();
        row.residual = std::abs(row.dMdt - row.rhs);
        rep.max_residual = std::max(rep.max_residual, row.residual);
        rep.max_abs_rhs = std::max(rep.max_abs_rhs, std::abs(row.rhs));
        rep.rows.push_back(row);
    }
    return rep;
}

void MorawetzReport::write_csv(const std::filesystem::path& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << "t,M,dMdt,rhs,residual\n";
    char buf[192];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g\n", r.t, r.M,
                      r.dMdt, r.rhs, r.residual);
        out << buf;
    }
}

std::string MorawetzReport::to_json() const {
    nlohmann::json j;
    j["r_cutoff"] = R;
    j["max_residual"] = max_residual;
    j["max_abs_rhs"] = max_abs_rhs;
    j["rows"] = rows.size();
    return j.dump(2);
}

double spacetime_G(const Trajectory& traj, double T1, double T2) {
    return series_integral(
        traj.monitor, T1, T2, [](const MonitorRow& r) { return r.g_abs_integral; },
        [](double) { return 1.0; });
}

double decay_exponent_gamma(const Nonlinearity& nl) {
    if (nl.kind == Nonlinearity::Kind::Power) return std::min(nl.p / 2, 2.0);
    return 2.0;
}

double decay_exponent_alpha(const Nonlinearity& nl, double delta) {
    if (nl.kind == Nonlinearity::Kind::Power)
        return std::max(2 / (2 + nl.p), 1.0 / 3) + delta;
    return 1.0 / 3 + delta;
}

VirialMorawetzAudit virial_morawetz_audit(const Trajectory& traj,
                                          const std::vector<double>& R_list,
                                          const std::vector<std::pair<double, double>>& windows,
                                          const Nonlinearity& nl,
                                          bool focusing_below_threshold) {
    if (nl.focusing() && !focusing_below_threshold)
        throw HypothesisViolation(
            "virial-Morawetz audit requires a defocusing run or a certified "
            "below-threshold focusing run");
    if (R_list.empty() || windows.empty())
        throw std::invalid_argument("empty R-list or window list");

    VirialMorawetzAudit audit;
    audit.gamma = decay_exponent_gamma(nl);
    double spread_max = 0, spread_min = 0;
    bool first = true;
    for (const auto& [T1, T2] : windows) {
        double window_best = 0;
        for (double R : R_list) {
            VirialMorawetzAudit::Cell cell;
            cell.R = R;
            cell.T1 = T1;
            cell.T2 = T2;
            cell.G = spacetime_G(traj, T1, T2);
            cell.bound = R + (T2 - T1) * std::pow(R, -audit.gamma);
            cell.ratio = cell.G / cell.bound;
            window_best = std::max(window_best, cell.ratio);
            audit.cells.push_back(cell);
        }
        audit.fitted_constant = std::max(audit.fitted_constant, window_best);
        if (first || window_best > spread_max) spread_max = window_best;
        if (first || window_best < spread_min) spread_min = window_best;
        first = false;
    }
    audit.window_spread = spread_min > 0 ? spread_max / spread_min
                                         : (spread_max > 0 ? HUGE_VAL : 1.0);
    audit.stable = audit.window_spread <= 2.0;
    return audit;
}

std::string VirialMorawetzAudit::to_json() const {
    nlohmann::json j;
    j["gamma"] = gamma;
    j["fitted_constant"] = fitted_constant;
    j["window_spread"] = window_spread;
    j["stable"] = stable;
    nlohmann::json cellsj = nlohmann::json::array();
    for (const auto& c : cells) {
        nlohmann::json cj;
        cj["r_cutoff"] = c.R;
        cj["t1"] = c.T1;
        cj["t2"] = c.T2;
        cj["spacetime_g"] = c.G;
        cj["bound"] = c.bound;
        cj["ratio"] = c.ratio;
        cellsj.push_back(cj);
    }
    j["cells"] = cellsj;
    return j.dump(2);
}

WeightedIntegral weighted_decay_integral(const Trajectory& traj, double T, double delta,
                                         const Nonlinearity& nl) {
    if (!(T >= 1) || !(delta > 0))
        throw std::invalid_argument("weighted decay integral needs T >= 1, delta > 0");
    WeightedIntegral wi;
    wi.exponent = decay_exponent_alpha(nl, delta);
    wi.horizon = traj.end_time();
    wi.value = series_integral(
        traj.monitor, T, wi.horizon,
        [](const MonitorRow& r) { return r.g_abs_integral; },
        [&wi](double t) { return std::pow(t, -wi.exponent); });
    wi.ratio = wi.value * std::pow(T, delta);
    return wi;
}

WeightedIntegral weighted_f_L1(const Trajectory& traj, double T, double delta,
                               const Nonlinearity& nl) {
    if (nl.kind != Nonlinearity::Kind::Exponential)
        throw std::invalid_argument("weighted_f_L1 applies to the exponential case only");
    if (!(T >= 1) || !(delta > 0))
        throw std::invalid_argument("weighted_f_L1 needs T >= 1, delta > 0");
    WeightedIntegral wi;
    wi.exponent = 0.5 + delta;
    wi.horizon = traj.end_time();
    wi.value = series_integral(
        traj.monitor, T, wi.horizon,
        [](const MonitorRow& r) { return r.f_abs_integral; },
        [&wi](double t) { return std::pow(t, -wi.exponent); });
    wi.ratio = wi.value * std::pow(T, delta);
    return wi;
}

std::optional<double> window_smallness_search(const Trajectory& traj, double eps,
                                              double T, double delta) {
    if (!(eps > 0) || !(T >= 1))
        throw std::invalid_argument("window search needs eps > 0, T >= 1");
    const double alpha = decay_exponent_alpha(traj.nl, delta);
    const double t_start = traj.monitor.front().t;
    for (const auto& row : traj.monitor) {
        const double T0 = row.t;
        if (T0 <= T) continue;
        const double width = 1 / (2 * alpha) * std::pow(T0, 1 - alpha);
        if (T0 - width < t_start) continue;
        if (spacetime_G(traj, T0 - width, T0) < eps) return T0;
    }
    return std::nullopt;
}

double exterior_g_gap(const RadialField& u, const CutoffWeights& cw,
                      const Nonlinearity& nl) {
    if (u.grid() != cw.grid())
        throw std::invalid_argument("cutoff weights built on a different grid");
    const auto& w = u.grid()->weights();
    double gap = 0;
    for (int j = 0; j < u.size(); ++j)
        gap += w[j] * (eval_G(u.values()[j], nl) -
                       eval_G(cw.chi()[j] * u.values()[j], nl));
    return std::abs(gap);
}

}  // namespace rnls
