#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "rnls/evolve.hpp"
#include "rnls/functionals.hpp"
#include "rnls/grid.hpp"

namespace rnls {

// Cutoff virial weight phi(r) = int_0^r chi^2(s/R) ds built from the
// fixed C-infinity bump: chi = 1 on [0,1], exp(1 - 1/(1-(s-1)^2)) on
// (1,2), 0 beyond. All derivative combinations entering the d=2
// identity are tabulated on the grid.
class CutoffWeights {
public:
    static CutoffWeights build(double R, const GridPtr& grid);

    double R() const { return R_; }
    const GridPtr& grid() const { return grid_; }
    const Eigen::VectorXd& phi() const { return phi_; }
    const Eigen::VectorXd& dphi() const { return dphi_; }
    const Eigen::VectorXd& d2phi() const { return d2phi_; }
    const Eigen::VectorXd& d3phi() const { return d3phi_; }
    const Eigen::VectorXd& phi_over_r() const { return phi_over_r_; }

    // chi(r/R), the cutoff itself (for the exterior-term bound).
    const Eigen::VectorXd& chi() const { return chi_; }

private:
    double R_ = 0;
    GridPtr grid_;
    Eigen::VectorXd phi_, dphi_, d2phi_, d3phi_, phi_over_r_, chi_;
};

// M(t): NLS (1/2) Im int u phi d_r(conj u) dx;
// NLKG (1/2) Im int u_t (phi d_r(conj u) + q conj u) dx, q = (phi' + phi/r)/2.
double morawetz_quantity(const EvolutionState& state, const CutoffWeights& cw);

// The four-term d=2 display of dM/dt (the radial-null term is
// identically zero and returned as such).
struct MorawetzRhs {
    double main = 0;       // int phi' (|d_r u|^2 - G)
    double dispersive = 0; // -(1/4) int (phi''' + (2/r) phi'') |u|^2
    double radial_null = 0;
    double exterior = 0;   // int (phi/r - phi') (-|u|^2/(4 r^2) - G/2)
    double total() const { return main + dispersive + radial_null + exterior; }
};
MorawetzRhs morawetz_rhs(const EvolutionState& state, const CutoffWeights& cw,
                         const Nonlinearity& nl, bool nonlinear = true);

struct MorawetzReport {
    struct Row {
        double t = 0, M = 0, dMdt = 0, rhs = 0, residual = 0;
    };
    double R = 0;
    std::vector<Row> rows;
    double max_residual = 0;
    double max_abs_rhs = 0;

    void write_csv(const std::filesystem::path& path) const;
    std::string to_json() const;
};

// |centered-difference dM/dt - RHS| at each interior snapshot of the
// window [T1, T2].
MorawetzReport identity_residual(const Trajectory& traj, const CutoffWeights& cw,
                                 double T1, double T2);

// Trapezoid of the monitor's int |G| dx series over [T1, T2]
// (piecewise-linear in t, so exactly additive in the window).
double spacetime_G(const Trajectory& traj, double T1, double T2);

// gamma = min{p/2, 2} (power, d=2) or 2 (exponential).
double decay_exponent_gamma(const Nonlinearity& nl);
// alpha = max{2/(2+p), 1/3} + delta (power) or 1/3 + delta (exponential).
double decay_exponent_alpha(const Nonlinearity& nl, double delta);

struct VirialMorawetzAudit {
    struct Cell {
        double R = 0, T1 = 0, T2 = 0, G = 0, bound = 0, ratio = 0;
    };
    std::vector<Cell> cells;
    double gamma = 0;
    double fitted_constant = 0;   // max ratio over the grid
    double window_spread = 0;     // max over windows of per-window max / min
    bool stable = false;          // spread within a factor 2
    std::string to_json() const;
};

// C*(R, window) = spacetime_G / (R + (T2-T1) R^{-gamma}). Focusing runs
// must be vouched below threshold by the caller or the audit refuses.
VirialMorawetzAudit virial_morawetz_audit(const Trajectory& traj,
                                          const std::vector<double>& R_list,
                                          const std::vector<std::pair<double, double>>& windows,
                                          const Nonlinearity& nl,
                                          bool focusing_below_threshold = false);

struct WeightedIntegral {
    double value = 0;
    double exponent = 0;   // the t-weight exponent used
    double ratio = 0;      // value / T^{-delta}
    double horizon = 0;    // trajectory end (truncation point)
};

// int_T^end t^{-alpha} int|G| dx dt against T^{-delta}.
WeightedIntegral weighted_decay_integral(const Trajectory& traj, double T, double delta,
                                         const Nonlinearity& nl);

// int_T^end t^{-beta} int|f(u)| dx dt, beta = 1/2 + delta (exponential only).
WeightedIntegral weighted_f_L1(const Trajectory& traj, double T, double delta,
                               const Nonlinearity& nl);

// First T0 > T whose window [T0 - (1/(2 alpha)) T0^{1-alpha}, T0] has
// int int|G| below eps; nullopt when the trajectory ends first.
std::optional<double> window_smallness_search(const Trajectory& traj, double eps,
                                              double T, double delta = 0.05);

// |int G(u) - G(chi_R u) dx| (exterior-term bound probe).
double exterior_g_gap(const RadialField& u, const CutoffWeights& cw,
                      const Nonlinearity& nl);

}  // namespace rnls
