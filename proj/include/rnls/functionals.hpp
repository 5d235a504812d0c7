#pragma once

#include <optional>
#include <string>

#include "rnls/grid.hpp"
#include "rnls/nonlinearity.hpp"

namespace rnls {

enum class Equation { NLS, NLKG };

// Scaling-pair parameters of the K functionals. Admissibility is the
// d=2 specialization: a1 >= 0, a1 + b1 >= 0, (a1, b1) != (0, 0).
struct ScalingPair {
    double alpha1 = 0;
    double beta1 = 0;
    bool admissible() const {
        return alpha1 >= 0 && alpha1 + beta1 >= 0 && !(alpha1 == 0 && beta1 == 0);
    }
};

struct EvolutionState {
    Equation equation;
    RadialField u;
    std::optional<RadialField> u_t;  // NLKG only
    double t = 0;

    static EvolutionState nls(RadialField u, double t = 0);
    static EvolutionState nlkg(RadialField u, RadialField u_t, double t = 0);
};

double mass(const EvolutionState& state);

// E_S = int 1/2|grad u|^2 - 1/2 F(u); E_K adds 1/2|u|^2 + 1/2|u_t|^2.
double energy(const EvolutionState& state, const Nonlinearity& nl);

// J^(c)(u) = 1/2 int |grad u|^2 + c/2 int |u|^2 - 1/2 int F(u).
double static_energy_J(const RadialField& u, double c, const Nonlinearity& nl);

// K_{a1,b1}^(c) at d=2:
//   a1 int|grad u|^2 + (a1+b1) c int|u|^2
//   - 1/2 int (2 a1 Re(conj(u) f(u)) + 2 b1 F(u)).
// quadratic_only drops the nonlinear term (the K^Q companion).
double functional_K(const RadialField& u, const ScalingPair& pair, double c,
                    const Nonlinearity& nl, bool quadratic_only = false);

// Virial functional K_{1,-1} at d=2: int|grad u|^2 - int G(u).
double virial_K(const RadialField& u, const Nonlinearity& nl);

struct FreeEnergySandwich {
    double J = 0;
    double half_h1 = 0;
    double upper = 0;  // 2 J at d=2
    bool holds = false;
};
// Advisory membership probe: J <= 1/2 ||u||_H1^2 <= 2 J.
FreeEnergySandwich free_energy_sandwich(const RadialField& u, const Nonlinearity& nl);

struct FunctionalReport {
    double mass = 0;
    double energy = 0;
    double J = 0;
    double K_virial = 0;
    double grad_sq = 0;
    double G_integral = 0;

    std::string to_json() const;  // flat object, snake_case keys
};

FunctionalReport functional_report(const EvolutionState& state, const Nonlinearity& nl);

// Pointwise densities integrated over R^2.
double integral_F(const RadialField& u, const Nonlinearity& nl);
double integral_G(const RadialField& u, const Nonlinearity& nl);
double integral_abs_G(const RadialField& u, const Nonlinearity& nl);
double integral_abs_f(const RadialField& u, const Nonlinearity& nl);
double integral_re_uf(const RadialField& u, const Nonlinearity& nl);
double lp_norm_pp(const RadialField& u, double p_plus_2);  // int |u|^{p+2}

}  // namespace rnls
