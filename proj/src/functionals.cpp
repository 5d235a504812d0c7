#include "rnls/functionals.hpp"

#include <json.hpp>

namespace rnls {

namespace {

// 2*pi int density(u_j) r dr for a pointwise real density of the field value.
double integrate_density(const RadialField& u,
                         const std::function<double(std::complex<double>)>& density) {
    const auto& w = u.grid()->weights();
    double sum = 0;
    for (int j = 0; j < u.size(); ++j) sum += w[j] * density(u.values()[j]);
    return sum;
}

}  // namespace

EvolutionState EvolutionState::nls(RadialField u, double t) {
    return EvolutionState{Equation::NLS, std::move(u), std::nullopt, t};
}

EvolutionState EvolutionState::nlkg(RadialField u, RadialField u_t, double t) {
    if (u.grid() != u_t.grid())
        throw InvalidField("nlkg state: u and u_t must share a grid");
    return EvolutionState{Equation::NLKG, std::move(u), std::move(u_t), t};
}

double mass(const EvolutionState& state) {
    return h1_norms(state.u).mass_sq;
}

double integral_F(const RadialField& u, const Nonlinearity& nl) {
    return integrate_density(u, [&](std::complex<double> z) { return eval_F(z, nl); });
}

double integral_G(const RadialField& u, const Nonlinearity& nl) {
    return integrate_density(u, [&](std::complex<double> z) { return eval_G(z, nl); });
}

double integral_abs_G(const RadialField& u, const Nonlinearity& nl) {
    return integrate_density(u,
                             [&](std::complex<double> z) { return std::abs(eval_G(z, nl)); });
}

double integral_abs_f(const RadialField& u, const Nonlinearity& nl) {
    return integrate_density(u,
                             [&](std::complex<double> z) { return std::abs(eval_f(z, nl)); });
}

double integral_re_uf(const RadialField& u, const Nonlinearity& nl) {
    return integrate_density(u, [&](std::complex<double> z) {
        return (std::conj(z) * eval_f(z, nl)).real();
    });
}

double lp_norm_pp(const RadialField& u, double p_plus_2) {
    return integrate_density(u, [&](std::complex<double> z) {
        return std::pow(std::abs(z), p_plus_2);
    });
}

double energy(const EvolutionState& state, const Nonlinearity& nl) {
    const H1Norms n = h1_norms(state.u);
    double e = 0.5 * n.grad_sq - 0.5 * integral_F(state.u, nl);
    if (state.equation == Equation::NLKG) {
        if (!state.u_t) throw InvalidField("nlkg state without u_t");
        e += 0.5 * n.mass_sq + 0.5 * h1_norms(*state.u_t).mass_sq;
    }
    return e;
}

double static_energy_J(const RadialField& u, double c, const Nonlinearity& nl) {
    if (c < 0) throw std::invalid_argument("static energy requires c >= 0");
    const H1Norms n = h1_norms(u);
    return 0.5 * n.grad_sq + 0.5 * c * n.mass_sq - 0.5 * integral_F(u, nl);
}

double functional_K(const RadialField& u, const ScalingPair& pair, double c,
                    const Nonlinearity& nl, bool quadratic_only) {
    if (!pair.admissible())
        throw std::invalid_argument("inadmissible scaling pair (a1, b1)");
    if (c < 0) throw std::invalid_argument("functional_K requires c >= 0");
    const H1Norms n = h1_norms(u);
    double k = pair.alpha1 * n.grad_sq + (pair.alpha1 + pair.beta1) * c * n.mass_sq;
    if (!quadratic_only)
        k -= pair.alpha1 * integral_re_uf(u, nl) + pair.beta1 * integral_F(u, nl);
    return k;
}

double virial_K(const RadialField& u, const Nonlinearity& nl) {
    return h1_norms(u).grad_sq - integral_G(u, nl);
}

FreeEnergySandwich free_energy_sandwich(const RadialField& u, const Nonlinearity& nl) {
    FreeEnergySandwich s;
    const H1Norms n = h1_norms(u);
    s.J = static_energy_J(u, 1.0, nl);
    s.half_h1 = 0.5 * (n.mass_sq + n.grad_sq);
    s.upper = 2.0 * s.J;
    s.holds = s.J <= s.half_h1 && s.half_h1 <= s.upper;
    return s;
}

FunctionalReport functional_report(const EvolutionState& state, const Nonlinearity& nl) {
    FunctionalReport r;
    const H1Norms n = h1_norms(state.u);
    r.mass = n.mass_sq;
    r.grad_sq = n.grad_sq;
    r.energy = energy(state, nl);
    r.J = static_energy_J(state.u, 1.0, nl);
    r.K_virial = virial_K(state.u, nl);
    r.G_integral = integral_G(state.u, nl);
    return r;
}

std::string FunctionalReport::to_json() const {
    nlohmann::json j;
    j["mass"] = mass;
    j["energy"] = energy;
    j["static_energy_j"] = J;
    j["virial_k"] = K_virial;
    j["grad_sq"] = grad_sq;
    j["g_integral"] = G_integral;
    return j.dump(2);
}

}  // namespace rnls
