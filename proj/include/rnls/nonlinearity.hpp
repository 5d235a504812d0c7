#pragma once

#include <complex>

#include "rnls/grid.hpp"

namespace rnls {

// The two nonlinearity families: f(u) = lambda |u|^p u (power, p > 2)
// and f(u) = lambda (e^{k0|u|^2} - 1 - k0|u|^2) u (exponential, k0 > 0).
// F is the antiderivative with F(0) = 0 and dF/d(conj u) = f;
// G(u) = Re(conj(u) f(u) - F(u)).
struct Nonlinearity {
    enum class Kind { Power, Exponential };

    Kind kind = Kind::Power;
    double p = 0;       // power exponent
    double kappa0 = 0;  // exponential rate
    int lambda = 1;     // +1 focusing, -1 defocusing

    static Nonlinearity power(double p, int lambda);
    static Nonlinearity exponential(double kappa0, int lambda);

    bool focusing() const { return lambda > 0; }
};

std::complex<double> eval_f(std::complex<double> z, const Nonlinearity& nl);
double eval_F(std::complex<double> z, const Nonlinearity& nl);
double eval_G(std::complex<double> z, const Nonlinearity& nl);

// f(u) = lambda * phase_rate(|u|^2) * u with a real rate; used by the
// exact nonlinear substep of the splitting integrator.
double phase_rate(double abs_sq, const Nonlinearity& nl);

// Exact flow of i du/dt = f(u): u -> exp(-i lambda g(|u|^2) dt) u.
// Preserves |u| node-wise.
RadialField nonlinear_phase_step(const RadialField& u, double dt, const Nonlinearity& nl);

}  // namespace rnls
