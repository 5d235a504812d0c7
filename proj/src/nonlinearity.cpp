#include "rnls/nonlinearity.hpp"

#include <cmath>

namespace rnls {

namespace {

// Switch to truncated series below this x = kappa0 |u|^2 to avoid the
// e^x - 1 - x (and worse, e^x (x-1) + 1 - x^2/2) cancellation. At the
// switch the closed forms retain ~13 significant digits.
constexpr double kSeriesSwitch = 0.2;
constexpr double kOverflowX = 700.0;

void check_overflow(double x) {
    if (x > kOverflowX)
        throw AmplitudeOverflow("exponential nonlinearity overflow: kappa0*|u|^2 = " +
                                std::to_string(x));
}

// e^x - 1 - x = sum_{k>=2} x^k / k!
double expm1m(double x) {
    check_overflow(x);
    if (x == 0) return 0;
    if (x >= kSeriesSwitch) return std::expm1(x) - x;
    double term = x * x / 2, sum = term;
    for (int k = 3; ; ++k) {
        term *= x / k;
        sum += term;
        if (std::abs(term) <= 1e-16 * std::abs(sum)) break;  // <=: term may underflow to 0
    }
    return sum;
}

// e^x - 1 - x - x^2/2 = sum_{k>=3} x^k / k!
double expm1m2(double x) {
    check_overflow(x);
    if (x == 0) return 0;
    if (x >= kSeriesSwitch) return std::expm1(x) - x - x * x / 2;
    double term = x * x * x / 6, sum = term;
    for (int k = 4; ; ++k) {
        term *= x / k;
        sum += term;
        if (std::abs(term) <= 1e-16 * std::abs(sum)) break;  // <=: term may underflow to 0
    }
    return sum;
}

// e^x (x-1) + 1 - x^2/2 = sum_{k>=3} (k-1) x^k / k!.
// This is the G kernel; it matches Re(conj(u) f - F) identically.
double g_kernel(double x) {
    check_overflow(x);
    if (x == 0) return 0;
    if (x >= kSeriesSwitch) return std::exp(x) * (x - 1) + 1 - x * x / 2;
    double xk_over_fact = x * x * x / 6;  // x^k / k!
    double sum = 0;
    for (int k = 3; ; ++k) {
        const double term = (k - 1) * xk_over_fact;
        sum += term;
        if (std::abs(term) <= 1e-16 * std::abs(sum)) break;  // <=: term may underflow to 0
        xk_over_fact *= x / (k + 1);
    }
    return sum;
}

}  // namespace

Nonlinearity Nonlinearity::power(double p, int lambda) {
    if (!(p > 2)) throw std::invalid_argument("power nonlinearity requires p > 2");
    if (lambda != 1 && lambda != -1)
        throw std::invalid_argument("lambda must be +1 or -1");
    Nonlinearity nl;
    nl.kind = Kind::Power;
    nl.p = p;
    nl.lambda = lambda;
    return nl;
}

Nonlinearity Nonlinearity::exponential(double kappa0, int lambda) {
    if (!(kappa0 > 0)) throw std::invalid_argument("exponential nonlinearity requires kappa0 > 0");
    if (lambda != 1 && lambda != -1)
        throw std::invalid_argument("lambda must be +1 or -1");
    Nonlinearity nl;
    nl.kind = Kind::Exponential;
    nl.kappa0 = kappa0;
    nl.lambda = lambda;
    return nl;
}

double phase_rate(double abs_sq, const Nonlinearity& nl) {
    if (nl.kind == Nonlinearity::Kind::Power)
        return std::pow(abs_sq, nl.p / 2);
    return expm1m(nl.kappa0 * abs_sq);
}

std::complex<double> eval_f(std::complex<double> z, const Nonlinearity& nl) {
    return static_cast<double>(nl.lambda) * phase_rate(std::norm(z), nl) * z;
}

double eval_F(std::complex<double> z, const Nonlinearity& nl) {
    const double s = std::norm(z);
    if (nl.kind == Nonlinearity::Kind::Power)
        return 2.0 * nl.lambda / (nl.p + 2) * std::pow(s, (nl.p + 2) / 2);
    return nl.lambda / nl.kappa0 * expm1m2(nl.kappa0 * s);
}

double eval_G(std::complex<double> z, const Nonlinearity& nl) {
    const double s = std::norm(z);
    if (nl.kind == Nonlinearity::Kind::Power)
        return nl.lambda * nl.p / (nl.p + 2) * std::pow(s, (nl.p + 2) / 2);
    return nl.lambda / nl.kappa0 * g_kernel(nl.kappa0 * s);
}

RadialField nonlinear_phase_step(const RadialField& u, double dt, const Nonlinearity& nl) {
    Eigen::VectorXcd out(u.size());
    for (int j = 0; j < u.size(); ++j) {
        const std::complex<double> z = u.values()[j];
        const double theta = -nl.lambda * phase_rate(std::norm(z), nl) * dt;
        out[j] = std::polar(1.0, theta) * z;
    }
    return RadialField(u.grid(), std::move(out));
}

}  // namespace rnls
