#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "rnls/nonlinearity.hpp"

using namespace rnls;
using std::complex;

TEST_CASE("pointwise values match closed forms") {
    const auto p4 = Nonlinearity::power(4, 1);
    const auto e1 = Nonlinearity::exponential(1, -1);

    CHECK(eval_f(2.0, p4) == complex<double>(32, 0));
    CHECK(eval_f(1.0, e1).real() == doctest::Approx(-(std::exp(1.0) - 2)).epsilon(1e-14));
    CHECK(eval_f(0.0, p4) == complex<double>(0, 0));
    CHECK(eval_f(0.0, e1) == complex<double>(0, 0));

    CHECK(eval_F(1.0, Nonlinearity::power(4, -1)) == doctest::Approx(-1.0 / 3).epsilon(1e-14));
    CHECK(eval_F(1.0, Nonlinearity::exponential(1, 1)) ==
          doctest::Approx(std::exp(1.0) - 2.5).epsilon(1e-14));
    CHECK(eval_F(0.0, p4) == 0);

    CHECK(eval_G(1.0, p4) == doctest::Approx(2.0 / 3).epsilon(1e-14));
    CHECK(eval_G(1.0, Nonlinearity::exponential(1, 1)) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(eval_G(0.0, e1) == 0);
}

TEST_CASE("G = Re(conj(u) f - F) pointwise") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> mag(0, 2.5), ang(0, 6.28);
    for (const auto& nl : {Nonlinearity::power(3.3, 1), Nonlinearity::power(5, -1),
                           Nonlinearity::exponential(0.7, 1), Nonlinearity::exponential(2, -1)}) {
        for (int i = 0; i < 200; ++i) {
            const complex<double> z = std::polar(mag(rng), ang(rng));
            const double direct = (std::conj(z) * eval_f(z, nl)).real() - eval_F(z, nl);
            const double g = eval_G(z, nl);
            CHECK(std::abs(g - direct) <= 1e-12 * std::max(1.0, std::abs(g)));
            if (std::abs(z) > 1e-12) CHECK(g * nl.lambda > 0);  // sign(G) = lambda
        }
    }
}

TEST_CASE("dF/d(conj u) reconstructs f by finite differences") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> mag(0.1, 2.0), ang(0, 6.28);
    for (const auto& nl : {Nonlinearity::power(4, 1), Nonlinearity::exponential(1, -1)}) {
        for (int i = 0; i < 20; ++i) {
            const complex<double> z = std::polar(mag(rng), ang(rng));
            const double eps = 1e-5;
            // F(z) = F(|z|): d/d(conj u) F = f means
            // f(z) = (dF/dRe - i dF/dIm)(z) (Wirtinger, F real)
            const double fr =
                (eval_F(z + eps, nl) - eval_F(z - eps, nl)) / (2 * eps);
            const double fi = (eval_F(z + complex<double>(0, eps), nl) -
                               eval_F(z - complex<double>(0, eps), nl)) /
                              (2 * eps);
            // Wirtinger: f = dF/d(conj u) = (F_x + i F_y) / 2 for real F
            const complex<double> fd = complex<double>(fr, fi) / 2.0;
            CHECK(std::abs(fd - eval_f(z, nl)) < 1e-7 * std::max(1.0, std::abs(eval_f(z, nl))));
        }
    }
}

TEST_CASE("exponential series and closed form agree at the switch") {
    // the series branch runs for kappa0 |z|^2 < 0.2
    const auto nl = Nonlinearity::exponential(1, 1);
    // long-double series references, exact on both sides of the switch
    auto series = [](long double x, int k0, auto coeff) {
        long double sum = 0, xk = 1;
        for (int k = 1; k < k0; ++k) xk *= x;
        for (int k = k0; k < 40; ++k) {
            xk *= x;
            sum += coeff(k) * xk;
        }
        return static_cast<double>(sum);
    };
    auto fact = [](int k) {
        long double f = 1;
        for (int i = 2; i <= k; ++i) f *= i;
        return f;
    };
    for (double x : {0.199, 0.201}) {
        const double z = std::sqrt(x);
        const double f_ref = series(x, 2, [&](int k) { return 1.0L / fact(k); }) * z;
        CHECK(eval_f(z, nl).real() == doctest::Approx(f_ref).epsilon(1e-12));
        const double F_ref = series(x, 3, [&](int k) { return 1.0L / fact(k); });
        CHECK(eval_F(z, nl) == doctest::Approx(F_ref).epsilon(1e-12));
        // e^x (x-1) + 1 - x^2/2 = sum_{k>=3} (k-1) x^k / k!
        const double G_ref = series(x, 3, [&](int k) { return (k - 1.0L) / fact(k); });
        CHECK(eval_G(z, nl) == doctest::Approx(G_ref).epsilon(1e-12));
    }
    // denormal arguments terminate (series break is <=, not <)
    CHECK(eval_F(1e-200, nl) == 0.0);
}

TEST_CASE("exponential overflow guard") {
    const auto nl = Nonlinearity::exponential(1, 1);
    CHECK_THROWS_AS(eval_f(27.0, nl), AmplitudeOverflow);  // |z|^2 = 729 > 700
}

TEST_CASE("nonlinear phase step") {
    auto g = make_grid(10, 64, GridKind::GaussBessel);
    const auto nl = Nonlinearity::power(4, 1);

    RadialField ones = RadialField::from_real_function(g, [](double) { return 1.0; });
    SUBCASE("dt = 0 is the identity") {
        RadialField out = nonlinear_phase_step(ones, 0, nl);
        for (int j = 0; j < out.size(); ++j) CHECK(out.values()[j] == ones.values()[j]);
    }
    SUBCASE("u = 1, dt = pi gives -1 (phase rate g(1) = 1 for power)") {
        RadialField out = nonlinear_phase_step(ones, std::numbers::pi, nl);
        for (int j = 0; j < out.size(); j += 11)
            CHECK(std::abs(out.values()[j] - complex<double>(-1, 0)) < 1e-14);
    }
    SUBCASE("modulus preserved node-wise") {
        std::mt19937 rng(3);
        std::uniform_real_distribution<double> d(-1, 1);
        Eigen::VectorXcd v(g->n());
        for (int j = 0; j < g->n(); ++j) v[j] = complex<double>(d(rng), d(rng));
        RadialField u(g, std::move(v));
        RadialField out = nonlinear_phase_step(u, 0.37, Nonlinearity::exponential(1.5, -1));
        for (int j = 0; j < u.size(); ++j)
            CHECK(std::abs(out.values()[j]) == doctest::Approx(std::abs(u.values()[j])));
    }
}

TEST_CASE("nonlinearity constructors validate") {
    CHECK_THROWS_AS(Nonlinearity::power(2, 1), std::invalid_argument);
    CHECK_THROWS_AS(Nonlinearity::exponential(0, 1), std::invalid_argument);
    CHECK_THROWS_AS(Nonlinearity::power(3, 2), std::invalid_argument);
}
