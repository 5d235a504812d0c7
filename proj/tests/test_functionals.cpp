#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "rnls/functionals.hpp"

using namespace rnls;

namespace {
constexpr double kPi = std::numbers::pi;

GridPtr grid() { return make_grid(15, 384, GridKind::GaussBessel); }

RadialField unit_gaussian() {
    return RadialField::from_real_function(grid(), [](double r) { return std::exp(-r * r); });
}
}  // namespace

TEST_CASE("mass and energy on the unit Gaussian") {
    const auto nl = Nonlinearity::power(4, -1);
    EvolutionState s = EvolutionState::nls(unit_gaussian());
    CHECK(mass(s) == doctest::Approx(kPi / 2).epsilon(1e-9));
    // E_S = 1/2 pi - 1/2 * (2 lambda / 6) * pi/6 = pi/2 + pi/36
    CHECK(energy(s, nl) == doctest::Approx(kPi / 2 + kPi / 36).epsilon(1e-9));

    EvolutionState z = EvolutionState::nls(RadialField(grid()));
    CHECK(energy(z, nl) == 0);

    // NLKG with u = 0 and u_t a Gaussian: E_K = 1/2 mass(u_t)
    EvolutionState kg = EvolutionState::nlkg(RadialField(grid()), unit_gaussian());
    CHECK(energy(kg, nl) == doctest::Approx(kPi / 4).epsilon(1e-9));
}

TEST_CASE("static energy J") {
    const auto nl = Nonlinearity::power(4, 1);
    RadialField u = unit_gaussian();
    CHECK(static_energy_J(u, 1, nl) ==
          doctest::Approx(kPi / 2 + kPi / 4 - kPi / 36).epsilon(1e-9));
    CHECK(static_energy_J(u, 0, nl) ==
          doctest::Approx(static_energy_J(u, 1, nl) - kPi / 4).epsilon(1e-12));
    CHECK_THROWS_AS(static_energy_J(u, -1, nl), std::invalid_argument);
}

TEST_CASE("scaling-pair admissibility") {
    CHECK(ScalingPair{1, -1}.admissible());
    CHECK(ScalingPair{0, 1}.admissible());
    CHECK(ScalingPair{2, 0.5}.admissible());
    CHECK_FALSE(ScalingPair{0, -1}.admissible());   // 2 a1 + 2 b1 < 0
    CHECK_FALSE(ScalingPair{-1, 2}.admissible());   // a1 < 0
    CHECK_FALSE(ScalingPair{0, 0}.admissible());
}

TEST_CASE("functional K") {
    const auto nl = Nonlinearity::power(4, 1);
    RadialField u = unit_gaussian();

    // pair (0,1): mass - int F = pi/2 - pi/18 = 4 pi / 9
    CHECK(functional_K(u, {0, 1}, 1, nl) == doctest::Approx(4 * kPi / 9).epsilon(1e-9));
    CHECK(functional_K(RadialField(grid()), {0, 1}, 1, nl) == 0);
    CHECK_THROWS_AS(functional_K(u, {0, -1}, 1, nl), std::invalid_argument);

    SUBCASE("virial pair is c-independent") {
        for (double c : {0.0, 0.5, 3.0})
            CHECK(functional_K(u, {1, -1}, c, nl) ==
                  doctest::Approx(virial_K(u, nl)).epsilon(1e-12));
    }

    SUBCASE("virial value on the Gaussian") {
        CHECK(virial_K(u, nl) == doctest::Approx(kPi - kPi / 9).epsilon(1e-9));
    }

    SUBCASE("K is the scaling derivative of J") {
        // K_{a1,b1}(u) = d/ds J^(c)(e^{a1 s} u(e^{-b1 s} r)) at s = 0
        std::mt19937 rng(5);
        std::uniform_real_distribution<double> d(0.3, 1.5);
        const double c = 1.0;
        for (const ScalingPair pair : {ScalingPair{1, -1}, ScalingPair{0, 1}, ScalingPair{1, 0.5}}) {
            const double A = d(rng), m = d(rng);
            auto scaled = [&](double s) {
                const double amp = A * std::exp(pair.alpha1 * s);
                const double rate = std::exp(-pair.beta1 * s);
                return static_energy_J(
                    RadialField::from_real_function(
                        grid(), [&](double r) { return amp * std::exp(-m * rate * rate * r * r); }),
                    c, nl);
            };
            const double eps = 1e-5;
            const double fd = (scaled(eps) - scaled(-eps)) / (2 * eps);
            RadialField u0 = RadialField::from_real_function(
                grid(), [&](double r) { return A * std::exp(-m * r * r); });
            CHECK(functional_K(u0, pair, c, nl) == doctest::Approx(fd).epsilon(1e-7));
        }
    }
}

TEST_CASE("free energy sandwich") {
    const auto focusing = Nonlinearity::power(4, 1);
    const auto defocusing = Nonlinearity::power(4, -1);

    auto z = free_energy_sandwich(RadialField(grid()), focusing);
    CHECK(z.holds);
    CHECK(z.J == 0);

    // small data: J ~ 1/2 ||u||_H1^2, comfortably inside the sandwich
    RadialField small(grid(), (0.05 * unit_gaussian().values()).eval());
    CHECK(free_energy_sandwich(small, focusing).holds);

    // defocusing: J >= 1/2 ||u||_H1^2, the left inequality flips
    auto s = free_energy_sandwich(unit_gaussian(), defocusing);
    CHECK(s.J >= s.half_h1);
}

TEST_CASE("functional report serializes to flat JSON") {
    const auto nl = Nonlinearity::power(4, -1);
    auto rep = functional_report(EvolutionState::nls(unit_gaussian()), nl);
    const std::string j = rep.to_json();
    for (const char* key : {"\"mass\"", "\"energy\"", "\"static_energy_j\"", "\"virial_k\"",
                            "\"grad_sq\"", "\"g_integral\""})
        CHECK(j.find(key) != std::string::npos);
    CHECK(rep.mass == doctest::Approx(kPi / 2).epsilon(1e-9));
}

TEST_CASE("nlkg states require a matching grid for u_t") {
    auto other = make_grid(15, 256, GridKind::GaussBessel);
    CHECK_THROWS_AS(EvolutionState::nlkg(unit_gaussian(), RadialField(other)), InvalidField);
}
