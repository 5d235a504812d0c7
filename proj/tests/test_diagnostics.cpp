#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "helpers.hpp"
#include "rnls/diagnostics.hpp"
#include "rnls/field_io.hpp"

using namespace rnls;
using rnls::testing::cached_power_Q;

namespace {
constexpr double kPi = std::numbers::pi;

GridPtr grid() { return make_grid(30, 384, GridKind::GaussBessel); }

RadialField gaussian(const GridPtr& g, double A = 1, double mu = 1) {
    return RadialField::from_real_function(
        g, [=](double r) { return A * std::exp(-mu * r * r); });
}
}  // namespace

TEST_CASE("classification of initial data") {
    SUBCASE("defocusing is always global") {
        auto v = classify_initial_data(EvolutionState::nls(gaussian(grid(), 3)),
                                       Nonlinearity::power(4, -1));
        CHECK(v.regime == Regime::DefocusingGlobal);
        CHECK(regime_name(v.regime) == "defocusing-global");
    }

    SUBCASE("small focusing data sits below threshold with K > 0") {
        const GroundState& Q = cached_power_Q(4);
        RadialField u03 = Q.on_grid(Q.grid());
        RadialField scaled(Q.grid(), (0.3 * u03.values()).eval());
        auto v = classify_initial_data(EvolutionState::nls(scaled),
                                       Nonlinearity::power(4, 1), &Q);
        CHECK(v.regime == Regime::FocusingBelowThresholdKPositive);
        CHECK(v.J < v.m);
        CHECK(v.K > 0);
        CHECK(v.energy_gap == doctest::Approx(v.m - v.J));
        CHECK(v.norm_product_below);
        CHECK(v.k_positive);
        CHECK(v.tests_agree);
        const std::string j = v.to_json();
        CHECK(j.find("focusing-below-threshold-K-positive") != std::string::npos);
    }

    SUBCASE("focusing without a ground state is refused") {
        CHECK_THROWS_AS(classify_initial_data(EvolutionState::nls(gaussian(grid())),
                                              Nonlinearity::power(4, 1)),
                        MissingGroundState);
    }

    SUBCASE("exponential defocusing splits at J = 2 pi / kappa0") {
        const auto nl = Nonlinearity::exponential(1, -1);
        auto small = classify_initial_data(EvolutionState::nls(gaussian(grid(), 0.5)), nl);
        CHECK(small.regime == Regime::ExponentialSubcritical);
        CHECK(small.m == doctest::Approx(2 * kPi));

        // push J above 2 pi by inflating the amplitude
        double A = 1.0;
        ClassificationVerdict big;
        for (; A < 64; A *= 2) {
            big = classify_initial_data(EvolutionState::nls(gaussian(grid(), A)), nl);
            if (big.J > 2 * kPi) break;
        }
        CHECK(big.J > 2 * kPi);
        CHECK(big.regime == Regime::ExponentialSupercriticalUnknown);
    }
}

TEST_CASE("scattering Cauchy surrogate") {
    EvolveConfig cfg;
    cfg.dt = 5e-3;
    cfg.monitor_stride = 4;
    cfg.snapshot_stride = 20;  // snapshot every 0.1
    cfg.nonlinear = false;
    const auto nl = Nonlinearity::power(4, -1);
    auto g = make_grid(100, 256, GridKind::GaussBessel);
    Trajectory lin = evolve(EvolutionState::nls(gaussian(g)), nl, 4.0, cfg);

    SUBCASE("linear flow has an exactly convergent profile") {
        CauchyReport rep = scattering_profile_cauchy(lin, {1.0, 2.0});
        REQUIRE(rep.entries.size() == 2);
        for (const auto& e : rep.entries) {
            CHECK(e.pairs > 0);
            CHECK(e.delta < 1e-10);  // S(-t)u(t) is constant in t
        }
        const std::string j = rep.to_json();
        CHECK(j.find("windows") != std::string::npos);
    }

    SUBCASE("horizons beyond the run are refused") {
        CHECK_THROWS_AS(scattering_profile_cauchy(lin, {3.0}), std::invalid_argument);
        CHECK_THROWS_AS(scattering_profile_cauchy(lin, {}), std::invalid_argument);
    }

    SUBCASE("zero data gives zero deltas") {
        Trajectory z = evolve(EvolutionState::nls(RadialField(g)), nl, 4.0, cfg);
        CauchyReport rep = scattering_profile_cauchy(z, {1.0});
        CHECK(rep.entries.front().delta == 0.0);
    }
}

TEST_CASE("sharp Gagliardo-Nirenberg audit") {
    const GroundState& Q = cached_power_Q(4);

    SUBCASE("the ground state itself saturates the inequality") {
        auto rep = gn_audit({Q.on_grid(Q.grid())}, 4, Q);
        REQUIRE(rep.entries.size() == 1);
        CHECK(rep.entries[0].ratio == doctest::Approx(1.0).epsilon(1e-5));
    }

    SUBCASE("the ratio is scale and amplitude invariant") {
        auto g = grid();
        RadialField u = gaussian(g);
        RadialField v = gaussian(g, 2.7, 0.25);  // u rescaled in amplitude and width
        auto rep = gn_audit({u, v}, 4, Q);
        CHECK(rep.entries[0].ratio == doctest::Approx(rep.entries[1].ratio).epsilon(1e-10));
    }

    SUBCASE("random fields stay strictly below the sharp constant") {
        auto family = random_field_family(grid(), 40, 11);
        auto rep = gn_audit(family, 4, Q);
        CHECK(rep.evaluated > 0);
        CHECK(rep.max_ratio < 1.0);
        CHECK(rep.max_ratio > 0.1);  // the family is not degenerate
    }

    SUBCASE("zero fields are skipped, not evaluated") {
        auto rep = gn_audit({RadialField(grid())}, 4, Q);
        CHECK(rep.skipped == 1);
        CHECK(rep.evaluated == 0);
    }
}

TEST_CASE("Trudinger-Moser audit") {
    auto g = grid();

    SUBCASE("Gaussian oracle at a = 1") {
        // int (e^{|phi|^2} - 1) dx for phi = e^{-r^2}: pi sum 1/(k k!) = 2.07023...
        // RHS = (pi/2) / (4 pi - pi) = 1/6.
        const double ratio = tm_ratio(gaussian(g), 1.0);
        const double lhs_ref = 2.070232;
        CHECK(ratio == doctest::Approx(lhs_ref / (1.0 / 6)).epsilon(1e-4));
    }

    SUBCASE("gradient constraint is enforced") {
        // ||grad phi||^2 = pi A^2 for the unit-width Gaussian; A = 2.1 exceeds 4 pi.
        CHECK_THROWS_AS(tm_ratio(gaussian(g, 2.1), 1.0), HypothesisViolation);
        // a = 2 halves the admissible budget: A = 1.5 already violates it.
        CHECK_THROWS_AS(tm_ratio(gaussian(g, 1.5), 2.0), HypothesisViolation);
    }

    SUBCASE("audit rejects constraint violators instead of throwing") {
        auto rep = tm_audit({gaussian(g), gaussian(g, 2.1), RadialField(g)}, 1.0);
        CHECK(rep.evaluated == 1);
        CHECK(rep.rejected == 1);
        CHECK(rep.skipped == 1);
        CHECK(rep.max_ratio > 0);
    }

    SUBCASE("the built-in family is admissible and bounded") {
        for (double a : {1.0, 2.0}) {
            auto family = tm_test_family(g, 20, a);
            CHECK(family.size() == 20);
            auto rep = tm_audit(family, a);
            CHECK(rep.evaluated == 20);
            CHECK(rep.rejected == 0);
            CHECK(std::isfinite(rep.max_ratio));
            CHECK(rep.max_ratio > 0);
        }
    }
}

TEST_CASE("radial Sobolev audit") {
    auto rep = radial_sobolev_audit(random_field_family(grid(), 20, 7));
    CHECK(rep.evaluated == 20);
    CHECK(rep.max_ratio > 0);
    // the radial L-infinity bound: |u| r^{1/2} <= C ||u||^{1/2} ||grad u||^{1/2}
    CHECK(rep.max_ratio < 2.0);
}

TEST_CASE("random families") {
    auto g = grid();

    SUBCASE("seeded generation is reproducible") {
        auto a = random_field_family(g, 5, 42);
        auto b = random_field_family(g, 5, 42);
        REQUIRE(a.size() == 5);
        for (int i = 0; i < 5; ++i)
            CHECK((a[i].values() - b[i].values()).norm() == 0.0);
        auto c = random_field_family(g, 5, 43);
        CHECK((a[0].values() - c[0].values()).norm() > 0);
    }

    SUBCASE("below-threshold family classifies below threshold") {
        const GroundState& Q = cached_power_Q(4);
        const auto nl = Nonlinearity::power(4, 1);
        auto family = random_below_threshold_family(g, 10, 3, nl, Q);
        const double m = threshold_m(Q);
        for (const auto& u : family) CHECK(static_energy_J(u, 1, nl) < m);
    }
}

TEST_CASE("field families load from disk") {
    const auto dir = std::filesystem::temp_directory_path() / "rnls-family-load";
    std::filesystem::create_directories(dir);
    auto g = grid();
    save_field(dir / "a.field", gaussian(g, 1));
    save_field(dir / "b.field", gaussian(g, 2));
    std::ofstream(dir / "meta.json") << "{}\n";

    auto family = load_field_family(dir);
    REQUIRE(family.size() == 2);  // the .json sidecar is skipped
    CHECK(sup_norm(family[0]) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(sup_norm(family[1]) == doctest::Approx(2.0).epsilon(1e-12));
    std::filesystem::remove_all(dir);
}
