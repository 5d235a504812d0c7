#include <doctest.h>

#include <boost/math/special_functions/bessel.hpp>
#include <cmath>
#include <limits>
#include <numbers>

#include "rnls/grid.hpp"

using namespace rnls;

namespace {
constexpr double kPi = std::numbers::pi;

RadialField gaussian(const GridPtr& g, double mu) {
    return RadialField::from_real_function(g, [mu](double r) { return std::exp(-mu * r * r); });
}
}  // namespace

TEST_CASE("grid construction and preconditions") {
    CHECK_THROWS_AS(make_grid(-1, 64, GridKind::UniformTrapezoid), std::invalid_argument);
    CHECK_THROWS_AS(make_grid(1, 8, GridKind::GaussBessel), std::invalid_argument);

    // uniform weights recover the disk area
    auto uni = make_grid(1, 1000, GridKind::UniformTrapezoid);
    CHECK(std::abs(uni->weights().sum() - kPi) < 1e-6);

    // factory cache returns the identical object
    CHECK(make_grid(10, 64, GridKind::GaussBessel).get() ==
          make_grid(10, 64, GridKind::GaussBessel).get());
}

TEST_CASE("quadrature on Gaussians") {
    auto g = make_grid(10, 512, GridKind::GaussBessel);
    CHECK(std::abs(integrate(gaussian(g, 2)) - kPi / 2) < 1e-10);
    CHECK(std::abs(integrate(gaussian(g, 6)) - kPi / 6) < 1e-10);

    auto uni = make_grid(10, 4000, GridKind::UniformTrapezoid);
    CHECK(std::abs(integrate(gaussian(uni, 2)) - kPi / 2) < 1e-5);
}

TEST_CASE("h1 norms of the unit Gaussian") {
    auto g = make_grid(15, 384, GridKind::GaussBessel);
    auto n = h1_norms(gaussian(g, 1));
    CHECK(n.mass_sq == doctest::Approx(kPi / 2).epsilon(1e-9));
    CHECK(n.grad_sq == doctest::Approx(kPi).epsilon(1e-9));

    auto n2 = h1_norms(RadialField(g, (2 * gaussian(g, 1).values()).eval()));
    CHECK(n2.mass_sq == doctest::Approx(2 * kPi).epsilon(1e-9));
    CHECK(n2.grad_sq == doctest::Approx(4 * kPi).epsilon(1e-9));

    CHECK(h1_norms(RadialField(g)).mass_sq == 0);
}

TEST_CASE("laplacian") {
    auto g = make_grid(15, 384, GridKind::GaussBessel);
    RadialField u = gaussian(g, 1);
    RadialField lu = laplacian(u);
    for (int j = 0; j < u.size(); j += 37) {
        const double r = g->nodes()[j];
        const double expect = (4 * r * r - 4) * std::exp(-r * r);
        CHECK(std::abs(lu.values()[j].real() - expect) < 1e-7);
    }

    // Bessel eigenfunction: -Delta J0(kr) = k^2 J0(kr)
    const double k = g->wavenumbers()[5];
    RadialField j0 = RadialField::from_real_function(
        g, [k](double r) { return boost::math::cyl_bessel_j(0, k * r); });
    RadialField lj0 = laplacian(j0);
    for (int j = 0; j < 40; j += 7)
        CHECK(lj0.values()[j].real() ==
              doctest::Approx(-k * k * j0.values()[j].real()).epsilon(1e-8));
}

TEST_CASE("integration by parts") {
    auto g = make_grid(15, 384, GridKind::GaussBessel);
    RadialField u = gaussian(g, 1), v = gaussian(g, 2);
    RadialField lu = laplacian(u), du = radial_derivative(u), dv = radial_derivative(v);
    double lhs = 0, rhs = 0;
    for (int j = 0; j < u.size(); ++j) {
        lhs += g->weights()[j] * (lu.values()[j] * std::conj(v.values()[j])).real();
        rhs -= g->weights()[j] * (du.values()[j] * std::conj(dv.values()[j])).real();
    }
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-8));
}

TEST_CASE("hankel transform") {
    auto g = make_grid(20, 256, GridKind::GaussBessel);

    SUBCASE("round trip") {
        RadialField u = gaussian(g, 1);
        RadialField back = hankel_transform(hankel_transform(u, HankelDirection::Forward),
                                            HankelDirection::Inverse);
        double err = 0;
        for (int j = 0; j < u.size(); ++j)
            err = std::max(err, std::abs(back.values()[j] - u.values()[j]));
        CHECK(err < 1e-10);
    }

    SUBCASE("Gaussian self-transform") {
        // forward(e^{-r^2/2}) = 2 pi e^{-k^2/2}
        RadialField u = gaussian(g, 0.5);
        RadialField uh = hankel_transform(u, HankelDirection::Forward);
        const auto& k = uh.grid()->nodes();
        for (int m = 0; m < 60; m += 9)
            CHECK(uh.values()[m].real() ==
                  doctest::Approx(2 * kPi * std::exp(-k[m] * k[m] / 2)).epsilon(1e-8));
    }

    SUBCASE("round trip stays at round-off for every size") {
        // the transform matrix is an exact involution by construction
        for (int n : {64, 128, 256, 768}) {
            auto gn = make_grid(20, n, GridKind::GaussBessel);
            RadialField u = gaussian(gn, 1);
            RadialField back = hankel_transform(
                hankel_transform(u, HankelDirection::Forward), HankelDirection::Inverse);
            double err = 0;
            for (int j = 0; j < u.size(); ++j)
                err = std::max(err, std::abs(back.values()[j] - u.values()[j]));
            CHECK(err < 1e-12);
        }
    }

    SUBCASE("uniform grid unsupported") {
        auto uni = make_grid(20, 256, GridKind::UniformTrapezoid);
        CHECK_THROWS_AS(hankel_transform(gaussian(uni, 1), HankelDirection::Forward),
                        UnsupportedGrid);
    }
}

TEST_CASE("field utilities") {
    auto g = make_grid(20, 256, GridKind::GaussBessel);
    RadialField u = gaussian(g, 1);

    CHECK(std::abs(value_at_origin(u) - 1.0) < 1e-6);
    CHECK(sup_norm(u) == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(boundary_mass_fraction(u, 0.9) < 1e-12);

    // resample onto a finer grid
    auto g2 = make_grid(20, 384, GridKind::GaussBessel);
    RadialField r = resample(u, g2);
    for (int j = 0; j < 100; j += 13) {
        const double x = g2->nodes()[j];
        CHECK(std::abs(r.values()[j].real() - std::exp(-x * x)) < 1e-8);
    }

    RadialField bad = u;
    bad.values()[3] = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(bad.check_finite(), InvalidField);
}
