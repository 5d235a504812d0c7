#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "rnls/evolve.hpp"

using namespace rnls;

namespace {

GridPtr grid() { return make_grid(60, 256, GridKind::GaussBessel); }

RadialField gaussian(const GridPtr& g, double A = 1, double mu = 1) {
    return RadialField::from_real_function(
        g, [=](double r) { return A * std::exp(-mu * r * r); });
}

double max_diff(const RadialField& a, const RadialField& b) {
    double m = 0;
    for (int j = 0; j < a.size(); ++j) m = std::max(m, std::abs(a.values()[j] - b.values()[j]));
    return m;
}

}  // namespace

TEST_CASE("linear propagator") {
    EvolutionState s = EvolutionState::nls(gaussian(grid()));

    SUBCASE("t = 0 is the identity") {
        CHECK(max_diff(linear_propagate(s, 0).u, s.u) < 1e-14);
    }
    SUBCASE("round trip") {
        EvolutionState fwd = linear_propagate(s, 0.7);
        CHECK(max_diff(linear_propagate(fwd, -0.7).u, s.u) < 1e-10);
    }
    SUBCASE("free Gaussian decay law") {
        // |u(0, t)| = (1 + 16 t^2)^{-1/2} for the unit Gaussian in 2D
        for (double t : {0.5, 2.0, 5.0}) {
            const double sup = sup_norm(linear_propagate(s, t).u);
            CHECK(sup == doctest::Approx(1 / std::sqrt(1 + 16 * t * t)).epsilon(1e-3));
        }
    }
    SUBCASE("uniform grid unsupported") {
        auto uni = make_grid(60, 256, GridKind::UniformTrapezoid);
        CHECK_THROWS_AS(linear_propagate(EvolutionState::nls(gaussian(uni)), 0.1),
                        UnsupportedGrid);
    }
    SUBCASE("NLKG rotation round trip") {
        EvolutionState kg = EvolutionState::nlkg(gaussian(grid()), gaussian(grid(), 0.3, 2));
        EvolutionState fwd = linear_propagate(kg, 1.3);
        EvolutionState back = linear_propagate(fwd, -1.3);
        CHECK(max_diff(back.u, kg.u) < 1e-10);
        CHECK(max_diff(*back.u_t, *kg.u_t) < 1e-10);
    }
}

TEST_CASE("steppers") {
    const auto nl = Nonlinearity::power(4, -1);
    EvolutionState s = EvolutionState::nls(gaussian(grid()));

    SUBCASE("zero field stays zero") {
        EvolutionState z = EvolutionState::nls(RadialField(grid()));
        CHECK(sup_norm(step_nls(z, 1e-2, nl).u) == 0);
    }
    SUBCASE("equation mismatch throws") {
        CHECK_THROWS_AS(step_nlkg(s, 1e-2, nl), InvalidField);
    }
    SUBCASE("NLKG reversibility") {
        EvolutionState kg = EvolutionState::nlkg(gaussian(grid()), RadialField(grid()));
        EvolutionState fwd = step_nlkg(kg, 1e-2, nl);
        EvolutionState back = step_nlkg(fwd, -1e-2, nl);
        CHECK(max_diff(back.u, kg.u) < 1e-10);
        CHECK(max_diff(*back.u_t, *kg.u_t) < 1e-10);
    }
}

TEST_CASE("evolution with monitors") {
    const auto nl = Nonlinearity::power(4, -1);
    EvolveConfig cfg;
    cfg.dt = 1e-3;
    cfg.monitor_stride = 10;
    cfg.snapshot_stride = 100;

    SUBCASE("conservation over a short defocusing run") {
        Trajectory traj = evolve(EvolutionState::nls(gaussian(grid())), nl, 0.5, cfg);
        const MonitorRow& a = traj.monitor.front();
        double mass_drift = 0, energy_drift = 0;
        for (const auto& r : traj.monitor) {
            mass_drift = std::max(mass_drift, std::abs(r.mass - a.mass) / a.mass);
            energy_drift =
                std::max(energy_drift, std::abs(r.energy - a.energy) / std::abs(a.energy));
        }
        CHECK(mass_drift < 1e-11);
        CHECK(energy_drift < 1e-6);
        CHECK(traj.states.front().t == 0);
        CHECK(traj.final_state().t == doctest::Approx(0.5));
        CHECK_NOTHROW(traj.snapshot_at(0.2));
        CHECK_THROWS_AS(traj.snapshot_at(7.0), std::invalid_argument);
    }

    SUBCASE("energy drift shrinks ~4x under dt halving") {
        auto drift = [&](double dt) {
            EvolveConfig c2 = cfg;
            c2.dt = dt;
            Trajectory t = evolve(EvolutionState::nls(gaussian(grid(), 2)), nl, 0.5, c2);
            double d = 0;
            for (const auto& r : t.monitor)
                d = std::max(d, std::abs(r.energy - t.monitor.front().energy));
            return d;
        };
        const double ratio = drift(2e-3) / drift(1e-3);
        CHECK(ratio > 3.0);
        CHECK(ratio < 5.5);
    }

    SUBCASE("linear mode matches the exact propagator") {
        EvolveConfig lin = cfg;
        lin.nonlinear = false;
        Trajectory t = evolve(EvolutionState::nls(gaussian(grid())), nl, 0.1, lin);
        EvolutionState exact = linear_propagate(EvolutionState::nls(gaussian(grid())), 0.1);
        CHECK(max_diff(t.final_state().u, exact.u) < 1e-9);
    }

    SUBCASE("blowup abort") {
        // collapsing focusing data on a fine core grid
        auto fine = make_grid(20, 512, GridKind::GaussBessel);
        EvolveConfig c2 = cfg;
        c2.dt = 1e-4;
        c2.sup_abort = 8;
        c2.monitor_stride = 1;
        CHECK_THROWS_AS(evolve(EvolutionState::nls(gaussian(fine, 3)),
                               Nonlinearity::power(4, 1), 1.0, c2),
                        BlowupSuspected);
    }

    SUBCASE("boundary contamination abort") {
        auto small = make_grid(20, 192, GridKind::GaussBessel);
        CHECK_THROWS_AS(evolve(EvolutionState::nls(gaussian(small, 1)), nl, 2.5, cfg),
                        BoundaryContamination);
    }

    SUBCASE("config preconditions") {
        EvolveConfig bad = cfg;
        bad.monitor_stride = 200;  // exceeds the snapshot stride
        CHECK_THROWS_AS(evolve(EvolutionState::nls(gaussian(grid())), nl, 0.1, bad),
                        std::invalid_argument);
        CHECK_THROWS_AS(evolve(EvolutionState::nls(gaussian(grid())), nl, -1.0, cfg),
                        std::invalid_argument);
    }
}

TEST_CASE("monitor CSV format") {
    const auto nl = Nonlinearity::power(4, -1);
    EvolveConfig cfg;
    cfg.dt = 1e-2;
    cfg.monitor_stride = 1;
    cfg.snapshot_stride = 5;
    Trajectory traj = evolve(EvolutionState::nls(gaussian(grid())), nl, 0.05, cfg);

    const auto path = std::filesystem::temp_directory_path() / "rnls-monitor-test.csv";
    write_monitor_csv(traj, path);
    std::ifstream in(path);
    std::string header;
    std::getline(in, header);
    CHECK(header == "t,mass,energy,grad_sq,g_integral,sup_norm");
    int rows = 0;
    std::string line;
    while (std::getline(in, line))
        if (!line.empty()) ++rows;
    CHECK(rows == static_cast<int>(traj.monitor.size()));
    std::filesystem::remove(path);
}
