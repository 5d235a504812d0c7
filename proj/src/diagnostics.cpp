#include "rnls/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <json.hpp>

#include "rnls/field_io.hpp"

namespace rnls {

namespace {

constexpr double kPi = std::numbers::pi;

double h1_distance(const EvolutionState& a, const EvolutionState& b) {
    RadialField d(a.u.grid(), a.u.values() - b.u.values());
    const H1Norms n = h1_norms(d);
    double sq = n.mass_sq + n.grad_sq;
    if (a.u_t && b.u_t) {
        RadialField dt(a.u.grid(), a.u_t->values() - b.u_t->values());
        sq += h1_norms(dt).mass_sq;
    }
    return std::sqrt(sq);
}

// ||u||_2^2 ||grad u||_2^{p-2}, the Appendix norm product.
double norm_product(const H1Norms& n, double p) {
    return n.mass_sq * std::pow(n.grad_sq, (p - 2) / 2);
}

void finish(InequalityReport& rep) {
    rep.max_ratio = 0;
    rep.evaluated = rep.rejected = rep.skipped = 0;
    for (const auto& e : rep.entries) {
        if (e.evaluated) {
            ++rep.evaluated;
            rep.max_ratio = std::max(rep.max_ratio, e.ratio);
        } else if (e.note == "gradient constraint violated") {
            ++rep.rejected;
        } else {
            ++rep.skipped;
        }
    }
}

nlohmann::json entries_json(const InequalityReport& rep) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& e : rep.entries) {
        nlohmann::json row;
        row["lhs"] = e.lhs;
        row["rhs"] = e.rhs;
        row["ratio"] = e.ratio;
        row["evaluated"] = e.evaluated;
        if (!e.note.empty()) row["note"] = e.note;
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace

std::string regime_name(Regime r) {
    switch (r) {
        case Regime::DefocusingGlobal: return "defocusing-global";
        case Regime::FocusingBelowThresholdKPositive:
            return "focusing-below-threshold-K-positive";
        case Regime::FocusingBelowThresholdKNegative:
            return "focusing-below-threshold-K-negative";
        case Regime::AboveThresholdUnknown: return "above-threshold-unknown";
        case Regime::ExponentialSubcritical: return "exponential-subcritical";
        case Regime::ExponentialSupercriticalUnknown:
            return "exponential-supercritical-unknown";
    }
    throw std::logic_error("unknown regime");
}

ClassificationVerdict classify_initial_data(const EvolutionState& state,
                                            const Nonlinearity& nl,
                                            const GroundState* Q) {
    ClassificationVerdict v;
    v.K = virial_K(state.u, nl);
    v.k_positive = v.K > 0;

    // The conserved comparison quantity: E_S + M/2 = J^(1) for NLS, E_K
    // for NLKG (both reduce to the c=1 static energy at t=0 real data).
    v.J = energy(state, nl);
    if (state.equation == Equation::NLS) v.J += 0.5 * mass(state);

    const bool exponential = nl.kind == Nonlinearity::Kind::Exponential;

    if (exponential && !nl.focusing()) {
        v.m = 2 * kPi / nl.kappa0;
        v.energy_gap = v.m - v.J;
        v.regime = v.J < v.m ? Regime::ExponentialSubcritical
                             : Regime::ExponentialSupercriticalUnknown;
        return v;
    }
    if (!nl.focusing()) {
        v.regime = Regime::DefocusingGlobal;
        return v;
    }

    if (!Q) throw MissingGroundState("focusing classification needs a ground state");
    if (Q->nl().kind != nl.kind ||
        (nl.kind == Nonlinearity::Kind::Power ? Q->nl().p != nl.p
                                              : Q->nl().kappa0 != nl.kappa0))
        throw MissingGroundState("ground state does not match the nonlinearity");

    v.m = threshold_m(*Q);
    v.energy_gap = v.m - v.J;
    if (!(v.J < v.m)) {
        v.regime = Regime::AboveThresholdUnknown;
        return v;
    }
    v.regime = v.k_positive ? Regime::FocusingBelowThresholdKPositive
                            : Regime::FocusingBelowThresholdKNegative;

    if (!exponential) {
        const double lhs = norm_product(h1_norms(state.u), nl.p);
        const double rhs = norm_product(H1Norms{Q->mass_sq(), Q->grad_sq()}, nl.p);
        v.norm_product_below = lhs < rhs;
        v.tests_agree = v.norm_product_below == v.k_positive;
        if (!v.tests_agree)
            throw ValidationFailure(
                "below-threshold K-sign and norm-product tests disagree");
    }
    return v;
}

std::string ClassificationVerdict::to_json() const {
    nlohmann::json j;
    j["regime"] = regime_name(regime);
    j["j"] = J;
    j["m"] = m;
    j["k_virial"] = K;
    j["energy_gap"] = energy_gap;
    j["norm_product_below"] = norm_product_below;
    j["k_positive"] = k_positive;
    j["tests_agree"] = tests_agree;
    return j.dump(2);
}

CauchyReport scattering_profile_cauchy(const Trajectory& traj,
                                       const std::vector<double>& T_list) {
    if (T_list.empty()) throw std::invalid_argument("T-list must be nonempty");
    if (!std::is_sorted(T_list.begin(), T_list.end()))
        throw std::invalid_argument("T-list must be increasing");
    CauchyReport rep;
    for (double T : T_list) {
        if (2 * T > traj.end_time() + traj.dt)
            throw std::invalid_argument("window [T, 2T] at T = " + std::to_string(T) +
                                        " extends past the trajectory end");
        // w(t) = S(-t) u(t) for every stored snapshot in [T, 2T].
        std::vector<EvolutionState> w;
        for (const auto& s : traj.states)
            if (s.t >= T - traj.dt / 2 && s.t <= 2 * T + traj.dt / 2)
                w.push_back(linear_propagate(s, -s.t));
        if (w.size() < 2)
            throw std::invalid_argument("fewer than two snapshots in [T, 2T] at T = " +
                                        std::to_string(T));
        CauchyReport::Entry e;
        e.T = T;
        for (size_t i = 0; i < w.size(); ++i)
            for (size_t j = i + 1; j < w.size(); ++j) {
                e.delta = std::max(e.delta, h1_distance(w[i], w[j]));
                ++e.pairs;
            }
        rep.entries.push_back(e);
    }
    rep.decreasing = rep.entries.size() >= 2;
    for (size_t i = 1; i < rep.entries.size(); ++i)
        if (!(rep.entries[i].delta < rep.entries[i - 1].delta)) rep.decreasing = false;
    return rep;
}

std::string CauchyReport::to_json() const {
    nlohmann::json j;
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& e : entries) {
        nlohmann::json row;
        row["t_horizon"] = e.T;
        row["delta"] = e.delta;
        row["pairs"] = e.pairs;
        rows.push_back(std::move(row));
    }
    j["windows"] = std::move(rows);
    j["scattering_consistent"] = decreasing;
    return j.dump(2);
}

InequalityReport gn_audit(const std::vector<RadialField>& fields, double p,
                          const GroundState& Q) {
    const double C = gn_sharp_constant(p, Q);
    InequalityReport rep;
    for (const auto& g : fields) {
        InequalityReport::Entry e;
        const H1Norms n = h1_norms(g);
        if (n.mass_sq == 0 || n.grad_sq == 0) {
            e.note = "zero field";
        } else {
            e.lhs = lp_norm_pp(g, p + 2);
            e.rhs = C * n.mass_sq * std::pow(n.grad_sq, p / 2);
            e.ratio = e.lhs / e.rhs;
            e.evaluated = true;
        }
        rep.entries.push_back(std::move(e));
    }
    finish(rep);
    return rep;
}

double tm_ratio(const RadialField& phi, double a, double kappa0) {
    if (!(a >= 1)) throw std::invalid_argument("tm_ratio requires a >= 1");
    if (!(kappa0 > 0)) throw std::invalid_argument("tm_ratio requires kappa0 > 0");
    const H1Norms n = h1_norms(phi);
    if (n.mass_sq == 0) throw InvalidField("tm_ratio on the zero field");
    if (!(kappa0 * n.grad_sq < 4 * kPi / a))
        throw HypothesisViolation("kappa0 ||grad phi||_2^2 >= 4 pi / a");

    const auto& grid = *phi.grid();
    Eigen::VectorXd dens(phi.size());
    for (int j = 0; j < phi.size(); ++j) {
        const double x = kappa0 * std::norm(phi.values()[j]);
        if (a * x > 700)
            throw AmplitudeOverflow("exponential integrand overflow in tm audit");
        dens[j] = std::pow(std::expm1(x), a);
    }
    const double lhs = integrate_samples(grid, dens);
    const double rhs = kappa0 * n.mass_sq / (4 * kPi / a - kappa0 * n.grad_sq);
    return lhs / rhs;
}

InequalityReport tm_audit(const std::vector<RadialField>& fields, double a,
                          double kappa0) {
    InequalityReport rep;
    for (const auto& phi : fields) {
        InequalityReport::Entry e;
        const H1Norms n = h1_norms(phi);
        if (n.mass_sq == 0) {
            e.note = "zero field";
        } else if (!(kappa0 * n.grad_sq < 4 * kPi / a)) {
            e.note = "gradient constraint violated";
        } else {
            e.ratio = tm_ratio(phi, a, kappa0);
            e.rhs = kappa0 * n.mass_sq / (4 * kPi / a - kappa0 * n.grad_sq);
            e.lhs = e.ratio * e.rhs;
            e.evaluated = true;
        }
        rep.entries.push_back(std::move(e));
    }
    finish(rep);
    return rep;
}

InequalityReport radial_sobolev_audit(const std::vector<RadialField>& fields) {
    InequalityReport rep;
    for (const auto& u : fields) {
        InequalityReport::Entry e;
        const H1Norms n = h1_norms(u);
        if (n.mass_sq == 0 || n.grad_sq == 0) {
            e.note = "zero field";
        } else {
            const auto& r = u.grid()->nodes();
            for (int j = 0; j < u.size(); ++j)
                e.lhs = std::max(e.lhs, std::abs(u.values()[j]) * std::sqrt(r[j]));
            e.rhs = std::pow(n.mass_sq * n.grad_sq, 0.25);
            e.ratio = e.lhs / e.rhs;
            e.evaluated = true;
        }
        rep.entries.push_back(std::move(e));
    }
    finish(rep);
    return rep;
}

std::string InequalityReport::to_json() const {
    nlohmann::json j;
    j["fields"] = entries_json(*this);
    j["max_ratio"] = max_ratio;
    j["evaluated"] = evaluated;
    j["rejected"] = rejected;
    j["skipped"] = skipped;
    return j.dump(2);
}

std::vector<RadialField> random_field_family(const GridPtr& grid, int count,
                                             unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> amp(-1.0, 1.0);
    std::uniform_real_distribution<double> logmu(std::log(0.2), std::log(4.0));
    std::vector<RadialField> fields;
    fields.reserve(count);
    for (int i = 0; i < count; ++i) {
        double A[3], mu[3];
        for (int k = 0; k < 3; ++k) {
            A[k] = amp(rng);
            mu[k] = std::exp(logmu(rng));
        }
        fields.push_back(RadialField::from_real_function(grid, [&](double r) {
            double s = 0;
            for (int k = 0; k < 3; ++k) s += A[k] * std::exp(-mu[k] * r * r);
            return s;
        }));
    }
    return fields;
}

std::vector<RadialField> random_below_threshold_family(const GridPtr& grid, int count,
                                                       unsigned seed,
                                                       const Nonlinearity& nl,
                                                       const GroundState& Q) {
    if (!nl.focusing())
        throw std::invalid_argument("below-threshold sampling is a focusing notion");
    const double m = threshold_m(Q);
    std::vector<RadialField> fields = random_field_family(grid, count, seed);
    for (auto& u : fields) {
        if (h1_norms(u).mass_sq == 0) {
            // Degenerate draw; replace with a fixed small bump.
            u = RadialField::from_real_function(
                grid, [](double r) { return 0.1 * std::exp(-r * r); });
        }
        // Halve the amplitude until strictly below threshold (J -> 0
        // quadratically as the amplitude shrinks).
        for (int tries = 0; tries < 60; ++tries) {
            if (static_energy_J(u, 1.0, nl) < 0.9 * m) break;
            u = RadialField(u.grid(), (0.5 * u.values()).eval());
        }
        if (!(static_energy_J(u, 1.0, nl) < m))
            throw ValidationFailure("could not rescale a sample below the threshold");
    }
    return fields;
}

std::vector<RadialField> tm_test_family(const GridPtr& grid, int count, double a,
                                        double kappa0) {
    if (!(a >= 1) || !(kappa0 > 0))
        throw std::invalid_argument("tm_test_family requires a >= 1, kappa0 > 0");
    std::vector<RadialField> fields;
    fields.reserve(count);
    // Gradient budgets strictly inside the constraint, plus a spread of
    // shapes: Gaussians of varying width and Moser-type log plateaus.
    for (int i = 0; i < count; ++i) {
        RadialField raw(grid);
        if (i % 2 == 0) {
            const double mu = 0.125 * std::pow(2.0, (i / 2) % 8);
            raw = RadialField::from_real_function(
                grid, [mu](double r) { return std::exp(-mu * r * r); });
        } else {
            const double rho = std::pow(2.0, -(((i - 1) / 2) % 8 + 1));
            raw = RadialField::from_real_function(grid, [rho](double r) {
                if (r >= 1) return 0.0;
                return std::log(1 / std::max(r, rho));
            });
        }
        const double frac = 0.25 + 0.65 * (i + 0.5) / count;
        const double grad_target = frac * 4 * kPi / (a * kappa0);
        const double g = h1_norms(raw).grad_sq;
        fields.push_back(
            RadialField(grid, (std::sqrt(grad_target / g) * raw.values()).eval()));
    }
    return fields;
}

std::vector<RadialField> load_field_family(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir))
        throw std::invalid_argument("not a directory: " + dir.string());
    std::vector<std::filesystem::path> paths;
    for (const auto& entry : std::filesystem::directory_iterator(dir))
        if (entry.is_regular_file() && entry.path().extension() != ".json")
            paths.push_back(entry.path());
    std::sort(paths.begin(), paths.end());
    std::vector<RadialField> fields;
    fields.reserve(paths.size());
    for (const auto& p : paths) fields.push_back(load_field(p));
    return fields;
}

}  // namespace rnls
