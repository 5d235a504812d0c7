#include "rnls/ground_state.hpp"

#include <algorithm>
#include <array>
#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <fstream>
#include <json.hpp>

#include "rnls/field_io.hpp"

namespace rnls {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kValidationTol = 1e-4;

// Q, Q', then accumulators: mass, grad, int F, and int |Q|^{p+2}
// (power) or int G (exponential).
using State = std::array<double, 6>;

GridPtr default_storage_grid() { return make_grid(30.0, 512, GridKind::GaussBessel); }

// Q'' + Q'/r = cQ - f(Q) plus quadrature accumulators d/dr = 2 pi r (density).
struct ShootOde {
    double c;
    const Nonlinearity& nl;
    void operator()(const State& y, State& dy, double r) const {
        const double q = y[0];
        const double f = eval_f(q, nl).real();
        dy[0] = y[1];
        dy[1] = c * q - f - y[1] / r;
        const double ring = 2 * kPi * r;
        dy[2] = ring * q * q;
        dy[3] = ring * y[1] * y[1];
        dy[4] = ring * eval_F(q, nl);
        dy[5] = nl.kind == Nonlinearity::Kind::Power
                    ? ring * std::pow(std::abs(q), nl.p + 2)
                    : ring * eval_G(q, nl);
    }
};

enum class Shot { Overshoot, Undershoot };

State series_start(double b, double c, const Nonlinearity& nl, double r0) {
    const double curv = c * b - eval_f(b, nl).real();  // = (Delta Q)(0) = 4 * r^2 coefficient
    State y{};
    y[0] = b + curv * r0 * r0 / 4;
    y[1] = curv * r0 / 2;
    return y;
}

// Integrate one shot without recording; classify by the phase-plane
// dichotomy. Reaching r_end still positive counts as undershoot (keeps
// the bracket valid; the bias is below the bracket tolerance).
Shot classify_shot(double b, double c, const Nonlinearity& nl,
                   const ShootingConfig& cfg) {
    const double r0 = 1e-4;
    State y = series_start(b, c, nl, r0);
    auto stepper = boost::numeric::odeint::make_dense_output(
        cfg.ode_tol, cfg.ode_tol,
        boost::numeric::odeint::runge_kutta_dopri5<State>());
    stepper.initialize(y, r0, 1e-3);
    try {
        while (stepper.current_time() < cfg.r_end) {
            stepper.do_step(ShootOde{c, nl});
            const State& s = stepper.current_state();
            if (s[0] <= 0) return Shot::Overshoot;
            if (s[1] > 0) return Shot::Undershoot;
        }
    } catch (const AmplitudeOverflow&) {
        return Shot::Overshoot;  // runaway growth of the focusing term
    }
    return Shot::Undershoot;
}

}  // namespace

GroundState solve_ground_state(const Nonlinearity& nl, double c,
                               const ShootingConfig& cfg) {
    if (!nl.focusing())
        throw NoGroundState("defocusing nonlinearity admits no positive decaying solution");
    if (!(c > 0)) throw std::invalid_argument("ground state requires c > 0");

    // Bracket the shooting parameter b = Q(0).
    double b_lo = std::sqrt(c);
    for (int i = 0; classify_shot(b_lo, c, nl, cfg) == Shot::Overshoot; ++i) {
        if (i > 60) throw NoGroundState("no undershoot found while shrinking b_lo");
        b_lo /= 2;
    }
    double b_hi = 2 * b_lo;
    while (classify_shot(b_hi, c, nl, cfg) == Shot::Undershoot) {
        b_hi *= 2;
        if (b_hi > cfg.b_cap)
            throw NoGroundState("bisection bracket not found below b_cap");
    }
    while (b_hi - b_lo > cfg.bracket_tol * std::max(1.0, b_hi)) {
        const double mid = 0.5 * (b_lo + b_hi);
        (classify_shot(mid, c, nl, cfg) == Shot::Overshoot ? b_hi : b_lo) = mid;
    }
    const double b = 0.5 * (b_lo + b_hi);

    // Final integration with dense recording of (r, Q, Q') and the
    // accumulated norms, cut at the tail-matching radius.
    GroundState gs;
    gs.nl_ = nl;
    gs.c_ = c;
    gs.b0_ = b;

    const double r0 = 1e-4;
    State y = series_start(b, c, nl, r0);
    auto stepper = boost::numeric::odeint::make_dense_output(
        cfg.ode_tol, cfg.ode_tol,
        boost::numeric::odeint::runge_kutta_dopri5<State>());
    stepper.initialize(y, r0, 1e-3);

    std::vector<State> samples;
    gs.rs_.push_back(r0);
    samples.push_back(y);
    double next_r = r0 + cfg.record_dr;
    bool broke = false;
    while (stepper.current_time() < cfg.r_end && !broke) {
        stepper.do_step(ShootOde{c, nl});
        while (next_r <= stepper.current_time()) {
            State yi;
            stepper.calc_state(next_r, yi);
            gs.rs_.push_back(next_r);
            samples.push_back(yi);
            next_r += cfg.record_dr;
        }
        const State& s = stepper.current_state();
        broke = s[0] <= 0 || s[1] > 0;  // past here the shot is unreliable
    }

    // Cut where Q first drops below the matching threshold, or at the
    // minimum of Q if the integration broke down first.
    const double q_match = 1e-6 * b;
    size_t cut = samples.size();
    for (size_t i = 0; i < samples.size(); ++i)
        if (samples[i][0] < q_match) { cut = i; break; }
    if (cut == samples.size()) {
        cut = std::min_element(samples.begin(), samples.end(),
                               [](const State& a, const State& bb) { return a[0] < bb[0]; }) -
              samples.begin();
    }
    if (samples[cut][0] > 1e-3 * b || samples[cut][1] >= 0)
        throw ValidationFailure("shooting profile failed to decay before breakdown");

    gs.rs_.resize(cut + 1);
    gs.qs_.resize(cut + 1);
    gs.dqs_.resize(cut + 1);
    for (size_t i = 0; i <= cut; ++i) {
        gs.qs_[i] = samples[i][0];
        gs.dqs_[i] = samples[i][1];
    }
    gs.r_match_ = gs.rs_[cut];
    const double s_rate = std::sqrt(c);
    gs.tail_amp_ = gs.qs_[cut] * std::sqrt(gs.r_match_) * std::exp(s_rate * gs.r_match_);

    // Norms: accumulated quadrature up to the cut plus the analytic tail.
    const double q_m = gs.qs_[cut], r_m = gs.r_match_;
    const double mass_tail = 2 * kPi * q_m * q_m * r_m / (2 * s_rate);
    const double dlog = s_rate + 1 / (2 * r_m);  // -Q'/Q on the tail
    gs.mass_sq_ = samples[cut][2] + mass_tail;
    gs.grad_sq_ = samples[cut][3] + dlog * dlog * mass_tail;
    gs.F_integral_ = samples[cut][4];
    gs.lp_norm_ = nl.kind == Nonlinearity::Kind::Power ? samples[cut][5] : 0.0;
    gs.J_value_ = 0.5 * gs.grad_sq_ + 0.5 * c * gs.mass_sq_ - 0.5 * gs.F_integral_;

    GridPtr storage = cfg.grid ? cfg.grid : default_storage_grid();
    gs.profile_ = RadialField::from_real_function(
        storage, [&gs](double r) { return gs.value_at(r); });

    if (nl.kind == Nonlinearity::Kind::Power) {
        gs.residual_1_ = std::abs(gs.grad_sq_ / (c * gs.mass_sq_) * 2 / nl.p - 1);
        gs.residual_2_ = std::abs(gs.lp_norm_ / (c * gs.mass_sq_) * 2 / (nl.p + 2) - 1);
    } else {
        // K_{1,-1}(Q) = 0 and K_{0,1}^(c)(Q) = 0 evaluated from the
        // integrated densities (the grid quadrature is less accurate on
        // the sharper exponential core).
        const double g_int = samples[cut][5];
        gs.residual_1_ = std::abs(gs.grad_sq_ - g_int) / gs.grad_sq_;
        gs.residual_2_ = std::abs(c * gs.mass_sq_ - gs.F_integral_) / (c * gs.mass_sq_);
    }
    if (gs.residual_1_ > kValidationTol || gs.residual_2_ > kValidationTol)
        throw ValidationFailure("ground-state validation residuals exceed 1e-4: " +
                                std::to_string(gs.residual_1_) + ", " +
                                std::to_string(gs.residual_2_));
    return gs;
}

double GroundState::value_at(double r) const {
    if (rs_.empty()) {
        // Loaded state: local even-extension Lagrange interpolation of the
        // stored profile, analytic tail beyond the last node.
        const auto& g = *profile_.grid();
        const auto& rn = g.nodes();
        const int n = g.n();
        if (r >= rn[n - 1]) {
            const double s = std::sqrt(c_);
            const double amp =
                profile_.values()[n - 1].real() * std::sqrt(rn[n - 1]) * std::exp(s * rn[n - 1]);
            return amp * std::exp(-s * r) / std::sqrt(std::max(r, 1e-12));
        }
        const int stencil = 6;
        int j0 = static_cast<int>(std::lower_bound(rn.data(), rn.data() + n, r) - rn.data());
        j0 = std::clamp(j0 - stencil / 2, -stencil / 2, n - stencil);
        double sum = 0;
        for (int a = 0; a < stencil; ++a) {
            const int ja = j0 + a;
            const double ra = ja >= 0 ? rn[ja] : -rn[-ja - 1];
            const double qa = profile_.values()[ja >= 0 ? ja : -ja - 1].real();
            double l = 1;
            for (int bsten = 0; bsten < stencil; ++bsten) {
                if (bsten == a) continue;
                const int jb = j0 + bsten;
                const double rb = jb >= 0 ? rn[jb] : -rn[-jb - 1];
                l *= (r - rb) / (ra - rb);
            }
            sum += l * qa;
        }
        return sum;
    }
    if (r >= r_match_) {
        const double s = std::sqrt(c_);
        return tail_amp_ * std::exp(-s * r) / std::sqrt(std::max(r, rs_.front()));
    }
    if (r <= rs_.front()) {
        const double curv = c_ * b0_ - eval_f(b0_, nl_).real();
        return b0_ + curv * r * r / 4;
    }
    const auto it = std::upper_bound(rs_.begin(), rs_.end(), r);
    const size_t i = (it - rs_.begin()) - 1;
    const double h = rs_[i + 1] - rs_[i];
    const double t = (r - rs_[i]) / h;
    const double t2 = t * t, t3 = t2 * t;
    // cubic Hermite on (Q, Q') samples
    return (2 * t3 - 3 * t2 + 1) * qs_[i] + (t3 - 2 * t2 + t) * h * dqs_[i] +
           (-2 * t3 + 3 * t2) * qs_[i + 1] + (t3 - t2) * h * dqs_[i + 1];
}

RadialField GroundState::on_grid(const GridPtr& target) const {
    if (rs_.empty()) return resample(profile_, target);
    return RadialField::from_real_function(target,
                                           [this](double r) { return value_at(r); });
}

PohozaevReport pohozaev_report(const GroundState& Q) {
    PohozaevReport rep;
    if (Q.nl().kind == Nonlinearity::Kind::Power) {
        const double lp = Q.lp_norm();
        rep.energy_identity_residual =
            std::abs(Q.grad_sq() + Q.c() * Q.mass_sq() - lp) / lp;
        rep.pohozaev_residual =
            std::abs(Q.c() * Q.mass_sq() - 2 * lp / (Q.nl().p + 2)) / (Q.c() * Q.mass_sq());
    } else {
        const auto [r1, r2] = Q.pohozaev_residuals();
        rep.energy_identity_residual = r1;
        rep.pohozaev_residual = r2;
        rep.exponential_substitute = true;
    }
    return rep;
}

PohozaevReport pohozaev_report(const RadialField& profile, double c,
                               const Nonlinearity& nl) {
    PohozaevReport rep;
    const H1Norms n = h1_norms(profile);
    if (nl.kind == Nonlinearity::Kind::Power) {
        const double lp = lp_norm_pp(profile, nl.p + 2);
        rep.energy_identity_residual = std::abs(n.grad_sq + c * n.mass_sq - lp) / lp;
        rep.pohozaev_residual =
            std::abs(c * n.mass_sq - 2 * lp / (nl.p + 2)) / (c * n.mass_sq);
    } else {
        rep.energy_identity_residual =
            std::abs(n.grad_sq - integral_G(profile, nl)) / n.grad_sq;
        rep.pohozaev_residual =
            std::abs(c * n.mass_sq - integral_F(profile, nl)) / (c * n.mass_sq);
        rep.exponential_substitute = true;
    }
    return rep;
}

std::string PohozaevReport::to_json() const {
    nlohmann::json j;
    j["energy_identity_residual"] = energy_identity_residual;
    j["pohozaev_residual"] = pohozaev_residual;
    j["exponential_substitute"] = exponential_substitute;
    return j.dump(2);
}

double threshold_m(const GroundState& Q) {
    if (Q.nl().kind == Nonlinearity::Kind::Power) return Q.J_value();
    return std::min(Q.J_value(), 2 * kPi / Q.nl().kappa0);
}

double threshold_m(const Nonlinearity& nl, double c, const ShootingConfig& cfg) {
    return threshold_m(solve_ground_state(nl, c, cfg));
}

double gn_sharp_constant(double p, const GroundState& Q) {
    if (Q.nl().kind != Nonlinearity::Kind::Power || Q.nl().p != p)
        throw std::invalid_argument("gn_sharp_constant: exponent does not match the ground state");
    return (p + 2) / 2 * std::pow(p / 2, -p / 2) * std::pow(Q.mass_sq(), -p / 2);
}

double tm_constant_lower_bound(double kappa0, const TMFamilyConfig& cfg) {
    if (!(kappa0 > 0)) throw std::invalid_argument("kappa0 must be positive");
    if (cfg.gaussians + cfg.mosers <= 0)
        throw std::invalid_argument("tm_constant_lower_bound: empty family");
    GridPtr grid = cfg.grid ? cfg.grid : default_storage_grid();
    const Nonlinearity nl = Nonlinearity::exponential(kappa0, 1);
    const double grad_target = cfg.grad_fraction * 4 * kPi / kappa0;

    auto quotient = [&](const RadialField& raw) {
        const H1Norms n = h1_norms(raw);
        if (n.grad_sq <= 0) return 0.0;
        const double amp = std::sqrt(grad_target / n.grad_sq);
        Eigen::VectorXcd v = amp * raw.values();
        const RadialField phi(raw.grid(), std::move(v));
        return 2 * integral_F(phi, nl) / h1_norms(phi).mass_sq;
    };

    double best = 0;
    for (int i = 0; i < cfg.gaussians; ++i) {
        const double mu = 0.125 * std::pow(2.0, i);
        best = std::max(best, quotient(RadialField::from_real_function(
                                  grid, [mu](double r) { return std::exp(-mu * r * r); })));
    }
    for (int j = 0; j < cfg.mosers; ++j) {
        const double rho = std::pow(2.0, -(j + 1));
        auto moser = [rho](double r) {
            if (r >= 1) return 0.0;
            return std::log(1 / std::max(r, rho));
        };
        best = std::max(best, quotient(RadialField::from_real_function(grid, moser)));
    }
    if (!std::isfinite(best))
        throw InvalidField("tm_constant_lower_bound produced a non-finite quotient");
    return best;
}

void save_ground_state(const GroundState& Q, const std::string& path) {
    save_field(path, Q.profile());
    nlohmann::json j;
    j["format"] = "ground-state v1";
    j["c"] = Q.c();
    j["center_value"] = Q.center_value();
    nlohmann::json nlj;
    nlj["kind"] = Q.nl().kind == Nonlinearity::Kind::Power ? "power" : "exponential";
    nlj["p"] = Q.nl().p;
    nlj["kappa0"] = Q.nl().kappa0;
    nlj["lambda"] = Q.nl().lambda;
    j["nonlinearity"] = nlj;
    j["mass_sq"] = Q.mass_sq();
    j["grad_sq"] = Q.grad_sq();
    j["lp_norm"] = Q.lp_norm();
    j["j_value"] = Q.J_value();
    const auto [r1, r2] = Q.pohozaev_residuals();
    j["residuals"] = {r1, r2};
    j["threshold_m"] = threshold_m(Q);
    std::ofstream out(path + ".json");
    if (!out) throw std::runtime_error("cannot write " + path + ".json");
    out << j.dump(2) << "\n";
}

GroundState load_ground_state(const std::string& path) {
    std::ifstream in(path + ".json");
    if (!in) throw std::runtime_error("cannot read " + path + ".json");
    nlohmann::json j;
    in >> j;
    if (j.value("format", "") != "ground-state v1")
        throw std::runtime_error("unrecognized ground-state sidecar: " + path + ".json");

    GroundState gs;
    gs.c_ = j.at("c").get<double>();
    gs.b0_ = j.at("center_value").get<double>();
    const auto& nlj = j.at("nonlinearity");
    gs.nl_ = nlj.at("kind") == "power"
                 ? Nonlinearity::power(nlj.at("p").get<double>(), nlj.at("lambda").get<int>())
                 : Nonlinearity::exponential(nlj.at("kappa0").get<double>(),
                                             nlj.at("lambda").get<int>());
    gs.mass_sq_ = j.at("mass_sq").get<double>();
    gs.grad_sq_ = j.at("grad_sq").get<double>();
    gs.lp_norm_ = j.at("lp_norm").get<double>();
    gs.J_value_ = j.at("j_value").get<double>();
    gs.F_integral_ = gs.grad_sq_ + gs.c_ * gs.mass_sq_ - 2 * gs.J_value_;
    gs.residual_1_ = j.at("residuals")[0].get<double>();
    gs.residual_2_ = j.at("residuals")[1].get<double>();
    if (gs.residual_1_ > kValidationTol || gs.residual_2_ > kValidationTol)
        throw ValidationFailure("loaded ground state fails validation residuals");
    gs.profile_ = load_field(path);
    return gs;
}

}  // namespace rnls
