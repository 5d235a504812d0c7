#include "rnls/runner.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "rnls/diagnostics.hpp"
#include "rnls/evolve.hpp"
#include "rnls/field_io.hpp"
#include "rnls/ground_state.hpp"
#include "rnls/morawetz.hpp"

namespace fs = std::filesystem;

namespace rnls {

namespace {

double parse_double(const std::string& key, const std::string& v) {
    try {
        size_t pos = 0;
        double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigInvalid(key + ": not a number: '" + v + "'");
    }
}

int parse_int(const std::string& key, const std::string& v) {
    const double x = parse_double(key, v);
    if (x != std::floor(x)) throw ConfigInvalid(key + ": not an integer: '" + v + "'");
    return static_cast<int>(x);
}

bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw ConfigInvalid(key + ": not a boolean: '" + v + "'");
}

std::vector<double> parse_list(const std::string& key, const std::string& v) {
    std::vector<double> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_double(key, item));
    return out;
}

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

std::string format_double(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text << '\n';
}

Nonlinearity nonlinearity_of(const ExperimentConfig& cfg) {
    if (cfg.nonlinearity == "power") return Nonlinearity::power(cfg.p, cfg.lambda);
    return Nonlinearity::exponential(cfg.kappa0, cfg.lambda);
}

Nonlinearity focusing_counterpart(const Nonlinearity& nl) {
    return nl.kind == Nonlinearity::Kind::Power
               ? Nonlinearity::power(nl.p, 1)
               : Nonlinearity::exponential(nl.kappa0, 1);
}

}  // namespace

void ExperimentConfig::set(const std::string& key, const std::string& value) {
    if (key == "equation") equation = value;
    else if (key == "nonlinearity") nonlinearity = value;
    else if (key == "p") p = parse_double(key, value);
    else if (key == "kappa0") kappa0 = parse_double(key, value);
    else if (key == "lambda") lambda = parse_int(key, value);
    else if (key == "c") c = parse_double(key, value);
    else if (key == "grid") grid = value;
    else if (key == "r_max") r_max = parse_double(key, value);
    else if (key == "n") n = parse_int(key, value);
    else if (key == "initial") initial = value;
    else if (key == "amplitude") amplitude = parse_double(key, value);
    else if (key == "mu") mu = parse_double(key, value);
    else if (key == "epsilon") epsilon = parse_double(key, value);
    else if (key == "initial_file") initial_file = value;
    else if (key == "dt") dt = parse_double(key, value);
    else if (key == "t_end") t_end = parse_double(key, value);
    else if (key == "monitor_stride") monitor_stride = parse_int(key, value);
    else if (key == "snapshot_stride") snapshot_stride = parse_int(key, value);
    else if (key == "sup_abort") sup_abort = parse_double(key, value);
    else if (key == "grad_abort") grad_abort = parse_double(key, value);
    else if (key == "boundary_limit") boundary_limit = parse_double(key, value);
    else if (key == "nonlinear_term") nonlinear_term = parse_bool(key, value);
    else if (key == "r_list") r_list = parse_list(key, value);
    else if (key == "windows") windows = parse_int(key, value);
    else if (key == "delta") delta = parse_double(key, value);
    else if (key == "t_horizons") t_horizons = parse_list(key, value);
    else if (key == "field_count") field_count = parse_int(key, value);
    else if (key == "seed") seed = static_cast<unsigned>(parse_int(key, value));
    else if (key == "name") name = value;
    else throw ConfigInvalid("unknown config key '" + key + "'");
}

ExperimentConfig ExperimentConfig::from_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigInvalid("cannot read config file " + path.string());
    ExperimentConfig cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigInvalid(path.string() + ":" + std::to_string(lineno) +
                                ": expected key = value");
        cfg.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    cfg.validate();
    return cfg;
}

void ExperimentConfig::validate() const {
    if (equation != "nls" && equation != "nlkg")
        throw ConfigInvalid("equation: must be nls or nlkg");
    if (nonlinearity != "power" && nonlinearity != "exponential")
        throw ConfigInvalid("nonlinearity: must be power or exponential");
    if (nonlinearity == "power" && !(p > 2))
        throw ConfigInvalid("p: must satisfy p > 2");
    if (nonlinearity == "exponential" && !(kappa0 > 0))
        throw ConfigInvalid("kappa0: must be positive");
    if (lambda != 1 && lambda != -1) throw ConfigInvalid("lambda: must be +1 or -1");
    if (!(c > 0)) throw ConfigInvalid("c: must be positive");
    if (grid != "gauss-bessel" && grid != "uniform")
        throw ConfigInvalid("grid: must be gauss-bessel or uniform");
    if (!(r_max > 0)) throw ConfigInvalid("r_max: must be positive");
    if (n < 16) throw ConfigInvalid("n: need at least 16 nodes");
    if (initial != "gaussian" && initial != "scaled-ground-state" && initial != "file")
        throw ConfigInvalid("initial: must be gaussian, scaled-ground-state or file");
    if (initial == "file" && initial_file.empty())
        throw ConfigInvalid("initial_file: required when initial = file");
    if (initial == "scaled-ground-state" && !(epsilon > 0))
        throw ConfigInvalid("epsilon: must be positive");
    if (!(mu > 0)) throw ConfigInvalid("mu: must be positive");
    if (!(dt > 0)) throw ConfigInvalid("dt: must be positive");
    if (t_end < 0) throw ConfigInvalid("t_end: must be nonnegative");
    if (monitor_stride < 1 || snapshot_stride < 1)
        throw ConfigInvalid("monitor_stride/snapshot_stride: must be >= 1");
    if (!(delta > 0)) throw ConfigInvalid("delta: must be positive");
    if (windows < 1) throw ConfigInvalid("windows: must be >= 1");
    if (field_count < 1) throw ConfigInvalid("field_count: must be >= 1");
    for (double R : r_list)
        if (!(R > 0)) throw ConfigInvalid("r_list: radii must be positive");
    for (double T : t_horizons)
        if (!(T > 0)) throw ConfigInvalid("t_horizons: horizons must be positive");
}

std::string ExperimentConfig::to_json() const {
    nlohmann::json j;
    j["equation"] = equation;
    j["nonlinearity"] = nonlinearity;
    j["p"] = p;
    j["kappa0"] = kappa0;
    j["lambda"] = lambda;
    j["c"] = c;
    j["grid"] = grid;
    j["r_max"] = r_max;
    j["n"] = n;
    j["initial"] = initial;
    j["amplitude"] = amplitude;
    j["mu"] = mu;
    j["epsilon"] = epsilon;
    j["initial_file"] = initial_file;
    j["dt"] = dt;
    j["t_end"] = t_end;
    j["monitor_stride"] = monitor_stride;
    j["snapshot_stride"] = snapshot_stride;
    j["sup_abort"] = sup_abort;
    j["grad_abort"] = grad_abort;
    j["boundary_limit"] = boundary_limit;
    j["nonlinear_term"] = nonlinear_term;
    j["r_list"] = r_list;
    j["windows"] = windows;
    j["delta"] = delta;
    j["t_horizons"] = t_horizons;
    j["field_count"] = field_count;
    j["seed"] = seed;
    j["name"] = name;
    return j.dump(2);
}

int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const ConfigInvalid*>(&e)) return static_cast<int>(ExitCode::ConfigInvalid);
    if (dynamic_cast<const HypothesisViolation*>(&e))
        return static_cast<int>(ExitCode::HypothesisViolation);
    if (dynamic_cast<const BlowupSuspected*>(&e))
        return static_cast<int>(ExitCode::BlowupSuspected);
    if (dynamic_cast<const BoundaryContamination*>(&e))
        return static_cast<int>(ExitCode::BoundaryContamination);
    if (dynamic_cast<const ValidationFailure*>(&e))
        return static_cast<int>(ExitCode::ValidationFailure);
    if (dynamic_cast<const NoGroundState*>(&e)) return static_cast<int>(ExitCode::NoGroundState);
    if (dynamic_cast<const MissingGroundState*>(&e))
        return static_cast<int>(ExitCode::MissingGroundState);
    if (dynamic_cast<const AmplitudeOverflow*>(&e))
        return static_cast<int>(ExitCode::AmplitudeOverflow);
    if (dynamic_cast<const std::invalid_argument*>(&e))
        return static_cast<int>(ExitCode::ConfigInvalid);
    return static_cast<int>(ExitCode::Failure);
}

namespace {

void save_snapshots(const Trajectory& traj, const fs::path& dir) {
    fs::create_directories(dir);
    std::ofstream index(dir / "index.csv");
    index << "snapshot,t\n";
    char name[64];
    for (size_t i = 0; i < traj.states.size(); ++i) {
        const auto& s = traj.states[i];
        std::snprintf(name, sizeof name, "%05zu_u.field", i);
        save_field(dir / name, s.u);
        if (s.u_t) {
            std::snprintf(name, sizeof name, "%05zu_ut.field", i);
            save_field(dir / name, *s.u_t);
        }
        index << i << ',' << format_double(s.t) << '\n';
    }
}

void audit_morawetz_phase(const ExperimentConfig& cfg, const Trajectory& traj,
                          const Nonlinearity& nl, bool below_threshold_vouched,
                          const fs::path& reports,
                          std::map<std::string, double>& summary) {
    // Identity check at the largest cutoff radius that fits the domain.
    double R_id = 0;
    for (double R : cfg.r_list)
        if (2 * R < cfg.r_max) R_id = std::max(R_id, R);
    if (R_id == 0) throw ConfigInvalid("r_list: no cutoff radius fits 2R < r_max");
    const CutoffWeights cw = CutoffWeights::build(R_id, traj.initial().u.grid());
    const MorawetzReport ident =
        identity_residual(traj, cw, traj.initial().t, traj.end_time());
    ident.write_csv(reports / "morawetz_identity.csv");
    write_text(reports / "morawetz_identity.json", ident.to_json());
    summary["morawetz_max_residual"] = ident.max_residual;
    summary["morawetz_residual_ratio"] =
        ident.max_abs_rhs > 0 ? ident.max_residual / ident.max_abs_rhs : 0;

    std::vector<double> radii;
    for (double R : cfg.r_list)
        if (2 * R < cfg.r_max) radii.push_back(R);
    const double span = traj.end_time() / 2;
    std::vector<std::pair<double, double>> windows;
    for (int i = 0; i < cfg.windows; ++i) {
        const double start =
            cfg.windows == 1 ? 0 : span * i / (cfg.windows - 1);
        windows.emplace_back(start, start + span);
    }
    const VirialMorawetzAudit audit =
        virial_morawetz_audit(traj, radii, windows, nl, below_threshold_vouched);
    write_text(reports / "virial_morawetz.json", audit.to_json());
    summary["virial_c_star"] = audit.fitted_constant;
    summary["virial_window_spread"] = audit.window_spread;
    summary["virial_stable"] = audit.stable ? 1 : 0;

    nlohmann::json wd;
    wd["delta"] = cfg.delta;
    nlohmann::json rows = nlohmann::json::array();
    for (double T : {1.0, 2.0, 4.0, 8.0}) {
        if (T >= traj.end_time()) continue;
        const WeightedIntegral wi = weighted_decay_integral(traj, T, cfg.delta, nl);
        nlohmann::json row;
        row["t_start"] = T;
        row["value"] = wi.value;
        row["ratio"] = wi.ratio;
        rows.push_back(std::move(row));
        summary["weighted_decay_ratio_t" + std::to_string(static_cast<int>(T))] = wi.ratio;
        if (nl.kind == Nonlinearity::Kind::Exponential) {
            const WeightedIntegral wf = weighted_f_L1(traj, T, cfg.delta, nl);
            summary["weighted_f_ratio_t" + std::to_string(static_cast<int>(T))] = wf.ratio;
        }
    }
    wd["rows"] = std::move(rows);
    write_text(reports / "weighted_decay.json", wd.dump(2));
}

void audit_inequalities_phase(const ExperimentConfig& cfg, const Nonlinearity& nl,
                              const GroundState* Q, const fs::path& reports,
                              std::map<std::string, double>& summary) {
    GridPtr family_grid = make_grid(30, 512, GridKind::GaussBessel);
    const std::vector<RadialField> fields =
        random_field_family(family_grid, cfg.field_count, cfg.seed);

    if (nl.kind == Nonlinearity::Kind::Power) {
        if (!Q) throw MissingGroundState("G-N audit needs the ground state");
        InequalityReport gn = gn_audit(fields, nl.p, *Q);
        write_text(reports / "gn.json", gn.to_json());
        summary["gn_max_ratio"] = gn.max_ratio;
        summary["gn_q0_ratio"] = gn_audit({Q->profile()}, nl.p, *Q).max_ratio;
    }

    const double kappa = nl.kind == Nonlinearity::Kind::Exponential ? nl.kappa0 : 1.0;
    for (double a : {1.0, 2.0}) {
        InequalityReport tm =
            tm_audit(tm_test_family(family_grid, 20, a, kappa), a, kappa);
        const std::string tag = a == 1.0 ? "1" : "2";
        write_text(reports / ("tm_a" + tag + ".json"), tm.to_json());
        summary["tm_max_ratio_a" + tag] = tm.max_ratio;
        summary["tm_rejected_a" + tag] = tm.rejected;
    }

    InequalityReport rs = radial_sobolev_audit(fields);
    write_text(reports / "radial_sobolev.json", rs.to_json());
    summary["radial_sobolev_constant"] = rs.max_ratio;
}

}  // namespace

RunResult run(const ExperimentConfig& cfg, const RunOptions& opt, const fs::path& out,
              bool force) {
    cfg.validate();
    fs::create_directories(out);
    const fs::path manifest_path = out / "manifest.json";

    if (!force && fs::exists(manifest_path)) {
        std::ifstream in(manifest_path);
        nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
        if (!j.is_discarded() && j.value("status", "") == "complete") {
            RunResult res;
            res.dir = out;
            res.skipped = true;
            for (auto& [k, v] : j["summary"].items()) res.summary[k] = v.get<double>();
            return res;
        }
    }

    const fs::path reports = out / "reports";
    fs::create_directories(reports);

    RunResult res;
    res.dir = out;

    const Nonlinearity nl = nonlinearity_of(cfg);
    const GridKind kind =
        cfg.grid == "uniform" ? GridKind::UniformTrapezoid : GridKind::GaussBessel;
    GridPtr grid = make_grid(cfg.r_max, cfg.n, kind);

    const bool wants_dynamics = opt.classify || opt.evolve || opt.morawetz || opt.scatter;
    const bool need_Q = opt.ground_state || cfg.initial == "scaled-ground-state" ||
                        (wants_dynamics && nl.focusing()) ||
                        (opt.inequalities && nl.kind == Nonlinearity::Kind::Power);

    std::optional<GroundState> Q;
    if (need_Q) {
        Q = solve_ground_state(focusing_counterpart(nl), cfg.c);
        if (opt.ground_state) {
            save_ground_state(*Q, (out / "ground_state.field").string());
            write_text(reports / "pohozaev.json", pohozaev_report(*Q).to_json());
            res.summary["gs_center_value"] = Q->center_value();
            res.summary["gs_mass_sq"] = Q->mass_sq();
            res.summary["gs_grad_sq"] = Q->grad_sq();
            res.summary["gs_grad_over_mass"] = Q->grad_sq() / Q->mass_sq();
            if (nl.kind == Nonlinearity::Kind::Power)
                res.summary["gs_lp_over_mass"] = Q->lp_norm() / Q->mass_sq();
            res.summary["gs_j"] = Q->J_value();
            res.summary["gs_m"] = threshold_m(*Q);
            const auto [r1, r2] = Q->pohozaev_residuals();
            res.summary["gs_residual_1"] = r1;
            res.summary["gs_residual_2"] = r2;
        }
    }

    std::optional<EvolutionState> state0;
    if (wants_dynamics) {
        RadialField u0(grid);
        if (cfg.initial == "gaussian") {
            u0 = RadialField::from_real_function(grid, [&](double r) {
                return cfg.amplitude * std::exp(-cfg.mu * r * r);
            });
        } else if (cfg.initial == "scaled-ground-state") {
            u0 = Q->on_grid(grid);
            u0 = RadialField(grid, (cfg.epsilon * u0.values()).eval());
        } else {
            RadialField loaded = load_field(cfg.initial_file);
            u0 = loaded.grid() == grid ? loaded : resample(loaded, grid);
        }
        state0 = cfg.equation == "nls"
                     ? EvolutionState::nls(std::move(u0))
                     : EvolutionState::nlkg(std::move(u0), RadialField(grid));
    }

    bool below_threshold_k_positive = false;
    if (state0) {
        const ClassificationVerdict verdict =
            classify_initial_data(*state0, nl, Q ? &*Q : nullptr);
        write_text(reports / "classification.json", verdict.to_json());
        res.summary["classification_j"] = verdict.J;
        res.summary["classification_m"] = verdict.m;
        res.summary["classification_k"] = verdict.K;
        res.summary["classification_gap"] = verdict.energy_gap;
        below_threshold_k_positive =
            verdict.regime == Regime::FocusingBelowThresholdKPositive;
    }

    std::optional<Trajectory> traj;
    if ((opt.evolve || opt.morawetz || opt.scatter) && cfg.t_end > 0) {
        EvolveConfig ec;
        ec.dt = cfg.dt;
        ec.monitor_stride = cfg.monitor_stride;
        ec.snapshot_stride = cfg.snapshot_stride;
        ec.sup_abort = cfg.sup_abort;
        ec.grad_abort = cfg.grad_abort;
        ec.boundary_limit = cfg.boundary_limit;
        ec.nonlinear = cfg.nonlinear_term;
        traj = evolve(*state0, nl, cfg.t_end, ec);
        write_monitor_csv(*traj, out / "monitor.csv");
        save_snapshots(*traj, out / "snapshots");

        const MonitorRow& first = traj->monitor.front();
        double mass_drift = 0, energy_drift = 0;
        for (const auto& row : traj->monitor) {
            mass_drift = std::max(mass_drift, std::abs(row.mass - first.mass));
            energy_drift = std::max(energy_drift, std::abs(row.energy - first.energy));
        }
        res.summary["mass_drift"] = first.mass > 0 ? mass_drift / first.mass : mass_drift;
        res.summary["energy_drift"] =
            first.energy != 0 ? energy_drift / std::abs(first.energy) : energy_drift;
    }

    if (opt.morawetz && traj)
        audit_morawetz_phase(cfg, *traj, nl, below_threshold_k_positive, reports,
                             res.summary);

    if (opt.inequalities)
        audit_inequalities_phase(cfg, nl, Q ? &*Q : nullptr, reports, res.summary);

    if (opt.scatter && traj) {
        std::vector<double> horizons;
        for (double T : cfg.t_horizons)
            if (2 * T <= traj->end_time() + traj->dt / 2) horizons.push_back(T);
        if (horizons.empty())
            throw ConfigInvalid("t_horizons: no window [T, 2T] fits t_end");
        const CauchyReport rep = scattering_profile_cauchy(*traj, horizons);
        write_text(reports / "scattering.json", rep.to_json());
        for (const auto& e : rep.entries) {
            char key[48];
            std::snprintf(key, sizeof key, "cauchy_delta_t%g", e.T);
            res.summary[key] = e.delta;
        }
        res.summary["scattering_consistent"] = rep.decreasing ? 1 : 0;
    }

    nlohmann::json manifest;
    manifest["format"] = "run-manifest v1";
    manifest["version"] = kCodeVersion;
    manifest["status"] = "complete";
    manifest["config"] = nlohmann::json::parse(cfg.to_json());
    manifest["summary"] = res.summary;
    write_text(manifest_path, manifest.dump(2));
    return res;
}

SweepResult sweep(const ExperimentConfig& base, const RunOptions& opt,
                  const std::string& axis, const std::vector<std::string>& values,
                  const fs::path& out_root, int jobs, bool force) {
    if (jobs < 1) jobs = 1;
    {
        // Axis must resolve in the schema before any run starts.
        ExperimentConfig probe = base;
        if (!values.empty()) probe.set(axis, values.front());
    }
    fs::create_directories(out_root);

    SweepResult result;
    result.axis = axis;
    result.rows.resize(values.size());

    std::atomic<size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            const size_t i = next.fetch_add(1);
            if (i >= values.size()) return;
            SweepRow& row = result.rows[i];
            row.value = values[i];
            try {
                ExperimentConfig cfg = base;
                cfg.set(axis, values[i]);
                cfg.name = axis + "=" + values[i];
                const RunResult r = run(cfg, opt, out_root / cfg.name, force);
                row.summary = r.summary;
            } catch (const std::exception& e) {
                row.exit_code = exit_code_for(e);
                row.error = e.what();
            }
        }
    };
    if (jobs == 1 || values.size() <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < std::min<int>(jobs, static_cast<int>(values.size())); ++t)
            pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    std::set<std::string> keys;
    for (const auto& row : result.rows)
        for (const auto& [k, v] : row.summary) keys.insert(k);

    std::ofstream csv(out_root / "sweep.csv");
    if (!csv) throw std::runtime_error("cannot write " + (out_root / "sweep.csv").string());
    csv << axis << ",exit_code,error";
    for (const auto& k : keys) csv << ',' << k;
    csv << '\n';
    for (const auto& row : result.rows) {
        std::string err = row.error;
        std::replace(err.begin(), err.end(), '"', '\'');
        std::replace(err.begin(), err.end(), '\n', ' ');
        csv << row.value << ',' << row.exit_code << ',' << '"' << err << '"';
        for (const auto& k : keys) {
            csv << ',';
            auto it = row.summary.find(k);
            if (it != row.summary.end()) csv << format_double(it->second);
        }
        csv << '\n';
    }
    return result;
}

}  // namespace rnls
