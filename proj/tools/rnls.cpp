#include <CLI11.hpp>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <sstream>

#include "rnls/runner.hpp"

namespace fs = std::filesystem;

namespace {

rnls::RunOptions options_for(const std::string& task) {
    rnls::RunOptions opt;
    if (task == "ground-state") {
        opt.ground_state = true;
    } else if (task == "classify") {
        opt.classify = true;
    } else if (task == "evolve") {
        opt.classify = opt.evolve = true;
    } else if (task == "audit-morawetz") {
        opt.classify = opt.evolve = opt.morawetz = true;
    } else if (task == "audit-inequalities") {
        opt.inequalities = true;
    } else if (task == "scatter-check") {
        opt.classify = opt.evolve = opt.scatter = true;
    } else {
        throw rnls::ConfigInvalid("unknown task '" + task + "'");
    }
    return opt;
}

fs::path resolve_out(const std::string& out_flag, const rnls::ExperimentConfig& cfg,
                     const std::string& task) {
    if (!out_flag.empty()) return out_flag;
    const char* root = std::getenv("RNLS_OUT_ROOT");
    return fs::path(root && *root ? root : "runs") / (cfg.name + "-" + task);
}

std::vector<std::string> split_values(const std::string& csv) {
    std::vector<std::string> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(item);
    return out;
}

void print_summary(const rnls::RunResult& res) {
    std::printf("%s: %s\n", res.skipped ? "reused" : "wrote", res.dir.string().c_str());
    for (const auto& [k, v] : res.summary) std::printf("  %s = %.17g\n", k.c_str(), v);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"radial 2D NLS/NLKG simulation and audit toolkit"};
    app.require_subcommand(1);
    app.fallthrough();  // global flags may follow the subcommand

    std::string config_path, out_flag, axis, values_csv, sweep_task = "evolve";
    int jobs = 1;
    bool force = false;
    app.add_option("--config", config_path, "experiment config file (key = value)")
        ->required();
    app.add_option("--out", out_flag,
                   "output directory (default: $RNLS_OUT_ROOT/<name>-<task>)");
    app.add_option("--jobs", jobs, "concurrent sweep members");
    app.add_flag("--force", force, "re-run even if the directory is complete");

    for (const char* task : {"ground-state", "classify", "evolve", "audit-morawetz",
                             "audit-inequalities", "scatter-check"})
        app.add_subcommand(task);

    CLI::App* sw = app.add_subcommand("sweep", "run one config across an axis");
    sw->add_option("--axis", axis, "config key to vary")->required();
    sw->add_option("--values", values_csv, "comma-separated axis values");
    sw->add_option("--task", sweep_task, "pipeline preset per member (default evolve)");

    CLI11_PARSE(app, argc, argv);

    try {
        const rnls::ExperimentConfig cfg = rnls::ExperimentConfig::from_file(config_path);
        const std::string task = app.get_subcommands().front()->get_name();
        if (task == "sweep") {
            const fs::path out = resolve_out(out_flag, cfg, "sweep-" + axis);
            const rnls::SweepResult res =
                rnls::sweep(cfg, options_for(sweep_task), axis, split_values(values_csv),
                            out, jobs, force);
            std::printf("wrote: %s\n", (out / "sweep.csv").string().c_str());
            for (const auto& row : res.rows)
                if (row.exit_code != 0)
                    std::fprintf(stderr, "%s = %s failed (%d): %s\n", axis.c_str(),
                                 row.value.c_str(), row.exit_code, row.error.c_str());
            return 0;
        }
        print_summary(rnls::run(cfg, options_for(task), resolve_out(out_flag, cfg, task),
                                force));
        return 0;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return rnls::exit_code_for(e);
    }
}
