#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "rnls/errors.hpp"

namespace rnls {

inline constexpr const char* kCodeVersion = "0.1.0";

// Flat key = value experiment description (see docs in README). Every
// field has a default so a config file only states what it changes.
struct ExperimentConfig {
    std::string equation = "nls";          // nls | nlkg
    std::string nonlinearity = "power";    // power | exponential
    double p = 4;
    double kappa0 = 1;
    int lambda = -1;                       // +1 focusing, -1 defocusing
    double c = 1;                          // ground-state frequency

    std::string grid = "gauss-bessel";     // gauss-bessel | uniform
    double r_max = 100;
    int n = 384;

    std::string initial = "gaussian";      // gaussian | scaled-ground-state | file
    double amplitude = 1;
    double mu = 1;
    double epsilon = 0.5;
    std::string initial_file;

    double dt = 1e-3;
    double t_end = 5;
    int monitor_stride = 10;
    int snapshot_stride = 100;
    double sup_abort = 1e4;
    double grad_abort = 1e8;
    double boundary_limit = 1e-6;
    bool nonlinear_term = true;

    // audit parameters
    std::vector<double> r_list = {2, 4, 8, 16};
    int windows = 8;
    double delta = 0.05;
    std::vector<double> t_horizons = {5, 10, 20};
    int field_count = 100;
    unsigned seed = 1;

    std::string name = "run";

    // Assign one key (throws ConfigInvalid on unknown keys / bad values).
    void set(const std::string& key, const std::string& value);
    static ExperimentConfig from_file(const std::filesystem::path& path);
    void validate() const;  // throws ConfigInvalid with a field-path message
    std::string to_json() const;
};

// Which pipeline phases a run executes; subcommands pick a preset.
struct RunOptions {
    bool ground_state = false;   // solve and persist Q
    bool classify = false;
    bool evolve = false;
    bool morawetz = false;       // identity + virial audit + weighted decay
    bool inequalities = false;   // G-N / T-M / radial Sobolev families
    bool scatter = false;        // H1-Cauchy profile report
};

struct RunResult {
    std::filesystem::path dir;
    bool skipped = false;  // completed directory reused (resume without --force)
    std::map<std::string, double> summary;
};

// Executes the requested phases into `out`, writing manifest.json,
// monitor.csv, snapshots/ and reports/*.json. Deterministic for a fixed
// config + seed. A completed directory is a no-op unless force.
RunResult run(const ExperimentConfig& cfg, const RunOptions& opt,
              const std::filesystem::path& out, bool force = false);

struct SweepRow {
    std::string value;
    int exit_code = 0;
    std::string error;
    std::map<std::string, double> summary;
};

struct SweepResult {
    std::string axis;
    std::vector<SweepRow> rows;
};

// Independent member runs (up to `jobs` concurrent) plus an aggregate
// CSV at out_root/sweep.csv keyed by the axis value. Member failures are
// recorded per row; the sweep itself continues.
SweepResult sweep(const ExperimentConfig& base, const RunOptions& opt,
                  const std::string& axis, const std::vector<std::string>& values,
                  const std::filesystem::path& out_root, int jobs = 1,
                  bool force = false);

// CLI exit codes, one per error class.
enum class ExitCode : int {
    Ok = 0,
    Failure = 1,
    ConfigInvalid = 2,
    HypothesisViolation = 3,
    BlowupSuspected = 4,
    BoundaryContamination = 5,
    ValidationFailure = 6,
    NoGroundState = 7,
    MissingGroundState = 8,
    AmplitudeOverflow = 9,
};
int exit_code_for(const std::exception& e);

}  // namespace rnls
