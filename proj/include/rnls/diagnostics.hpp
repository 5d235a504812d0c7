#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "rnls/evolve.hpp"
#include "rnls/functionals.hpp"
#include "rnls/grid.hpp"
#include "rnls/ground_state.hpp"

namespace rnls {

enum class Regime {
    DefocusingGlobal,
    FocusingBelowThresholdKPositive,
    FocusingBelowThresholdKNegative,
    AboveThresholdUnknown,
    ExponentialSubcritical,
    ExponentialSupercriticalUnknown,
};

std::string regime_name(Regime r);

struct ClassificationVerdict {
    Regime regime = Regime::DefocusingGlobal;
    double J = 0;           // conserved static energy (E_S + M/2, or E_K)
    double m = 0;           // threshold (J(Q) or 2 pi / kappa0); 0 if not used
    double K = 0;           // virial functional at the data
    double energy_gap = 0;  // m - J (or threshold - energy)
    // Power focusing only: the norm-product test
    // ||u||_2^2 ||grad u||_2^{p-2} < ||Q||_2^2 ||grad Q||_2^{p-2}
    // and its agreement with the K-sign test.
    bool norm_product_below = false;
    bool k_positive = false;
    bool tests_agree = true;

    std::string to_json() const;
};

// Q is required for focusing verdicts (throws MissingGroundState).
ClassificationVerdict classify_initial_data(const EvolutionState& state,
                                            const Nonlinearity& nl,
                                            const GroundState* Q = nullptr);

struct CauchyReport {
    struct Entry {
        double T = 0;
        double delta = 0;  // max H1 distance of w = S(-t)u(t) over [T, 2T]
        int pairs = 0;
    };
    std::vector<Entry> entries;
    bool decreasing = false;  // scattering-consistent at the largest horizon
    std::string to_json() const;
};
CauchyReport scattering_profile_cauchy(const Trajectory& traj,
                                       const std::vector<double>& T_list);

struct InequalityReport {
    struct Entry {
        double lhs = 0, rhs = 0, ratio = 0;
        bool evaluated = false;
        std::string note;  // "zero field", "gradient constraint violated", ...
    };
    std::vector<Entry> entries;
    double max_ratio = 0;
    int evaluated = 0, rejected = 0, skipped = 0;
    std::string to_json() const;
};

// Sharp Gagliardo-Nirenberg: ratio of int|g|^{p+2} against
// C_gn ||g||_2^2 ||grad g||_2^p with C_gn from the ground state; the
// ratio is 1 at Q itself.
InequalityReport gn_audit(const std::vector<RadialField>& fields, double p,
                          const GroundState& Q);

// Trudinger-Moser: LHS = int (e^{kappa0 |phi|^2} - 1)^a dx, RHS =
// ||phi||_2^2 / (4 pi/(a kappa0) - ||grad phi||_2^2); fields violating
// kappa0 ||grad phi||_2^2 < 4 pi / a are rejected, not evaluated.
InequalityReport tm_audit(const std::vector<RadialField>& fields, double a,
                          double kappa0 = 1.0);
// Single-field version; throws HypothesisViolation on the constraint.
double tm_ratio(const RadialField& phi, double a, double kappa0 = 1.0);

// max_r |u(r)| r^{1/2} / (||u||_2^{1/2} ||grad u||_2^{1/2}) per field.
InequalityReport radial_sobolev_audit(const std::vector<RadialField>& fields);

// Deterministic smooth random radial fields (sums of signed Gaussians).
std::vector<RadialField> random_field_family(const GridPtr& grid, int count,
                                             unsigned seed);

// Random fields rescaled below the threshold: J^(1)(u) < m.
std::vector<RadialField> random_below_threshold_family(const GridPtr& grid, int count,
                                                       unsigned seed,
                                                       const Nonlinearity& nl,
                                                       const GroundState& Q);

// 20-member Gaussian/Moser family scaled under the TM gradient constraint.
std::vector<RadialField> tm_test_family(const GridPtr& grid, int count, double a,
                                        double kappa0 = 1.0);

// Every radial-field file in a directory (sorted by name; .json sidecars
// are skipped).
std::vector<RadialField> load_field_family(const std::filesystem::path& dir);

}  // namespace rnls
