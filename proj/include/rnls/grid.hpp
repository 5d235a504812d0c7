#pragma once

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <memory>

#include "rnls/errors.hpp"

namespace rnls {

enum class GridKind { UniformTrapezoid, GaussBessel };

class RadialGrid;
using GridPtr = std::shared_ptr<const RadialGrid>;

// Radial quadrature grid on (0, r_max] for functions on R^2.
// Weights satisfy sum_j w_j g(r_j) ~ 2*pi * int_0^rmax g(r) r dr.
//
// The gauss-bessel grid places nodes at scaled J0 zeros. Its transform
// matrix is the symmetric quasi-discrete Hankel transform matrix,
// projected onto the nearest orthogonal involution (eigenvalue signs of
// the symmetric matrix). This makes forward/inverse exact inverses of
// each other and the spectral propagators exactly unitary with respect
// to the quadrature inner product.
class RadialGrid : public std::enable_shared_from_this<RadialGrid> {
public:
    // Cached factory: identical (r_max, n, kind) return the same object.
    static GridPtr make(double r_max, int n, GridKind kind);

    double r_max() const { return r_max_; }
    int n() const { return n_; }
    GridKind kind() const { return kind_; }

    const Eigen::VectorXd& nodes() const { return nodes_; }
    const Eigen::VectorXd& weights() const { return weights_; }

    bool spectral() const { return kind_ == GridKind::GaussBessel; }

    // Spectral data; throw UnsupportedGrid on uniform grids.
    const Eigen::VectorXd& wavenumbers() const;          // k_m = alpha_m / r_max
    double k_max() const;                                // alpha_{n+1} / r_max
    const Eigen::MatrixXd& transform_matrix() const;     // orthogonal involution O
    const Eigen::VectorXd& sqrt_weights() const;
    const Eigen::VectorXd& inv_sqrt_weights() const;
    const Eigen::VectorXd& sqrt_spectral_weights() const;
    const Eigen::MatrixXd& derivative_matrix() const;    // u(r_j) -> u'(r_j)

    // Grid of the conjugate (frequency) domain: gauss-bessel with
    // r_max = k_max and the same node count.
    GridPtr companion() const;

private:
    RadialGrid() = default;
    struct SpectralOps;

    double r_max_ = 0;
    int n_ = 0;
    GridKind kind_ = GridKind::UniformTrapezoid;
    Eigen::VectorXd nodes_, weights_;
    std::shared_ptr<SpectralOps> ops_;

    const SpectralOps& ops() const;
};

struct RadialGrid::SpectralOps {
    Eigen::VectorXd k;          // wavenumbers
    double k_max = 0;
    Eigen::VectorXd sqrt_w, inv_sqrt_w, sqrt_v;
    Eigen::MatrixXd O;          // symmetric orthogonal involution
    Eigen::MatrixXd deriv;      // full derivative matrix
};

// Complex radial profile sampled on a grid.
class RadialField {
public:
    explicit RadialField(GridPtr grid)
        : grid_(std::move(grid)), values_(Eigen::VectorXcd::Zero(grid_->n())) {}

    RadialField(GridPtr grid, Eigen::VectorXcd values);

    static RadialField from_function(const GridPtr& grid,
                                     const std::function<std::complex<double>(double)>& f);
    static RadialField from_real_function(const GridPtr& grid,
                                          const std::function<double(double)>& f);

    const GridPtr& grid() const { return grid_; }
    const Eigen::VectorXcd& values() const { return values_; }
    Eigen::VectorXcd& values() { return values_; }
    int size() const { return static_cast<int>(values_.size()); }

    void check_finite() const;  // throws InvalidField on NaN/Inf

private:
    GridPtr grid_;
    Eigen::VectorXcd values_;
};

GridPtr make_grid(double r_max, int n, GridKind kind);

// 2*pi * int g(r) r dr by grid weights; uses the real part.
double integrate(const RadialField& g);
double integrate_samples(const RadialGrid& grid, const Eigen::VectorXd& g);

RadialField laplacian(const RadialField& u);
RadialField radial_derivative(const RadialField& u);

struct H1Norms {
    double mass_sq = 0;  // int |u|^2 dx
    double grad_sq = 0;  // int |d_r u|^2 dx
};
H1Norms h1_norms(const RadialField& u);

enum class HankelDirection { Forward, Inverse };

// Order-zero Hankel pair, forward u^(k) = 2*pi int u(r) J0(kr) r dr.
// The result lives on the companion (frequency) grid.
RadialField hankel_transform(const RadialField& u, HankelDirection dir);

std::complex<double> value_at_origin(const RadialField& u);
double sup_norm(const RadialField& u);

// Barycentric local-stencil interpolation onto another grid. Even
// extension across r=0; error O(h^stencil) away from r_max, degrades to
// one-sided interpolation near the boundary.
RadialField resample(const RadialField& u, const GridPtr& target);

// Fraction of |u|^2 mass in r >= frac * r_max (boundary contamination probe).
double boundary_mass_fraction(const RadialField& u, double frac);

}  // namespace rnls
