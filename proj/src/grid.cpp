#include "rnls/grid.hpp"

#include <boost/math/special_functions/bessel.hpp>
#include <cmath>
#include <cstring>
#include <map>
#include <mutex>
#include <numbers>
#include <tuple>

namespace rnls {

namespace {

constexpr double kPi = std::numbers::pi;

double bessel_j(int nu, double x) { return boost::math::cyl_bessel_j(nu, x); }

std::vector<double> bessel_j0_zeros(int count) {
    std::vector<double> z(count);
    for (int i = 0; i < count; ++i)
        z[i] = boost::math::cyl_bessel_j_zero(0.0, i + 1);
    return z;
}

using CacheKey = std::tuple<int, int, std::int64_t>;

CacheKey cache_key(double r_max, int n, GridKind kind) {
    std::int64_t bits;
    std::memcpy(&bits, &r_max, sizeof(bits));
    return {static_cast<int>(kind), n, bits};
}

std::mutex g_cache_mutex;
std::map<CacheKey, GridPtr>& grid_cache() {
    static std::map<CacheKey, GridPtr> cache;
    return cache;
}

}  // namespace

GridPtr RadialGrid::make(double r_max, int n, GridKind kind) {
    if (!(r_max > 0))
        throw std::invalid_argument("make_grid: r_max must be positive");
    if (n < 16)
        throw std::invalid_argument("make_grid: need at least 16 nodes");

    {
        std::lock_guard<std::mutex> lock(g_cache_mutex);
        auto it = grid_cache().find(cache_key(r_max, n, kind));
        if (it != grid_cache().end()) return it->second;
    }

    auto grid = std::shared_ptr<RadialGrid>(new RadialGrid());
    grid->r_max_ = r_max;
    grid->n_ = n;
    grid->kind_ = kind;
    grid->nodes_.resize(n);
    grid->weights_.resize(n);

    if (kind == GridKind::UniformTrapezoid) {
        // Trapezoid rule for int g r dr on [0, r_max]; the r=0 endpoint
        // carries zero integrand weight, so nodes start at h.
        const double h = r_max / n;
        for (int j = 0; j < n; ++j) {
            const double r = (j + 1) * h;
            grid->nodes_[j] = r;
            grid->weights_[j] = 2 * kPi * h * r * (j + 1 == n ? 0.5 : 1.0);
        }
    } else {
        auto zeros = bessel_j0_zeros(n + 1);
        const double S = zeros[n];
        const double K = S / r_max;

        auto ops = std::make_shared<SpectralOps>();
        ops->k.resize(n);
        ops->sqrt_w.resize(n);
        ops->inv_sqrt_w.resize(n);
        ops->sqrt_v.resize(n);
        ops->k_max = K;

        Eigen::VectorXd j1(n);
        for (int j = 0; j < n; ++j) {
            const double a = zeros[j];
            j1[j] = std::abs(bessel_j(1, a));
            grid->nodes_[j] = a * r_max / S;
            const double w = 4 * kPi * r_max * r_max / (S * S * j1[j] * j1[j]);
            grid->weights_[j] = w;
            ops->k[j] = a / r_max;
            ops->sqrt_w[j] = std::sqrt(w);
            ops->inv_sqrt_w[j] = 1.0 / ops->sqrt_w[j];
            // k-side quadrature weight over 2*pi: v_m = K^2 / (pi S^2 J1^2)
            ops->sqrt_v[j] = K / (std::sqrt(kPi) * S * j1[j]);
        }

        // Symmetric QDHT matrix, then nearest orthogonal involution.
        Eigen::MatrixXd M(n, n);
        for (int m = 0; m < n; ++m)
            for (int j = 0; j <= m; ++j) {
                const double val = 2.0 / S * bessel_j(0, zeros[m] * zeros[j] / S) / (j1[m] * j1[j]);
                M(m, j) = val;
                M(j, m) = val;
            }
        // Newton-Schulz polar iteration O <- (3O - O^3)/2. M is within
        // ~1e-11 of orthogonal, so this converges in a couple of sweeps;
        // unlike an eigendecomposition it has no trouble with the two
        // massively degenerate (+-1) eigenspaces.
        ops->O = M;
        double gap = (M * M - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff();
        for (int it = 0; it < 8 && gap > 1e-14; ++it) {
            ops->O = 0.5 * (3 * ops->O - ops->O * ops->O * ops->O);
            gap = (ops->O * ops->O - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff();
        }
        if (gap > 1e-10 || (ops->O - M).cwiseAbs().maxCoeff() > 1e-6)
            throw std::runtime_error(
                "orthogonal projection of the Hankel matrix failed (n = " +
                std::to_string(n) + ")");

        // u'(r_j) = -sum_m k_m J1(k_m r_j) sqrt(v_m) c_m,  c = O W^{1/2} u
        Eigen::MatrixXd B(n, n);
        for (int j = 0; j < n; ++j)
            for (int m = 0; m < n; ++m)
                B(j, m) = -ops->k[m] * bessel_j(1, ops->k[m] * grid->nodes_[j]) * ops->sqrt_v[m];
        ops->deriv = B * ops->O * ops->sqrt_w.asDiagonal();

        grid->ops_ = std::move(ops);
    }

    GridPtr result = grid;
    std::lock_guard<std::mutex> lock(g_cache_mutex);
    grid_cache().emplace(cache_key(r_max, n, kind), result);
    return result;
}

const RadialGrid::SpectralOps& RadialGrid::ops() const {
    if (!ops_)
        throw UnsupportedGrid("operation requires a gauss-bessel grid");
    return *ops_;
}

const Eigen::VectorXd& RadialGrid::wavenumbers() const { return ops().k; }
double RadialGrid::k_max() const { return ops().k_max; }
const Eigen::MatrixXd& RadialGrid::transform_matrix() const { return ops().O; }
const Eigen::VectorXd& RadialGrid::sqrt_weights() const { return ops().sqrt_w; }
const Eigen::VectorXd& RadialGrid::inv_sqrt_weights() const { return ops().inv_sqrt_w; }
const Eigen::VectorXd& RadialGrid::sqrt_spectral_weights() const { return ops().sqrt_v; }
const Eigen::MatrixXd& RadialGrid::derivative_matrix() const { return ops().deriv; }

GridPtr RadialGrid::companion() const {
    return make(ops().k_max, n_, GridKind::GaussBessel);
}

GridPtr make_grid(double r_max, int n, GridKind kind) {
    return RadialGrid::make(r_max, n, kind);
}

RadialField::RadialField(GridPtr grid, Eigen::VectorXcd values)
    : grid_(std::move(grid)), values_(std::move(values)) {
    if (values_.size() != grid_->n())
        throw std::invalid_argument("RadialField: value count does not match grid");
}

RadialField RadialField::from_function(const GridPtr& grid,
                                       const std::function<std::complex<double>(double)>& f) {
    Eigen::VectorXcd v(grid->n());
    for (int j = 0; j < grid->n(); ++j) v[j] = f(grid->nodes()[j]);
    return RadialField(grid, std::move(v));
}

RadialField RadialField::from_real_function(const GridPtr& grid,
                                            const std::function<double(double)>& f) {
    return from_function(grid, [&](double r) { return std::complex<double>(f(r), 0.0); });
}

void RadialField::check_finite() const {
    for (int j = 0; j < values_.size(); ++j)
        if (!std::isfinite(values_[j].real()) || !std::isfinite(values_[j].imag()))
            throw InvalidField("field contains NaN/Inf at node " + std::to_string(j));
}

double integrate(const RadialField& g) {
    g.check_finite();
    return g.grid()->weights().dot(g.values().real().matrix());
}

double integrate_samples(const RadialGrid& grid, const Eigen::VectorXd& g) {
    if (g.size() != grid.n())
        throw std::invalid_argument("integrate_samples: size mismatch");
    if (!g.allFinite()) throw InvalidField("integrand contains NaN/Inf");
    return grid.weights().dot(g);
}

namespace {

// Apply real matrix to complex vector.
Eigen::VectorXcd apply_real(const Eigen::MatrixXd& M, const Eigen::VectorXcd& x) {
    Eigen::VectorXd re = M * x.real().matrix();
    Eigen::VectorXd im = M * x.imag().matrix();
    Eigen::VectorXcd out(re.size());
    out.real() = re;
    out.imag() = im;
    return out;
}

}  // namespace

RadialField laplacian(const RadialField& u) {
    const auto& grid = *u.grid();
    u.check_finite();

    if (grid.spectral()) {
        const auto& O = grid.transform_matrix();
        Eigen::VectorXcd y(u.size());
        y.real() = grid.sqrt_weights().cwiseProduct(u.values().real().matrix());
        y.imag() = grid.sqrt_weights().cwiseProduct(u.values().imag().matrix());
        Eigen::VectorXcd c = apply_real(O, y);
        const auto& k = grid.wavenumbers();
        for (int m = 0; m < c.size(); ++m) c[m] *= -k[m] * k[m];
        Eigen::VectorXcd out = apply_real(O, c);
        out.real() = grid.inv_sqrt_weights().cwiseProduct(out.real().matrix());
        out.imag() = grid.inv_sqrt_weights().cwiseProduct(out.imag().matrix());
        return RadialField(u.grid(), std::move(out));
    }

    // Second-order finite differences with even extension across r=0 and
    // decay (zero) extension past r_max.
    const int n = grid.n();
    const double h = grid.r_max() / n;
    const auto& v = u.values();
    const auto& r = grid.nodes();
    Eigen::VectorXcd out(n);
    auto at = [&](int j) -> std::complex<double> {
        if (j < 0) return (4.0 * v[0] - v[1]) / 3.0;  // value at r=0, u'(0)=0
        if (j >= n) return 0.0;
        return v[j];
    };
    for (int j = 0; j < n; ++j) {
        const std::complex<double> um = at(j - 1), u0 = v[j], up = at(j + 1);
        out[j] = (up - 2.0 * u0 + um) / (h * h) + (up - um) / (2.0 * h * r[j]);
    }
    return RadialField(u.grid(), std::move(out));
}

RadialField radial_derivative(const RadialField& u) {
    const auto& grid = *u.grid();
    u.check_finite();

    if (grid.spectral())
        return RadialField(u.grid(), apply_real(grid.derivative_matrix(), u.values()));

    const int n = grid.n();
    const double h = grid.r_max() / n;
    const auto& v = u.values();
    Eigen::VectorXcd out(n);
    auto at = [&](int j) -> std::complex<double> {
        if (j < 0) return (4.0 * v[0] - v[1]) / 3.0;
        if (j >= n) return 0.0;
        return v[j];
    };
    for (int j = 0; j < n; ++j) out[j] = (at(j + 1) - at(j - 1)) / (2.0 * h);
    return RadialField(u.grid(), std::move(out));
}

H1Norms h1_norms(const RadialField& u) {
    u.check_finite();
    const auto& w = u.grid()->weights();
    H1Norms norms;
    norms.mass_sq = w.dot(u.values().cwiseAbs2().matrix());
    RadialField du = radial_derivative(u);
    norms.grad_sq = w.dot(du.values().cwiseAbs2().matrix());
    return norms;
}

RadialField hankel_transform(const RadialField& u, HankelDirection dir) {
    const auto& grid = *u.grid();
    if (!grid.spectral())
        throw UnsupportedGrid("hankel_transform requires a gauss-bessel grid");
    u.check_finite();

    const auto& O = grid.transform_matrix();
    GridPtr out_grid = grid.companion();

    // Forward from the input grid; the inverse is the same map scaled by
    // 1/(2 pi)^2 (2D Fourier inversion applied on the frequency grid).
    Eigen::VectorXcd y(u.size());
    y.real() = grid.sqrt_weights().cwiseProduct(u.values().real().matrix());
    y.imag() = grid.sqrt_weights().cwiseProduct(u.values().imag().matrix());
    Eigen::VectorXcd c = apply_real(O, y);
    const double scale = dir == HankelDirection::Forward
                             ? 1.0
                             : 1.0 / (4 * kPi * kPi);
    for (int m = 0; m < c.size(); ++m)
        c[m] *= scale / grid.sqrt_spectral_weights()[m];
    return RadialField(std::move(out_grid), std::move(c));
}

std::complex<double> value_at_origin(const RadialField& u) {
    const auto& grid = *u.grid();
    if (grid.spectral()) {
        // u(0) = sum_m v_m u^(k_m), J0(0) = 1
        RadialField uh = hankel_transform(u, HankelDirection::Forward);
        const auto& sv = grid.sqrt_spectral_weights();
        std::complex<double> acc = 0;
        for (int m = 0; m < uh.size(); ++m) acc += sv[m] * sv[m] * uh.values()[m];
        return acc;
    }
    // Quadratic even extrapolation from the first two nodes.
    const auto& r = grid.nodes();
    const auto& v = u.values();
    const double r1 = r[0] * r[0], r2 = r[1] * r[1];
    return (v[0] * r2 - v[1] * r1) / (r2 - r1);
}

double sup_norm(const RadialField& u) {
    double m = u.values().cwiseAbs().maxCoeff();
    return std::max(m, std::abs(value_at_origin(u)));
}

RadialField resample(const RadialField& u, const GridPtr& target) {
    const auto& src = *u.grid();
    const int n = src.n();
    const auto& r = src.nodes();
    const auto& v = u.values();
    constexpr int kStencil = 8;

    Eigen::VectorXcd out(target->n());
    for (int i = 0; i < target->n(); ++i) {
        const double x = target->nodes()[i];
        // Nearest source index.
        int lo = static_cast<int>(std::lower_bound(r.data(), r.data() + n, x) - r.data());
        int start = std::clamp(lo - kStencil / 2, -kStencil / 2, n - kStencil);
        // Collect stencil nodes, mirroring across r=0 as needed.
        double xs[kStencil];
        std::complex<double> ys[kStencil];
        for (int s = 0; s < kStencil; ++s) {
            int j = start + s;
            if (j < 0) {
                xs[s] = -r[-j - 1];
                ys[s] = v[-j - 1];
            } else {
                xs[s] = r[j];
                ys[s] = v[j];
            }
        }
        // Lagrange interpolation.
        std::complex<double> acc = 0;
        for (int s = 0; s < kStencil; ++s) {
            double l = 1;
            for (int t = 0; t < kStencil; ++t)
                if (t != s) l *= (x - xs[t]) / (xs[s] - xs[t]);
            acc += l * ys[s];
        }
        out[i] = acc;
    }
    return RadialField(target, std::move(out));
}

double boundary_mass_fraction(const RadialField& u, double frac) {
    const auto& grid = *u.grid();
    const auto& w = grid.weights();
    const double cut = frac * grid.r_max();
    double total = 0, outer = 0;
    for (int j = 0; j < grid.n(); ++j) {
        const double m = w[j] * std::norm(u.values()[j]);
        total += m;
        if (grid.nodes()[j] >= cut) outer += m;
    }
    return total > 0 ? outer / total : 0.0;
}

}  // namespace rnls
