#include "hjmm/space.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "hjmm/kernels.hpp"
#include "hjmm/noise.hpp"

namespace hjmm {

void SpaceParams::validate() const {
    if (!(nu > 0.0)) throw std::invalid_argument("SpaceParams: nu must be > 0");
    if (!(p >= 2.0)) throw std::invalid_argument("SpaceParams: p must be >= 2");
}

namespace {

// \int_0^h (s/h) e^{nu s} ds and \int_0^h (1 - s/h) e^{nu s} ds, series-stable
// for small nu*h.
void cell_moments(double nu, double h, double& toward_right, double& toward_left) {
    const double u = nu * h;
    if (std::fabs(u) < 1e-5) {
        toward_right = h * (0.5 + u / 3.0 + u * u / 8.0 + u * u * u / 30.0);
        toward_left = h * (0.5 + u / 6.0 + u * u / 24.0 + u * u * u / 120.0);
        return;
    }
    const double em1 = std::expm1(u);
    toward_right = (std::exp(u) - em1 / u) / nu;
    toward_left = (em1 * (1.0 + 1.0 / u) - std::exp(u)) / nu;
}

}  // namespace

Grid::Grid(double x_max, std::size_t n_cells, SpaceParams params)
    : x_max_(x_max), n_cells_(n_cells), params_(params) {
    params_.validate();
    if (!(x_max > 0.0)) throw std::invalid_argument("Grid: x_max must be > 0");
    if (n_cells < 2) throw std::invalid_argument("Grid: n_cells must be >= 2");
    h_ = x_max_ / static_cast<double>(n_cells_);

    const std::size_t n = n_cells_ + 1;
    nodes_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        nodes_[i] = (i == n_cells_) ? x_max_ : h_ * static_cast<double>(i);
    }

    trapz_w_.assign(n, h_);
    trapz_w_.front() = 0.5 * h_;
    trapz_w_.back() = 0.5 * h_;

    weight_w_.assign(n, 0.0);
    double right = 0.0;
    double left = 0.0;
    cell_moments(params_.nu, h_, right, left);
    for (std::size_t c = 0; c < n_cells_; ++c) {
        const double scale = std::exp(params_.nu * nodes_[c]);
        weight_w_[c] += scale * left;
        weight_w_[c + 1] += scale * right;
    }
}

double Grid::weight_integral() const {
    return std::expm1(params_.nu * x_max_) / params_.nu;
}

GridPtr make_grid(double x_max, std::size_t n_cells, SpaceParams params) {
    return std::make_shared<Grid>(x_max, n_cells, params);
}

double default_x_max(const SpaceParams& params) { return 40.0 / params.nu; }

Curve::Curve(GridPtr g, std::vector<double> v) : grid(std::move(g)), values(std::move(v)) {
    if (!grid) throw std::invalid_argument("Curve: null grid");
    if (values.size() != grid->n_nodes()) {
        throw std::invalid_argument("Curve: value count does not match grid");
    }
    for (double x : values) {
        if (!std::isfinite(x)) throw std::invalid_argument("Curve: non-finite value");
    }
}

double lp_nu_norm(const Grid& grid, std::span<const double> values) {
    const double p = grid.params().p;
    const double s = kernels::wsum_abs_pow(grid.weight_w(), values, p);
    return std::pow(s, 1.0 / p);
}

double lp_nu_norm(const Curve& f) { return lp_nu_norm(*f.grid, f.values); }

double l1_norm(const Curve& f) {
    double acc = 0.0;
    const auto w = f.grid->trapz_w();
    for (std::size_t i = 0; i < f.size(); ++i) acc += w[i] * std::fabs(f.values[i]);
    return acc;
}

double embedding_bound(const SpaceParams& params) {
    const double q = params.q();
    return std::pow(params.p / (params.nu * q), 1.0 / q);
}

Curve weak_derivative(const Curve& f) {
    const Grid& g = *f.grid;
    const std::size_t n = f.size();
    const double inv2h = 1.0 / (2.0 * g.h());
    std::vector<double> d(n);
    d[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) * inv2h;
    for (std::size_t i = 1; i + 1 < n; ++i) d[i] = (f[i + 1] - f[i - 1]) * inv2h;
    d[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) * inv2h;
    return Curve(f.grid, std::move(d));
}

double w1p_nu_norm(const Curve& f) { return lp_nu_norm(f) + lp_nu_norm(weak_derivative(f)); }

double sup_weighted(const Curve& f) {
    const Grid& g = *f.grid;
    const double nu = g.params().nu;
    const double p = g.params().p;
    double m = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        m = std::max(m, std::exp(nu * g.node(i)) * std::pow(std::fabs(f[i]), p));
    }
    return m;
}

double sup_abs(const Curve& f) { return kernels::max_abs(f.values); }

double sup_embedding_constant(const SpaceParams& params) {
    return std::pow(params.p - 1.0 + params.nu, 1.0 / params.p);
}

double tail_ratio(const Curve& f) {
    const Grid& g = *f.grid;
    const double p = g.params().p;
    const double norm = lp_nu_norm(f);
    if (norm == 0.0) return 0.0;
    const double tail =
        std::pow(std::fabs(f.values.back()), p) * std::exp(g.params().nu * g.x_max()) * g.h();
    return tail / std::pow(norm, p);
}

bool tail_negligible(const Curve& f, double tail_tol) { return tail_ratio(f) <= tail_tol; }

Curve curve_sub(const Curve& a, const Curve& b) {
    std::vector<double> v(a.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = a[i] - b[i];
    return Curve(a.grid, std::move(v));
}

Curve curve_scaled(const Curve& a, double c) {
    std::vector<double> v(a.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = c * a[i];
    return Curve(a.grid, std::move(v));
}

Curve random_decaying_curve(const GridPtr& grid, PhiloxStream& rng) {
    const SpaceParams& sp = grid->params();
    const double base_rate = sp.nu / sp.p;
    const int terms = 1 + static_cast<int>(rng.uniform() * 3.0);
    std::vector<double> v(grid->n_nodes(), 0.0);
    for (int k = 0; k < terms; ++k) {
        const double c = 4.0 * (rng.uniform() - 0.5);
        const double a = base_rate + 0.2 + 1.8 * rng.uniform();
        const double b = 3.0 * rng.uniform();
        const double phase = 6.283185307179586 * rng.uniform();
        for (std::size_t i = 0; i < v.size(); ++i) {
            const double x = grid->node(i);
            v[i] += c * std::exp(-a * x) * std::cos(b * x + phase);
        }
    }
    return Curve(grid, std::move(v));
}

}  // namespace hjmm
