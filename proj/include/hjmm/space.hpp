#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace hjmm {

// Parameters of the weighted space L^p_nu: weight e^{nu x}, integrability
// index p >= 2 and its conjugate q with 1/p + 1/q = 1.
struct SpaceParams {
    double nu = 1.0;
    double p = 2.0;

    double q() const { return p / (p - 1.0); }
    void validate() const;  // throws std::invalid_argument
};

// Uniform grid on the truncated maturity axis [0, x_max] with n_cells + 1
// nodes, carrying the quadrature weights of the space.
//
// weight_w are product-trapezoid weights: w_i = \int phi_i(x) e^{nu x} dx for
// the hat function phi_i, so sum_i w_i equals \int_0^{x_max} e^{nu x} dx to
// machine precision and sum_i w_i |f_i|^p integrates the piecewise-linear
// interpolant of |f|^p exactly. trapz_w are the plain trapezoid weights used
// for unweighted integrals.
class Grid {
public:
    Grid(double x_max, std::size_t n_cells, SpaceParams params);

    double x_max() const { return x_max_; }
    std::size_t n_cells() const { return n_cells_; }
    std::size_t n_nodes() const { return n_cells_ + 1; }
    double h() const { return h_; }
    const SpaceParams& params() const { return params_; }

    std::span<const double> nodes() const { return nodes_; }
    std::span<const double> weight_w() const { return weight_w_; }
    std::span<const double> trapz_w() const { return trapz_w_; }

    double node(std::size_t i) const { return nodes_[i]; }
    // \int_0^{x_max} e^{nu x} dx, closed form.
    double weight_integral() const;

private:
    double x_max_;
    std::size_t n_cells_;
    double h_;
    SpaceParams params_;
    std::vector<double> nodes_;
    std::vector<double> weight_w_;
    std::vector<double> trapz_w_;
};

using GridPtr = std::shared_ptr<const Grid>;

GridPtr make_grid(double x_max, std::size_t n_cells, SpaceParams params);
// Default truncation 40/nu per the decay class representable under e^{nu x}.
double default_x_max(const SpaceParams& params);

// A forward curve (or any f in L^p_nu) sampled at the grid nodes.
struct Curve {
    GridPtr grid;
    std::vector<double> values;

    Curve() = default;
    // Validates: grid set, size n_nodes, all values finite (throws otherwise).
    Curve(GridPtr g, std::vector<double> v);

    std::size_t size() const { return values.size(); }
    double operator[](std::size_t i) const { return values[i]; }
    double& operator[](std::size_t i) { return values[i]; }
};

// Sample a scalar function of x on the grid.
template <typename F>
Curve sample_curve(const GridPtr& grid, F&& f) {
    std::vector<double> v(grid->n_nodes());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = f(grid->node(i));
    return Curve(grid, std::move(v));
}

// ||f||_{nu,p} = (\int |f|^p e^{nu x} dx)^{1/p} on the grid quadrature.
double lp_nu_norm(const Curve& f);
// Same norm for raw node values on a given grid (no Curve validation).
double lp_nu_norm(const Grid& grid, std::span<const double> values);

// Unweighted \int |f| dx by plain trapezoid.
double l1_norm(const Curve& f);

// Embedding constant of Prop-type L^p_nu -> L^1 bound: (p/(nu q))^{1/q}.
double embedding_bound(const SpaceParams& params);

// Discrete first weak derivative: central differences inside, one-sided
// second-order stencils at the boundary. Exact for linear functions.
Curve weak_derivative(const Curve& f);

// ||f||_W = ||f||_{nu,p} + ||Df||_{nu,p}.
double w1p_nu_norm(const Curve& f);

// max_i e^{nu x_i} |f(x_i)|^p and max_i |f(x_i)|.
double sup_weighted(const Curve& f);
double sup_abs(const Curve& f);

// Packaging constant for the sup bound: sup e^{nu x}|f|^p <= C^p ||f||_W^p
// with C = (p - 1 + nu)^{1/p} (read off the additive proof bound; not sharp).
double sup_embedding_constant(const SpaceParams& params);

// Tail-negligibility diagnostic: |f(x_N)|^p e^{nu x_N} h / ||f||^p_{nu,p}.
// A ratio above tail_tol means the truncation at x_max is visibly lossy.
double tail_ratio(const Curve& f);
inline constexpr double kTailTol = 1e-4;
bool tail_negligible(const Curve& f, double tail_tol = kTailTol);

// Elementwise helpers used throughout (allocate a result curve).
Curve curve_sub(const Curve& a, const Curve& b);
Curve curve_scaled(const Curve& a, double c);

class PhiloxStream;

// Random curve in the representable decay class: a few modulated exponentials
// with decay rates strictly above nu/p, so both f and Df lie in L^p_nu.
Curve random_decaying_curve(const GridPtr& grid, PhiloxStream& rng);

}  // namespace hjmm
