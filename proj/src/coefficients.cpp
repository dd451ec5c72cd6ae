#include "hjmm/coefficients.hpp"

#include <cmath>
#include <stdexcept>

#include "hjmm/kernels.hpp"
#include "hjmm/noise.hpp"

namespace hjmm {

SaturationInfo saturation_info(Saturation s) {
    switch (s) {
        case Saturation::one:
            return {1.0, 0.0, 0.0};
        case Saturation::tanh_sat:
            // max|tanh''| = 4/(3 sqrt 3)
            return {1.0, 1.0, 0.7698003589195010};
        case Saturation::rational:
            // s = u/(1+u^2); max|s''| slightly below 1.4572 (padded upper bound)
            return {0.5, 1.0, 1.4572};
    }
    return {1.0, 0.0, 0.0};
}

double saturation_eval(Saturation s, double u) {
    switch (s) {
        case Saturation::one:
            return 1.0;
        case Saturation::tanh_sat:
            return std::tanh(u);
        case Saturation::rational:
            return u / (1.0 + u * u);
    }
    return 1.0;
}

double saturation_deriv(Saturation s, double u) {
    switch (s) {
        case Saturation::one:
            return 0.0;
        case Saturation::tanh_sat: {
            const double c = std::cosh(u);
            return 1.0 / (c * c);
        }
        case Saturation::rational: {
            const double d = 1.0 + u * u;
            return (1.0 - u * u) / (d * d);
        }
    }
    return 0.0;
}

VolatilitySpec VolatilitySpec::exponential(GridPtr grid, double sigma, double lambda,
                                           Saturation sat) {
    return vector_exponential(std::move(grid), {ExpFactor{sigma, lambda, sat}});
}

VolatilitySpec VolatilitySpec::vector_exponential(GridPtr grid, std::vector<ExpFactor> factors) {
    if (factors.empty()) throw std::invalid_argument("vector_exponential: no factors");
    for (const auto& f : factors) {
        if (!(f.sigma >= 0.0) || !(f.lambda > 0.0)) {
            throw std::invalid_argument("vector_exponential: need sigma >= 0, lambda > 0");
        }
    }
    VolatilitySpec spec;
    spec.grid_ = std::move(grid);
    spec.dim_h_ = factors.size();
    spec.factors_ = std::move(factors);
    spec.time_dependent_ = false;

    const std::size_t n = spec.grid_->n_nodes();
    spec.base_.resize(spec.dim_h_);
    std::vector<double> bar(n, 0.0), hat(n, 0.0), dbar(n, 0.0), dhat(n, 0.0);
    double k1 = 0.0, k2 = 0.0;
    for (std::size_t j = 0; j < spec.dim_h_; ++j) {
        const ExpFactor& fac = spec.factors_[j];
        const SaturationInfo info = saturation_info(fac.sat);
        auto& row = spec.base_[j];
        row.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double e = fac.sigma * std::exp(-fac.lambda * spec.grid_->node(i));
            row[i] = e;
            bar[i] += info.sup * e;
            hat[i] += info.lip * e;
            dbar[i] += -fac.lambda * info.sup * e;
            dhat[i] += -fac.lambda * info.lip * e;
        }
        k1 += fac.sigma * info.lip;
        k2 += fac.sigma * info.lip_deriv;
    }
    spec.g_bar_ = Curve(spec.grid_, std::move(bar));
    spec.g_hat_ = Curve(spec.grid_, std::move(hat));
    spec.dg_bar_ = Curve(spec.grid_, std::move(dbar));
    spec.dg_hat_ = Curve(spec.grid_, std::move(dhat));
    spec.k1_ = k1;
    spec.k2_ = k2;
    spec.finalize();
    return spec;
}

VolatilitySpec VolatilitySpec::custom(GridPtr grid, std::size_t dim_h, PointFn g, Curve g_bar,
                                      Curve g_hat, double k1, double k2, bool time_dependent) {
    VolatilitySpec spec;
    spec.grid_ = std::move(grid);
    spec.dim_h_ = dim_h;
    spec.point_fn_ = std::move(g);
    spec.g_bar_ = std::move(g_bar);
    spec.g_hat_ = std::move(g_hat);
    spec.dg_bar_ = weak_derivative(spec.g_bar_);
    spec.dg_hat_ = weak_derivative(spec.g_hat_);
    spec.k1_ = k1;
    spec.k2_ = k2;
    spec.time_dependent_ = time_dependent;
    spec.finalize();
    return spec;
}

void VolatilitySpec::finalize() {
    g_bar_norm_ = lp_nu_norm(g_bar_);
    dg_bar_norm_ = lp_nu_norm(dg_bar_);
    g_bar_w1p_norm_ = g_bar_norm_ + dg_bar_norm_;
    g_hat_sup_ = sup_abs(g_hat_);
}

void VolatilitySpec::eval(double t, std::span<const double> u, CoeffRows& rows) const {
    const std::size_t n = grid_->n_nodes();
    rows.resize(dim_h_);
    if (!factors_.empty()) {
        for (std::size_t j = 0; j < dim_h_; ++j) {
            rows[j].resize(n);
            const auto& base = base_[j];
            const Saturation sat = factors_[j].sat;
            if (sat == Saturation::one) {
                rows[j].assign(base.begin(), base.end());
            } else {
                for (std::size_t i = 0; i < n; ++i) {
                    rows[j][i] = base[i] * saturation_eval(sat, u[i]);
                }
            }
        }
        return;
    }
    for (std::size_t j = 0; j < dim_h_; ++j) rows[j].resize(n);
    std::vector<double> out(dim_h_);
    for (std::size_t i = 0; i < n; ++i) {
        point_fn_(t, grid_->node(i), u[i], out);
        for (std::size_t j = 0; j < dim_h_; ++j) rows[j][i] = out[j];
    }
}

void VolatilitySpec::eval_dx(double t, std::span<const double> u, CoeffRows& rows) const {
    const std::size_t n = grid_->n_nodes();
    rows.resize(dim_h_);
    if (!factors_.empty()) {
        for (std::size_t j = 0; j < dim_h_; ++j) {
            rows[j].resize(n);
            const auto& base = base_[j];
            const double lambda = factors_[j].lambda;
            const Saturation sat = factors_[j].sat;
            for (std::size_t i = 0; i < n; ++i) {
                rows[j][i] = -lambda * base[i] * saturation_eval(sat, u[i]);
            }
        }
        return;
    }
    for (std::size_t j = 0; j < dim_h_; ++j) rows[j].resize(n);
    std::vector<double> lo(dim_h_), hi(dim_h_);
    for (std::size_t i = 0; i < n; ++i) {
        const double x = grid_->node(i);
        const double dx = 1e-6 * (1.0 + x);
        point_fn_(t, std::max(0.0, x - dx), u[i], lo);
        point_fn_(t, x + dx, u[i], hi);
        const double denom = (x + dx) - std::max(0.0, x - dx);
        for (std::size_t j = 0; j < dim_h_; ++j) rows[j][i] = (hi[j] - lo[j]) / denom;
    }
}

void VolatilitySpec::eval_du(double t, std::span<const double> u, CoeffRows& rows) const {
    const std::size_t n = grid_->n_nodes();
    rows.resize(dim_h_);
    if (!factors_.empty()) {
        for (std::size_t j = 0; j < dim_h_; ++j) {
            rows[j].resize(n);
            const auto& base = base_[j];
            const Saturation sat = factors_[j].sat;
            for (std::size_t i = 0; i < n; ++i) {
                rows[j][i] = base[i] * saturation_deriv(sat, u[i]);
            }
        }
        return;
    }
    for (std::size_t j = 0; j < dim_h_; ++j) rows[j].resize(n);
    std::vector<double> lo(dim_h_), hi(dim_h_);
    for (std::size_t i = 0; i < n; ++i) {
        const double du = 1e-6 * (1.0 + std::fabs(u[i]));
        point_fn_(t, grid_->node(i), u[i] - du, lo);
        point_fn_(t, grid_->node(i), u[i] + du, hi);
        for (std::size_t j = 0; j < dim_h_; ++j) rows[j][i] = (hi[j] - lo[j]) / (2.0 * du);
    }
}

void VolatilitySpec::eval_point(double t, double x, double u, std::span<double> out) const {
    if (!factors_.empty()) {
        for (std::size_t j = 0; j < dim_h_; ++j) {
            const ExpFactor& fac = factors_[j];
            out[j] = fac.sigma * std::exp(-fac.lambda * x) * saturation_eval(fac.sat, u);
        }
        return;
    }
    point_fn_(t, x, u, out);
}

Curve apply_G(const VolatilitySpec& spec, double t, const Curve& f, std::span<const double> h) {
    if (h.size() != spec.dim_h()) throw std::invalid_argument("apply_G: H-dimension mismatch");
    CoeffRows rows;
    spec.eval(t, f.values, rows);
    std::vector<double> out(f.size(), 0.0);
    for (std::size_t j = 0; j < spec.dim_h(); ++j) kernels::axpy(out, h[j], rows[j]);
    return Curve(f.grid, std::move(out));
}

namespace {

double gamma_norm_rows(const Grid& grid, const CoeffRows& rows) {
    const double p = grid.params().p;
    const auto w = grid.weight_w();
    if (p == 2.0) {
        double acc = 0.0;
        for (const auto& row : rows) acc += kernels::wsum_sq(w, row);
        return std::sqrt(acc);
    }
    std::vector<double> hnorm(grid.n_nodes(), 0.0);
    for (const auto& row : rows) kernels::mul_acc(hnorm, row, row);
    for (double& v : hnorm) v = std::sqrt(v);
    return std::pow(kernels::wsum_abs_pow(w, hnorm, p), 1.0 / p);
}

}  // namespace

double gamma_norm(const VolatilitySpec& spec, double t, const Curve& f) {
    CoeffRows rows;
    spec.eval(t, f.values, rows);
    return gamma_norm_rows(*spec.grid(), rows);
}

double gamma_distance(const VolatilitySpec& spec, double t, const Curve& f1, const Curve& f2) {
    CoeffRows rows1, rows2;
    spec.eval(t, f1.values, rows1);
    spec.eval(t, f2.values, rows2);
    for (std::size_t j = 0; j < rows1.size(); ++j) {
        for (std::size_t i = 0; i < rows1[j].size(); ++i) rows1[j][i] -= rows2[j][i];
    }
    return gamma_norm_rows(*spec.grid(), rows1);
}

double gamma_norm_w1p(const VolatilitySpec& spec, double t, const Curve& f) {
    CoeffRows dx_rows, du_rows;
    spec.eval_dx(t, f.values, dx_rows);
    spec.eval_du(t, f.values, du_rows);
    const Curve df = weak_derivative(f);
    // total derivative along x of g(t, x, f(x))
    for (std::size_t j = 0; j < dx_rows.size(); ++j) {
        for (std::size_t i = 0; i < dx_rows[j].size(); ++i) {
            dx_rows[j][i] += du_rows[j][i] * df[i];
        }
    }
    return gamma_norm(spec, t, f) + gamma_norm_rows(*spec.grid(), dx_rows);
}

Curve apply_F(const VolatilitySpec& spec, double t, const Curve& f) {
    CoeffRows rows;
    spec.eval(t, f.values, rows);
    const std::size_t n = f.size();
    std::vector<double> cum(n), out(n, 0.0);
    for (std::size_t j = 0; j < spec.dim_h(); ++j) {
        kernels::cumtrapz(rows[j], f.grid->h(), cum);
        kernels::mul_acc(out, rows[j], cum);
    }
    return Curve(f.grid, std::move(out));
}

double truncation_norm(const Curve& f, NormKind kind) {
    return kind == NormKind::lp ? lp_nu_norm(f) : w1p_nu_norm(f);
}

Curve radial_retract(const Curve& f, const Truncation& tr, bool* clipped) {
    const double norm = truncation_norm(f, tr.norm);
    if (norm <= tr.level) {
        if (clipped != nullptr) *clipped = false;
        return f;
    }
    if (clipped != nullptr) *clipped = true;
    return curve_scaled(f, tr.level / norm);
}

Curve TruncatedCoefficients::apply_F(double t, const Curve& f) const {
    return hjmm::apply_F(spec, t, radial_retract(f, tr));
}

Curve TruncatedCoefficients::apply_G(double t, const Curve& f, std::span<const double> h) const {
    return hjmm::apply_G(spec, t, radial_retract(f, tr), h);
}

double TruncatedCoefficients::gamma_distance(double t, const Curve& f1, const Curve& f2) const {
    return hjmm::gamma_distance(spec, t, radial_retract(f1, tr), radial_retract(f2, tr));
}

ConstantsReport theoretical_report(const VolatilitySpec& spec, const SpaceParams& params,
                                   double n_gamma) {
    const double emb = embedding_bound(params);
    ConstantsReport report;
    report.L_F = {4.0 * emb * spec.g_hat_sup() * spec.g_bar_norm(),
                  "4 (p/(nu q))^{1/q} ||g_hat||_inf ||g_bar||_{nu,p}"};
    report.L_G = {n_gamma * spec.g_hat_sup(), "N ||g_hat||_inf"};
    report.Lbar_F = {emb * spec.g_bar_norm() * spec.g_bar_norm(),
                     "(p/(nu q))^{1/q} ||g_bar||^2_{nu,p}  (dominated F is bounded)"};
    report.Lbar_G = {n_gamma * spec.g_bar_norm(), "N ||g_bar||_{nu,p}  (dominated G is bounded)"};
    report.K_maximal = {1.0, "default (replace with empirical estimate)"};
    report.N_gamma = {n_gamma, "surrogate"};
    return report;
}

double contraction_constant(const ConstantsReport& report, double T, double beta) {
    const double lf = report.L_F.value;
    const double lg = report.L_G.value;
    const double k = report.K_maximal.value;
    return std::exp(beta * T) * std::sqrt(2.0 * lf * lf * T * T + 2.0 * k * T * lg * lg);
}

LipschitzEstimate estimate_lipschitz(const VolatilitySpec& spec, LipMode mode,
                                     std::size_t n_samples, double radius, std::uint64_t seed,
                                     double level) {
    if (n_samples < 2) throw std::invalid_argument("estimate_lipschitz: n_samples must be >= 2");
    PhiloxStream rng(seed, 0x11b5c7e5u);
    const Truncation tr{level, NormKind::lp};
    const TruncatedCoefficients truncated{spec, tr};

    auto draw = [&]() {
        Curve f = random_decaying_curve(spec.grid(), rng);
        const double norm = lp_nu_norm(f);
        const double target = radius * rng.uniform();
        return norm > 0.0 ? curve_scaled(f, target / norm) : f;
    };

    LipschitzEstimate est;
    est.samples = n_samples;
    for (std::size_t k = 0; k < n_samples; ++k) {
        const Curve f1 = draw();
        const Curve f2 = draw();
        const double dist = lp_nu_norm(curve_sub(f1, f2));
        if (dist < 1e-12) continue;
        double num = 0.0;
        switch (mode) {
            case LipMode::F:
                num = lp_nu_norm(curve_sub(apply_F(spec, 0.0, f1), apply_F(spec, 0.0, f2)));
                break;
            case LipMode::G:
                num = gamma_distance(spec, 0.0, f1, f2);
                break;
            case LipMode::Fn:
                num = lp_nu_norm(
                    curve_sub(truncated.apply_F(0.0, f1), truncated.apply_F(0.0, f2)));
                break;
            case LipMode::Gn:
                num = truncated.gamma_distance(0.0, f1, f2);
                break;
        }
        est.empirical = std::max(est.empirical, num / dist);
    }

    const double emb = embedding_bound(spec.grid()->params());
    const double base_f = 4.0 * emb * spec.g_hat_sup() * spec.g_bar_norm();
    const double base_g = spec.g_hat_sup();
    switch (mode) {
        case LipMode::F:
            est.theoretical = base_f;
            break;
        case LipMode::G:
            est.theoretical = base_g;
            break;
        case LipMode::Fn:
            est.theoretical = 3.0 * base_f;
            break;
        case LipMode::Gn:
            est.theoretical = 3.0 * base_g;
            break;
    }
    return est;
}

}  // namespace hjmm
