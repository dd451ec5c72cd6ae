#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "hjmm/space.hpp"

namespace hjmm {

// Bounded smooth factor s(u) multiplying the exponential x-profile of a
// volatility coordinate. sup = sup|s|, lip = sup|s'|, lip_deriv = Lipschitz
// constant of s' (an upper bound for `rational`).
enum class Saturation { one, tanh_sat, rational };

struct SaturationInfo {
    double sup;
    double lip;
    double lip_deriv;
};

SaturationInfo saturation_info(Saturation s);
double saturation_eval(Saturation s, double u);
double saturation_deriv(Saturation s, double u);

// One H-coordinate of the built-in family: g_j(t, x, u) = sigma e^{-lambda x} s(u).
struct ExpFactor {
    double sigma = 0.1;
    double lambda = 1.0;
    Saturation sat = Saturation::tanh_sat;
};

// Coordinate rows of g evaluated on the grid: rows[j][i] = g_j(t, x_i, u_i).
using CoeffRows = std::vector<std::vector<double>>;

// The HJMM volatility g(t, x, u) in H together with its dominating curve
// g_bar (||g|| <= |g_bar|), Lipschitz dominator g_hat
// (||g(.,u) - g(.,v)|| <= |g_hat| |u - v|), and the u-derivative constants
// K1 (bound on d_u g) and K2 (Lipschitz constant of d_u g).
class VolatilitySpec {
public:
    using PointFn = std::function<void(double t, double x, double u, std::span<double> out)>;

    // Scalar family (dim_h = 1).
    static VolatilitySpec exponential(GridPtr grid, double sigma, double lambda, Saturation sat);
    // Vector family; dominators are l1-style sums so the derivative conditions
    // hold coordinatewise.
    static VolatilitySpec vector_exponential(GridPtr grid, std::vector<ExpFactor> factors);
    // Arbitrary g supplied programmatically; derivative rows fall back to
    // finite differences.
    static VolatilitySpec custom(GridPtr grid, std::size_t dim_h, PointFn g, Curve g_bar,
                                 Curve g_hat, double k1, double k2, bool time_dependent);

    std::size_t dim_h() const { return dim_h_; }
    const GridPtr& grid() const { return grid_; }
    const Curve& g_bar() const { return g_bar_; }
    const Curve& g_hat() const { return g_hat_; }
    const Curve& dg_bar() const { return dg_bar_; }
    const Curve& dg_hat() const { return dg_hat_; }
    double k1() const { return k1_; }
    double k2() const { return k2_; }
    bool time_dependent() const { return time_dependent_; }

    double g_bar_norm() const { return g_bar_norm_; }   // ||g_bar||_{nu,p}
    double g_bar_w1p_norm() const { return g_bar_w1p_norm_; }
    double dg_bar_norm() const { return dg_bar_norm_; }
    double g_hat_sup() const { return g_hat_sup_; }     // ||g_hat||_inf on the grid

    void eval(double t, std::span<const double> u, CoeffRows& rows) const;
    void eval_dx(double t, std::span<const double> u, CoeffRows& rows) const;
    void eval_du(double t, std::span<const double> u, CoeffRows& rows) const;
    void eval_point(double t, double x, double u, std::span<double> out) const;

private:
    VolatilitySpec() = default;
    void finalize();  // caches norms, derivative dominators

    GridPtr grid_;
    std::size_t dim_h_ = 1;
    bool time_dependent_ = false;
    std::vector<ExpFactor> factors_;  // empty for custom specs
    PointFn point_fn_;                // set for custom specs
    Curve g_bar_, g_hat_, dg_bar_, dg_hat_;
    double k1_ = 0.0, k2_ = 0.0;
    double g_bar_norm_ = 0.0, g_hat_sup_ = 0.0, g_bar_w1p_norm_ = 0.0, dg_bar_norm_ = 0.0;
    std::vector<std::vector<double>> base_;  // factors: sigma_j e^{-lambda_j x_i}
};

// Diffusion operator G(t,f)[h](x) = <g(t, x, f(x)), h>_H.
Curve apply_G(const VolatilitySpec& spec, double t, const Curve& f, std::span<const double> h);

// gamma-radonifying norm surrogate (N = 1):
// (\int ||g(t, x, f(x))||_H^p e^{nu x} dx)^{1/p}.
double gamma_norm(const VolatilitySpec& spec, double t, const Curve& f);
// Surrogate distance between G(t,f1) and G(t,f2).
double gamma_distance(const VolatilitySpec& spec, double t, const Curve& f1, const Curve& f2);
// Sobolev-mode surrogate: lp part plus the same integral of the total
// x-derivative of g(t, x, f(x)).
double gamma_norm_w1p(const VolatilitySpec& spec, double t, const Curve& f);

// No-arbitrage drift F(t,f)(x) = <g(t, x, f(x)), \int_0^x g(t, y, f(y)) dy>_H.
Curve apply_F(const VolatilitySpec& spec, double t, const Curve& f);

// Radial retraction behind the truncated coefficients F^n, G^n.
enum class NormKind { lp, w1p };
struct Truncation {
    double level;
    NormKind norm = NormKind::lp;
};
double truncation_norm(const Curve& f, NormKind kind);
Curve radial_retract(const Curve& f, const Truncation& tr, bool* clipped = nullptr);

// F^n / G^n of the truncation construction: the coefficient evaluated at the
// retracted argument.
struct TruncatedCoefficients {
    const VolatilitySpec& spec;
    Truncation tr;

    Curve apply_F(double t, const Curve& f) const;
    Curve apply_G(double t, const Curve& f, std::span<const double> h) const;
    double gamma_distance(double t, const Curve& f1, const Curve& f2) const;
};

// One measured or derived constant with its provenance.
struct ConstantEntry {
    double value = 0.0;
    std::string provenance;   // formula text or "empirical"
    std::size_t samples = 0;  // > 0 for empirical entries
};

// Every paper-level constant the lab works with, as numbers with provenance.
struct ConstantsReport {
    ConstantEntry L_F, L_G;         // global Lipschitz constants
    ConstantEntry Lbar_F, Lbar_G;   // linear-growth constants
    ConstantEntry K_maximal;        // maximal-inequality constant (empirical)
    ConstantEntry N_gamma;          // gamma-embedding constant (surrogate: 1)
};

// Report filled with the closed-form constants of the dominated family.
ConstantsReport theoretical_report(const VolatilitySpec& spec, const SpaceParams& params,
                                   double n_gamma = 1.0);

// C(T) = e^{beta T} (2 L_F^2 T^2 + 2 K T L_G^2)^{1/2}.
double contraction_constant(const ConstantsReport& report, double T, double beta);

enum class LipMode { F, G, Fn, Gn };

struct LipschitzEstimate {
    double empirical = 0.0;    // max ||Phi(f1)-Phi(f2)|| / ||f1-f2|| over sampled pairs
    double theoretical = 0.0;  // closed-form value from the dominators
    std::size_t samples = 0;
};

// Samples random pairs inside the ball of radius R. `level` is the truncation
// level for the Fn/Gn modes.
LipschitzEstimate estimate_lipschitz(const VolatilitySpec& spec, LipMode mode,
                                     std::size_t n_samples, double radius, std::uint64_t seed,
                                     double level = 1.0);

}  // namespace hjmm
