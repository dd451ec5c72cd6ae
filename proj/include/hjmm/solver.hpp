#pragma once

#include <optional>
#include <stdexcept>

#include "hjmm/coefficients.hpp"
#include "hjmm/noise.hpp"
#include "hjmm/semigroup.hpp"
#include "hjmm/space.hpp"

namespace hjmm {

// Thrown when a path produces a non-finite state.
struct NumericalAbort : std::runtime_error {
    double t;
    NumericalAbort(double time, const std::string& what) : std::runtime_error(what), t(time) {}
};

// Thrown when the Picard iteration fails to reach tol within max_iter.
struct PicardNonConvergence : std::runtime_error {
    double last_ratio;
    PicardNonConvergence(double ratio, const std::string& what)
        : std::runtime_error(what), last_ratio(ratio) {}
};

struct PicardParams {
    double tol = 1e-8;
    int max_iter = 60;
    // Window length T0; unset picks the largest lattice multiple of dt with
    // C(T0) <= 1/2 from the constants report.
    std::optional<double> window;
};

enum class Scheme { exp_euler, picard };

struct SimConfig {
    SpaceParams space;
    GridPtr grid;
    VolatilitySpec spec;
    NoiseModel noise;
    Curve r0;
    double t_end = 1.0;
    double dt = 0.01;  // must be an integer multiple of the grid spacing
    Scheme scheme = Scheme::exp_euler;
    PicardParams picard;
    std::optional<double> truncation_n;
    NormKind truncation_norm_kind = NormKind::lp;
    std::size_t snapshot_stride = 1;
    ExtensionPolicy extension = ExtensionPolicy::zero;
    double extension_rate = 0.0;
    // Constants used for Picard auto-windows; defaults to theoretical_report.
    std::optional<ConstantsReport> constants;

    std::size_t n_steps() const;
    std::size_t lattice_cells_per_step() const;  // m with dt = m h (validates)
    void validate() const;
};

struct PathResult {
    std::vector<double> times;                 // all step times, 0 .. t_end
    std::vector<double> norms;                 // lp_nu_norm per step
    std::vector<std::size_t> snapshot_steps;   // indices into times
    std::vector<Curve> curves;                 // snapshots at those indices
    std::optional<double> tau_hit;             // first t with ||u|| >= truncation level
    ConstantsReport diagnostics;
};

// One exponential-Euler step of the mild form:
// u_{k+1} = S(dt) [ u_k + dt F(t_k, u_k) + G(t_k, u_k) dW ].
Curve step_exp_euler(const Curve& state, double t, double dt, const VolatilitySpec& spec,
                     std::span<const double> dw, const ShiftSemigroup& semigroup,
                     const std::optional<Truncation>& truncation = std::nullopt);

// Full path with increments drawn from the config's noise model.
PathResult simulate(const SimConfig& config);
// Same with a pre-sampled noise path (must cover n_steps() increments).
PathResult simulate_frozen(const SimConfig& config, const NoisePath& noise);

struct PicardStats {
    std::size_t iterations = 0;
    std::vector<double> distances;  // sup-over-window distance per iteration
    std::vector<double> ratios;     // successive distance ratios
    double window = 0.0;
};

// Fixed point of the discretized variation-of-constants map on one window:
// v(t_{k+1}) = S(dt)[v(t_k) + dt F(t_k, v_old(t_k)) + G(t_k, v_old(t_k)) dW_k]
// with coefficients frozen at the previous iterate v_old. Returns the curves
// at all window lattice times (n_steps + 1 of them, the first being u_a).
std::vector<Curve> picard_solve(const VolatilitySpec& spec, const ShiftSemigroup& semigroup,
                                const Curve& u_a, double t_a, std::size_t n_steps, double dt,
                                const NoisePath& window_noise, const PicardParams& params,
                                const std::optional<Truncation>& truncation = std::nullopt,
                                PicardStats* stats = nullptr,
                                const std::vector<Curve>* initial_guess = nullptr);

// Picard windows [0,T0], [T0,2T0], ... chained so each window starts from the
// final curve of the previous one.
PathResult concatenate_windows(const SimConfig& config,
                               std::vector<PicardStats>* window_stats = nullptr);

// Auto window: largest lattice multiple of dt with C(T0) <= 1/2 (at least one
// step). beta is the semigroup growth bound -nu/p.
double pick_picard_window(const ConstantsReport& report, const SpaceParams& params, double dt,
                          double t_end);

// Simulate with truncated coefficients at each level (shared noise), recording
// tau_hit per level.
std::vector<PathResult> localization_run(const SimConfig& config,
                                         const std::vector<double>& levels);

// Empirical maximal-inequality constant: max over batches of
// E sup_t ||int_0^t S(t-r) G(r,u(r)) dW||^2 / E int_0^T ||G||^2 dt from
// simulated stochastic convolutions.
double estimate_k_maximal(const SimConfig& config, std::size_t n_paths, std::uint64_t seed);

struct ConvergenceStudy {
    std::vector<double> dts;
    std::vector<double> rms_errors;  // endpoint strong error vs finest-dt reference
    double slope = 0.0;              // log-log regression slope
};

// dt-halving study: reference at config.dt, coarse levels at config.dt *
// factor with increments summed from the same fine stream.
ConvergenceStudy strong_convergence_study(const SimConfig& config,
                                          const std::vector<std::size_t>& factors,
                                          std::size_t n_paths, unsigned threads);

}  // namespace hjmm
