#include "hjmm/solver.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "hjmm/kernels.hpp"
#include "hjmm/parallel.hpp"

namespace hjmm {

namespace {

// Scratch buffers shared across steps of one path.
struct StepWorkspace {
    CoeffRows rows;
    std::vector<double> cum;
    std::vector<double> drift;
    std::vector<double> retracted;
};

// In-place Euler step on the raw state vector.
void euler_step_inplace(std::vector<double>& state, double t, double dt, std::size_t m_cells,
                        const VolatilitySpec& spec, std::span<const double> dw,
                        const ShiftSemigroup& semigroup,
                        const std::optional<Truncation>& truncation, StepWorkspace& ws) {
    const Grid& grid = *semigroup.grid();
    const std::size_t n = state.size();

    std::span<const double> arg(state);
    if (truncation) {
        const double norm = truncation->norm == NormKind::lp
                                ? lp_nu_norm(grid, state)
                                : w1p_nu_norm(Curve(semigroup.grid(), state));
        if (norm > truncation->level) {
            const double scale = truncation->level / norm;
            ws.retracted.resize(n);
            for (std::size_t i = 0; i < n; ++i) ws.retracted[i] = scale * state[i];
            arg = ws.retracted;
        }
    }

    spec.eval(t, arg, ws.rows);
    ws.cum.resize(n);
    ws.drift.assign(n, 0.0);
    for (std::size_t j = 0; j < spec.dim_h(); ++j) {
        kernels::cumtrapz(ws.rows[j], grid.h(), ws.cum);
        kernels::mul_acc(ws.drift, ws.rows[j], ws.cum);
    }
    kernels::axpy(state, dt, ws.drift);
    for (std::size_t j = 0; j < spec.dim_h(); ++j) kernels::axpy(state, dw[j], ws.rows[j]);
    semigroup.shift_lattice(m_cells, state);
}

PathResult run_euler(const SimConfig& config, const NoisePath& noise) {
    config.validate();
    const std::size_t n_steps = config.n_steps();
    const std::size_t m_cells = config.lattice_cells_per_step();
    const ShiftSemigroup semigroup(config.grid, config.extension, config.extension_rate);
    std::optional<Truncation> truncation;
    if (config.truncation_n) {
        truncation = Truncation{*config.truncation_n, config.truncation_norm_kind};
    }

    PathResult result;
    result.diagnostics = config.constants ? *config.constants
                                          : theoretical_report(config.spec, config.space);
    result.times.reserve(n_steps + 1);
    result.norms.reserve(n_steps + 1);

    std::vector<double> state = config.r0.values;
    StepWorkspace ws;
    for (std::size_t k = 0; k <= n_steps; ++k) {
        const double t = static_cast<double>(k) * config.dt;
        const double norm = lp_nu_norm(*config.grid, state);
        if (!std::isfinite(norm)) {
            throw NumericalAbort(t, "non-finite state at t=" + std::to_string(t));
        }
        result.times.push_back(t);
        result.norms.push_back(norm);
        if (truncation && !result.tau_hit && norm >= truncation->level) result.tau_hit = t;
        if (k % config.snapshot_stride == 0 || k == n_steps) {
            result.snapshot_steps.push_back(k);
            result.curves.emplace_back(config.grid, state);
        }
        if (k == n_steps) break;
        euler_step_inplace(state, t, config.dt, m_cells, config.spec, noise.step(k), semigroup,
                           truncation, ws);
    }
    return result;
}

}  // namespace

std::size_t SimConfig::n_steps() const {
    const auto n = static_cast<std::size_t>(std::llround(t_end / dt));
    return n == 0 ? 1 : n;
}

std::size_t SimConfig::lattice_cells_per_step() const {
    const double m_real = dt / grid->h();
    const auto m = static_cast<std::size_t>(std::llround(m_real));
    if (m == 0 || std::fabs(m_real - static_cast<double>(m)) > 1e-9 * std::max(1.0, m_real)) {
        throw std::invalid_argument("SimConfig: dt must be a positive integer multiple of h");
    }
    return m;
}

void SimConfig::validate() const {
    space.validate();
    if (!grid) throw std::invalid_argument("SimConfig: null grid");
    if (!(dt > 0.0) || !(t_end > 0.0)) {
        throw std::invalid_argument("SimConfig: dt and t_end must be > 0");
    }
    (void)lattice_cells_per_step();
    const double n_real = t_end / dt;
    if (std::fabs(n_real - std::llround(n_real)) > 1e-9 * std::max(1.0, n_real)) {
        throw std::invalid_argument("SimConfig: t_end must be an integer multiple of dt");
    }
    if (r0.size() != grid->n_nodes()) throw std::invalid_argument("SimConfig: r0 grid mismatch");
    if (snapshot_stride == 0) {
        throw std::invalid_argument("SimConfig: snapshot_stride must be >= 1");
    }
    if (noise.dim_h() != spec.dim_h()) {
        throw std::invalid_argument("SimConfig: noise dim_h != volatility dim_h");
    }
}

Curve step_exp_euler(const Curve& state, double t, double dt, const VolatilitySpec& spec,
                     std::span<const double> dw, const ShiftSemigroup& semigroup,
                     const std::optional<Truncation>& truncation) {
    std::vector<double> values = state.values;
    StepWorkspace ws;
    const double m_real = dt / semigroup.grid()->h();
    const auto m = static_cast<std::size_t>(std::llround(m_real));
    if (std::fabs(m_real - static_cast<double>(m)) > 1e-9) {
        throw std::invalid_argument("step_exp_euler: dt must be a lattice multiple of h");
    }
    euler_step_inplace(values, t, dt, m, spec, dw, semigroup, truncation, ws);
    for (double v : values) {
        if (!std::isfinite(v)) throw NumericalAbort(t, "non-finite state after step");
    }
    return Curve(state.grid, std::move(values));
}

PathResult simulate(const SimConfig& config) {
    config.validate();
    if (config.scheme == Scheme::picard) return concatenate_windows(config);
    NoiseModel model = config.noise;
    NoisePath noise = NoisePath::sample(model, config.n_steps(), config.dt);
    return run_euler(config, noise);
}

PathResult simulate_frozen(const SimConfig& config, const NoisePath& noise) {
    config.validate();
    if (noise.n_steps < config.n_steps() || noise.dim_h != config.spec.dim_h()) {
        throw std::invalid_argument("simulate_frozen: noise path does not cover the run");
    }
    return run_euler(config, noise);
}

std::vector<Curve> picard_solve(const VolatilitySpec& spec, const ShiftSemigroup& semigroup,
                                const Curve& u_a, double t_a, std::size_t n_steps, double dt,
                                const NoisePath& window_noise, const PicardParams& params,
                                const std::optional<Truncation>& truncation, PicardStats* stats,
                                const std::vector<Curve>* initial_guess) {
    const Grid& grid = *semigroup.grid();
    const double m_real = dt / grid.h();
    const auto m_cells = static_cast<std::size_t>(std::llround(m_real));

    // v_old: previous iterate at all window lattice times.
    std::vector<std::vector<double>> v_old(n_steps + 1, u_a.values);
    if (initial_guess != nullptr) {
        for (std::size_t k = 0; k <= n_steps; ++k) v_old[k] = (*initial_guess)[k].values;
        v_old[0] = u_a.values;
    }
    std::vector<std::vector<double>> v_new(n_steps + 1);

    PicardStats local_stats;
    local_stats.window = static_cast<double>(n_steps) * dt;
    StepWorkspace ws;
    bool converged = false;

    for (int iter = 0; iter < params.max_iter; ++iter) {
        v_new[0] = u_a.values;
        for (std::size_t k = 0; k < n_steps; ++k) {
            // state advances from v_new[k]; coefficients frozen at v_old[k]
            std::vector<double> state = v_new[k];
            const double t = t_a + static_cast<double>(k) * dt;

            std::span<const double> arg(v_old[k]);
            std::vector<double> retracted;
            if (truncation) {
                const double norm = truncation->norm == NormKind::lp
                                        ? lp_nu_norm(grid, v_old[k])
                                        : w1p_nu_norm(Curve(semigroup.grid(), v_old[k]));
                if (norm > truncation->level) {
                    const double scale = truncation->level / norm;
                    retracted.resize(v_old[k].size());
                    for (std::size_t i = 0; i < retracted.size(); ++i) {
                        retracted[i] = scale * v_old[k][i];
                    }
                    arg = retracted;
                }
            }

            spec.eval(t, arg, ws.rows);
            ws.cum.resize(state.size());
            ws.drift.assign(state.size(), 0.0);
            for (std::size_t j = 0; j < spec.dim_h(); ++j) {
                kernels::cumtrapz(ws.rows[j], grid.h(), ws.cum);
                kernels::mul_acc(ws.drift, ws.rows[j], ws.cum);
            }
            kernels::axpy(state, dt, ws.drift);
            const auto dw = window_noise.step(k);
            for (std::size_t j = 0; j < spec.dim_h(); ++j) {
                kernels::axpy(state, dw[j], ws.rows[j]);
            }
            semigroup.shift_lattice(m_cells, state);
            v_new[k + 1] = std::move(state);
        }

        double dist = 0.0;
        std::vector<double> diff(grid.n_nodes());
        for (std::size_t k = 0; k <= n_steps; ++k) {
            for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = v_new[k][i] - v_old[k][i];
            dist = std::max(dist, lp_nu_norm(grid, diff));
        }
        if (!local_stats.distances.empty() && local_stats.distances.back() > 0.0) {
            local_stats.ratios.push_back(dist / local_stats.distances.back());
        }
        local_stats.distances.push_back(dist);
        local_stats.iterations = static_cast<std::size_t>(iter) + 1;
        std::swap(v_old, v_new);
        if (dist <= params.tol) {
            converged = true;
            break;
        }
    }

    if (stats != nullptr) *stats = local_stats;
    if (!converged) {
        const double last_ratio =
            local_stats.ratios.empty() ? std::numeric_limits<double>::quiet_NaN()
                                       : local_stats.ratios.back();
        throw PicardNonConvergence(last_ratio,
                                   "picard_solve: no convergence in " +
                                       std::to_string(params.max_iter) + " iterations");
    }

    std::vector<Curve> out;
    out.reserve(n_steps + 1);
    for (std::size_t k = 0; k <= n_steps; ++k) {
        out.emplace_back(semigroup.grid(), std::move(v_old[k]));
    }
    return out;
}

double pick_picard_window(const ConstantsReport& report, const SpaceParams& params, double dt,
                          double t_end) {
    const double beta = -params.nu / params.p;
    const auto n_total = static_cast<std::size_t>(std::llround(t_end / dt));
    std::size_t best = 1;
    for (std::size_t m = n_total; m >= 1; --m) {
        const double window = static_cast<double>(m) * dt;
        if (contraction_constant(report, window, beta) <= 0.5) {
            best = m;
            break;
        }
    }
    return static_cast<double>(best) * dt;
}

PathResult concatenate_windows(const SimConfig& config, std::vector<PicardStats>* window_stats) {
    config.validate();
    const ConstantsReport report =
        config.constants ? *config.constants : theoretical_report(config.spec, config.space);
    const double window =
        config.picard.window ? *config.picard.window
                             : pick_picard_window(report, config.space, config.dt, config.t_end);
    const auto steps_per_window = static_cast<std::size_t>(std::llround(window / config.dt));
    if (steps_per_window == 0) throw std::invalid_argument("picard window smaller than dt");

    const std::size_t n_steps = config.n_steps();
    const ShiftSemigroup semigroup(config.grid, config.extension, config.extension_rate);
    std::optional<Truncation> truncation;
    if (config.truncation_n) {
        truncation = Truncation{*config.truncation_n, config.truncation_norm_kind};
    }

    NoiseModel model = config.noise;
    const NoisePath noise = NoisePath::sample(model, n_steps, config.dt);

    PathResult result;
    result.diagnostics = report;
    result.times.reserve(n_steps + 1);
    result.norms.reserve(n_steps + 1);

    Curve state = config.r0;
    std::size_t k_global = 0;

    auto record = [&](const Curve& c, std::size_t k) {
        const double t = static_cast<double>(k) * config.dt;
        const double norm = lp_nu_norm(c);
        if (!std::isfinite(norm)) throw NumericalAbort(t, "non-finite state");
        result.times.push_back(t);
        result.norms.push_back(norm);
        if (truncation && !result.tau_hit && norm >= truncation->level) result.tau_hit = t;
        if (k % config.snapshot_stride == 0 || k == n_steps) {
            result.snapshot_steps.push_back(k);
            result.curves.push_back(c);
        }
    };

    record(state, 0);
    while (k_global < n_steps) {
        const std::size_t w_steps = std::min(steps_per_window, n_steps - k_global);
        NoisePath window_noise;
        window_noise.dim_h = noise.dim_h;
        window_noise.n_steps = w_steps;
        window_noise.increments.assign(
            noise.increments.begin() + static_cast<std::ptrdiff_t>(k_global * noise.dim_h),
            noise.increments.begin() +
                static_cast<std::ptrdiff_t>((k_global + w_steps) * noise.dim_h));

        PicardStats stats;
        std::vector<Curve> path = picard_solve(
            config.spec, semigroup, state, static_cast<double>(k_global) * config.dt, w_steps,
            config.dt, window_noise, config.picard, truncation, &stats);
        if (window_stats != nullptr) window_stats->push_back(stats);

        for (std::size_t k = 1; k <= w_steps; ++k) record(path[k], k_global + k);
        state = path.back();
        k_global += w_steps;
    }
    return result;
}

std::vector<PathResult> localization_run(const SimConfig& config,
                                         const std::vector<double>& levels) {
    for (std::size_t i = 1; i < levels.size(); ++i) {
        if (!(levels[i] > levels[i - 1])) {
            throw std::invalid_argument("localization_run: levels must increase");
        }
    }
    std::vector<PathResult> results;
    results.reserve(levels.size());
    for (double level : levels) {
        SimConfig cfg = config;
        cfg.truncation_n = level;
        results.push_back(simulate(cfg));
    }
    return results;
}

double estimate_k_maximal(const SimConfig& config, std::size_t n_paths, std::uint64_t seed) {
    config.validate();
    const std::size_t n_steps = config.n_steps();
    const std::size_t m_cells = config.lattice_cells_per_step();
    const ShiftSemigroup semigroup(config.grid, config.extension, config.extension_rate);
    const Grid& grid = *config.grid;

    double sum_sup = 0.0;
    double sum_denom = 0.0;
    for (std::size_t path = 0; path < n_paths; ++path) {
        NoiseModel model(config.spec.dim_h(), seed, 0x4b00 + path);
        std::vector<double> state = config.r0.values;
        std::vector<double> conv(grid.n_nodes(), 0.0);
        StepWorkspace ws;
        CoeffRows rows;
        double sup_conv_sq = 0.0;
        double denom = 0.0;
        std::vector<double> dw(config.spec.dim_h());
        for (std::size_t k = 0; k < n_steps; ++k) {
            const double t = static_cast<double>(k) * config.dt;
            config.spec.eval(t, state, rows);
            // Y_{k+1} = S(dt)(Y_k + G_k dW_k); denom accumulates ||G||^2 dt
            model.sample_increment(config.dt, dw);
            for (std::size_t j = 0; j < rows.size(); ++j) kernels::axpy(conv, dw[j], rows[j]);
            semigroup.shift_lattice(m_cells, conv);
            double gnorm_sq = 0.0;
            if (grid.params().p == 2.0) {
                for (const auto& row : rows) gnorm_sq += kernels::wsum_sq(grid.weight_w(), row);
            } else {
                const double gn = gamma_norm(config.spec, t, Curve(config.grid, state));
                gnorm_sq = gn * gn;
            }
            denom += gnorm_sq * config.dt;
            const double cn = lp_nu_norm(grid, conv);
            sup_conv_sq = std::max(sup_conv_sq, cn * cn);
            // advance the state with the same increment
            euler_step_inplace(state, t, config.dt, m_cells, config.spec, dw, semigroup,
                               std::nullopt, ws);
        }
        sum_sup += sup_conv_sq;
        sum_denom += denom;
    }
    return sum_denom > 0.0 ? sum_sup / sum_denom : 0.0;
}

ConvergenceStudy strong_convergence_study(const SimConfig& config,
                                          const std::vector<std::size_t>& factors,
                                          std::size_t n_paths, unsigned threads) {
    config.validate();
    const std::size_t fine_steps = config.n_steps();
    for (std::size_t f : factors) {
        if (f < 2 || fine_steps % f != 0) {
            throw std::invalid_argument("strong_convergence_study: bad coarsening factor");
        }
    }

    std::vector<std::vector<double>> errors(factors.size(),
                                            std::vector<double>(n_paths, 0.0));
    parallel_for(n_paths, threads, [&](std::size_t path) {
        NoiseModel model = config.noise.with_stream(config.noise.stream_id() + path);
        const NoisePath fine = NoisePath::sample(model, fine_steps, config.dt);
        const PathResult ref = simulate_frozen(config, fine);
        const Curve& ref_end = ref.curves.back();
        for (std::size_t li = 0; li < factors.size(); ++li) {
            SimConfig coarse_cfg = config;
            coarse_cfg.dt = config.dt * static_cast<double>(factors[li]);
            coarse_cfg.snapshot_stride = 1;
            const NoisePath coarse = fine.coarsen(factors[li]);
            const PathResult res = simulate_frozen(coarse_cfg, coarse);
            errors[li][path] = lp_nu_norm(curve_sub(res.curves.back(), ref_end));
        }
    });

    ConvergenceStudy study;
    for (std::size_t li = 0; li < factors.size(); ++li) {
        study.dts.push_back(config.dt * static_cast<double>(factors[li]));
        double mse = 0.0;
        for (double e : errors[li]) mse += e * e;
        study.rms_errors.push_back(std::sqrt(mse / static_cast<double>(n_paths)));
    }
    // least-squares slope of log(rms) vs log(dt)
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    const auto n = static_cast<double>(study.dts.size());
    for (std::size_t i = 0; i < study.dts.size(); ++i) {
        const double x = std::log(study.dts[i]);
        const double y = std::log(std::max(study.rms_errors[i], 1e-300));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    study.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    return study;
}

}  // namespace hjmm
