#include "hjmm/ergodicity.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "hjmm/noise.hpp"
#include "hjmm/parallel.hpp"

namespace hjmm {

double semi_inner_product(const Curve& f, const Curve& g) {
    const Grid& grid = *f.grid;
    const double p = grid.params().p;
    const double gnorm = lp_nu_norm(g);
    if (gnorm == 0.0) return 0.0;
    const auto w = grid.weight_w();
    double acc = 0.0;
    if (p == 2.0) {
        for (std::size_t i = 0; i < f.size(); ++i) acc += w[i] * f[i] * g[i];
        return acc;
    }
    for (std::size_t i = 0; i < f.size(); ++i) {
        acc += w[i] * f[i] * g[i] * std::pow(std::fabs(g[i]), p - 2.0);
    }
    return std::pow(gnorm, 2.0 - p) * acc;
}

UpwindGenerator::UpwindGenerator(GridPtr grid) : grid_(std::move(grid)) {
    if (!grid_) throw std::invalid_argument("UpwindGenerator: null grid");
}

Curve UpwindGenerator::apply(const Curve& f) const {
    const double inv_h = 1.0 / grid_->h();
    const std::size_t n = f.size();
    std::vector<double> out(n);
    for (std::size_t i = 0; i + 1 < n; ++i) out[i] = (f[i + 1] - f[i]) * inv_h;
    out[n - 1] = -f[n - 1] * inv_h;  // zero inflow beyond x_max
    return Curve(f.grid, std::move(out));
}

Curve UpwindGenerator::resolvent_solve(double n, const Curve& z) const {
    const double inv_h = 1.0 / grid_->h();
    const double diag = n + inv_h;
    const std::size_t m = z.size();
    std::vector<double> y(m);
    y[m - 1] = z[m - 1] / diag;
    for (std::size_t ii = m - 1; ii-- > 0;) {
        y[ii] = (z[ii] + inv_h * y[ii + 1]) / diag;
    }
    return Curve(z.grid, std::move(y));
}

Curve UpwindGenerator::yosida_apply(double n, const Curve& z) const {
    const Curve y = resolvent_solve(n, z);
    // A_n z = n A_h y = n (n y - z) since (nI - A_h) y = z
    std::vector<double> out(z.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = n * (n * y[i] - z[i]);
    return Curve(z.grid, std::move(out));
}

DissipativityReport check_invariant_condition(const VolatilitySpec& spec,
                                              const SpaceParams& params, double n_gamma) {
    if (spec.time_dependent()) {
        throw std::invalid_argument("check_invariant_condition: spec must be time-independent");
    }
    params.validate();
    DissipativityReport rep;
    rep.n_gamma = n_gamma;
    rep.nu_half = 0.5 * params.nu;
    rep.omega1 = 2.0 * embedding_bound(params) * spec.g_hat_sup() * spec.g_bar_norm();
    rep.omega2 = -params.nu / params.p;
    rep.omega3 = (params.p - 1.0) * n_gamma * n_gamma * spec.g_hat_sup() * spec.g_hat_sup();
    rep.condition_holds = rep.omega1 + rep.omega3 < rep.nu_half;
    rep.admissible_hi = std::max(0.0, -(rep.omega1 + rep.omega2 + rep.omega3));
    rep.omega = 0.5 * rep.admissible_hi;
    if (rep.omega > 0.0) {
        // smallest n with omega1 + omega3 + n omega2 / (n - omega2) <= -omega
        const double c = rep.omega + rep.omega1 + rep.omega3;
        const double raw = rep.omega2 * c / (rep.omega2 + c);
        rep.n0 = std::max(1, static_cast<int>(std::ceil(raw)));
    }
    return rep;
}

double dissipativity_sample(const VolatilitySpec& spec, double n_gamma, double n_yosida,
                            std::size_t pairs, std::uint64_t seed) {
    if (n_yosida < 1.0) throw std::invalid_argument("dissipativity_sample: n must be >= 1");
    const GridPtr& grid = spec.grid();
    const SpaceParams& params = grid->params();
    const double k2p = params.p * (params.p - 1.0);
    const UpwindGenerator gen(grid);
    PhiloxStream rng(seed, 0xd155u);

    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < pairs; ++k) {
        Curve f1 = random_decaying_curve(grid, rng);
        Curve f2 = random_decaying_curve(grid, rng);
        const Curve z = curve_sub(f1, f2);
        const double zn = lp_nu_norm(z);
        if (zn < 1e-10) continue;
        Curve az = gen.yosida_apply(n_yosida, z);
        const Curve df = curve_sub(apply_F(spec, 0.0, f1), apply_F(spec, 0.0, f2));
        for (std::size_t i = 0; i < az.size(); ++i) az[i] += df[i];
        const double gd = n_gamma * gamma_distance(spec, 0.0, f1, f2);
        const double lhs = semi_inner_product(az, z) + (k2p / params.p) * gd * gd;
        worst = std::max(worst, lhs / (zn * zn));
    }
    return worst;
}

namespace {

// least-squares slope of y against t over [first, last)
double fit_slope(std::span<const double> t, std::span<const double> y, std::size_t first,
                 std::size_t last) {
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    const auto n = static_cast<double>(last - first);
    for (std::size_t i = first; i < last; ++i) {
        sx += t[i];
        sy += y[i];
        sxx += t[i] * t[i];
        sxy += t[i] * y[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

double interp_at(const Curve& c, double x) {
    const Grid& g = *c.grid;
    if (x <= 0.0) return c[0];
    if (x >= g.x_max()) return c.values.back();
    const double pos = x / g.h();
    const auto lo = static_cast<std::size_t>(pos);
    const double theta = pos - static_cast<double>(lo);
    return (1.0 - theta) * c[lo] + theta * c[lo + 1];
}

MomentRow moments(std::span<const double> v) {
    MomentRow row;
    const auto n = static_cast<double>(v.size());
    for (double x : v) row.mean += x;
    row.mean /= n;
    for (double x : v) row.variance += (x - row.mean) * (x - row.mean);
    row.variance /= (n - 1.0);
    row.se_mean = std::sqrt(row.variance / n);
    return row;
}

}  // namespace

CouplingResult coupling_decay(const SimConfig& config, const Curve& r0_a, const Curve& r0_b,
                              double horizon, std::size_t n_paths, unsigned threads) {
    SimConfig base = config;
    base.t_end = horizon;
    base.snapshot_stride = 1;
    base.validate();
    const std::size_t n_steps = base.n_steps();

    std::vector<std::vector<double>> dists(n_paths);
    parallel_for(n_paths, threads, [&](std::size_t path) {
        SimConfig cfg_a = base;
        cfg_a.noise = base.noise.with_stream(base.noise.stream_id() + path);
        cfg_a.r0 = r0_a;
        SimConfig cfg_b = cfg_a;
        cfg_b.r0 = r0_b;
        const PathResult res_a = simulate(cfg_a);
        const PathResult res_b = simulate(cfg_b);
        auto& d = dists[path];
        d.resize(n_steps + 1);
        for (std::size_t k = 0; k <= n_steps; ++k) {
            d[k] = lp_nu_norm(curve_sub(res_a.curves[k], res_b.curves[k]));
        }
    });

    CouplingResult result;
    result.times.resize(n_steps + 1);
    for (std::size_t k = 0; k <= n_steps; ++k) {
        result.times[k] = static_cast<double>(k) * base.dt;
    }
    result.mean_distance.assign(n_steps + 1, 0.0);
    for (const auto& d : dists) {
        for (std::size_t k = 0; k <= n_steps; ++k) result.mean_distance[k] += d[k];
    }
    for (double& v : result.mean_distance) v /= static_cast<double>(n_paths);

    for (const auto& d : dists) {
        if (d[0] <= 0.0) {
            result.slopes.push_back(0.0);
            continue;
        }
        // fit while the distance is resolvable above rounding
        std::size_t last = 1;
        std::vector<double> logd(d.size());
        const double floor_val = 1e-13 * d[0];
        for (std::size_t k = 0; k < d.size(); ++k) {
            if (d[k] > floor_val) last = k + 1;
            logd[k] = std::log(std::max(d[k], 1e-300));
        }
        result.slopes.push_back(fit_slope(result.times, logd, 0, last));
    }
    double mean_slope = 0.0;
    for (double s : result.slopes) mean_slope += s;
    mean_slope /= static_cast<double>(result.slopes.size());
    double var = 0.0;
    for (double s : result.slopes) var += (s - mean_slope) * (s - mean_slope);
    var /= std::max<double>(1.0, static_cast<double>(result.slopes.size()) - 1.0);
    result.slope = mean_slope;
    result.slope_se = std::sqrt(var / static_cast<double>(result.slopes.size()));
    return result;
}

InvariantStats empirical_invariant_stats(const SimConfig& config, const Curve& r0_b,
                                         const std::vector<double>& probe_x,
                                         std::size_t n_paths, unsigned threads) {
    SimConfig base = config;
    base.snapshot_stride = std::max<std::size_t>(1, base.n_steps());
    base.validate();

    const std::size_t n_obs = 1 + probe_x.size();
    std::vector<std::vector<double>> samples_a(n_obs, std::vector<double>(n_paths));
    std::vector<std::vector<double>> samples_b(n_obs, std::vector<double>(n_paths));

    parallel_for(n_paths, threads, [&](std::size_t path) {
        SimConfig cfg_a = base;
        cfg_a.noise = base.noise.with_stream(base.noise.stream_id() + path);
        SimConfig cfg_b = cfg_a;
        cfg_b.noise = base.noise.with_stream(base.noise.stream_id() + n_paths + path);
        cfg_b.r0 = r0_b;
        const Curve end_a = simulate(cfg_a).curves.back();
        const Curve end_b = simulate(cfg_b).curves.back();
        samples_a[0][path] = lp_nu_norm(end_a);
        samples_b[0][path] = lp_nu_norm(end_b);
        for (std::size_t j = 0; j < probe_x.size(); ++j) {
            samples_a[1 + j][path] = interp_at(end_a, probe_x[j]);
            samples_b[1 + j][path] = interp_at(end_b, probe_x[j]);
        }
    });

    InvariantStats stats;
    stats.probe_x = probe_x;
    stats.norm_a = moments(samples_a[0]);
    stats.norm_b = moments(samples_b[0]);
    for (std::size_t j = 0; j < probe_x.size(); ++j) {
        stats.probes_a.push_back(moments(samples_a[1 + j]));
        stats.probes_b.push_back(moments(samples_b[1 + j]));
    }
    for (std::size_t j = 0; j < n_obs; ++j) {
        const MomentRow& a = j == 0 ? stats.norm_a : stats.probes_a[j - 1];
        const MomentRow& b = j == 0 ? stats.norm_b : stats.probes_b[j - 1];
        const double se = std::sqrt(a.se_mean * a.se_mean + b.se_mean * b.se_mean);
        stats.discrepancy_se.push_back(se > 0.0 ? std::fabs(a.mean - b.mean) / se : 0.0);
    }
    return stats;
}

}  // namespace hjmm
