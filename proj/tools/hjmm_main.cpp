// Batch front door: simulations, constant estimation, condition checks,
// convergence/coupling experiments, bond pricing. CSV/JSON out, exit codes:
// 0 success, 1 failed check, 2 config error, 3 numerical abort.

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "hjmm/ergodicity.hpp"
#include "hjmm/finance.hpp"
#include "hjmm/run_config.hpp"
#include "hjmm/solver.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CommonArgs {
    std::string config_path;
    std::string out_dir = ".";
    std::optional<std::uint64_t> seed_override;
    unsigned threads = 1;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool with_out = true) {
    cmd->add_option("config", args.config_path, "run-config JSON file")->required();
    if (with_out) cmd->add_option("-o,--out", args.out_dir, "output directory");
    cmd->add_option("--seed", args.seed_override, "override noise.seed");
    cmd->add_option("--threads", args.threads, "worker threads for ensemble verbs");
}

hjmm::RunConfig load(const CommonArgs& args) {
    hjmm::RunConfig cfg = hjmm::RunConfig::from_file(args.config_path);
    if (args.seed_override) cfg.seed = *args.seed_override;
    return cfg;
}

json curve_spec_from_experiment(const json& exp, const std::string& key) {
    return exp.contains(key) ? exp.at(key) : json{{"kind", "zero"}};
}

hjmm::Curve curve_from_json(const json& spec, const hjmm::GridPtr& grid, double nu) {
    const std::string kind = spec.value("kind", std::string("zero"));
    if (kind == "flat") {
        const double level = spec.value("level", 0.05);
        return hjmm::sample_curve(grid, [&](double) { return level; });
    }
    if (kind == "exp") {
        const double scale = spec.value("scale", 0.05);
        const double rate = spec.value("rate", nu);
        return hjmm::sample_curve(grid, [&](double x) { return scale * std::exp(-rate * x); });
    }
    if (kind == "zero") {
        return hjmm::sample_curve(grid, [](double) { return 0.0; });
    }
    throw hjmm::ConfigError("experiment curve kind must be flat, exp or zero");
}

int run_simulate(const CommonArgs& args) {
    hjmm::RunConfig cfg = load(args);
    const hjmm::SimConfig sim = cfg.make_sim_config();
    const hjmm::PathResult result = hjmm::simulate(sim);

    fs::create_directories(args.out_dir);
    hjmm::write_path_csv(fs::path(args.out_dir) / "path.csv", result);
    hjmm::write_norms_csv(fs::path(args.out_dir) / "norms.csv", result);

    json diag{{"constants", hjmm::report_to_json(result.diagnostics)},
              {"effective_config", cfg.effective_json()},
              {"seed", cfg.seed}};
    if (result.tau_hit) diag["tau_hit"] = *result.tau_hit;
    if (!hjmm::tail_negligible(sim.r0)) diag["tail_warning"] = hjmm::tail_ratio(sim.r0);
    hjmm::write_text(fs::path(args.out_dir) / "diagnostics.json", diag.dump(2) + "\n");
    std::cout << "wrote path.csv, norms.csv, diagnostics.json to " << args.out_dir << "\n";
    return 0;
}

int run_check_invariant(const CommonArgs& args) {
    hjmm::RunConfig cfg = load(args);
    const hjmm::GridPtr grid = cfg.make_grid_ptr();
    const hjmm::VolatilitySpec spec = cfg.make_spec(grid);
    const hjmm::DissipativityReport report =
        hjmm::check_invariant_condition(spec, cfg.space, cfg.n_gamma);
    std::cout << hjmm::dissipativity_to_json(report).dump(2) << "\n";
    return report.condition_holds ? 0 : 1;
}

int run_estimate_constants(const CommonArgs& args) {
    hjmm::RunConfig cfg = load(args);
    const json& exp = cfg.experiment;
    const auto samples = static_cast<std::size_t>(exp.value("samples", 400));
    const double radius = exp.value("radius", 2.0);
    const auto k_paths = static_cast<std::size_t>(exp.value("k_paths", 16));
    const double level = cfg.truncation_n.value_or(exp.value("truncation_level", 1.0));

    const hjmm::SimConfig sim = cfg.make_sim_config();
    hjmm::ConstantsReport report = hjmm::theoretical_report(sim.spec, cfg.space, cfg.n_gamma);

    const auto lf = hjmm::estimate_lipschitz(sim.spec, hjmm::LipMode::F, samples, radius,
                                             cfg.seed, level);
    const auto lg = hjmm::estimate_lipschitz(sim.spec, hjmm::LipMode::G, samples, radius,
                                             cfg.seed + 1, level);
    const auto lfn = hjmm::estimate_lipschitz(sim.spec, hjmm::LipMode::Fn, samples, radius,
                                              cfg.seed + 2, level);
    const auto lgn = hjmm::estimate_lipschitz(sim.spec, hjmm::LipMode::Gn, samples, radius,
                                              cfg.seed + 3, level);
    const double k_hat = hjmm::estimate_k_maximal(sim, k_paths, cfg.seed + 4);
    report.K_maximal = {k_hat, "empirical", k_paths};

    const double beta = -cfg.space.nu / cfg.space.p;
    json out{{"constants", hjmm::report_to_json(report)},
             {"empirical",
              {{"L_F", {{"empirical", lf.empirical}, {"theoretical", lf.theoretical}}},
               {"L_G", {{"empirical", lg.empirical}, {"theoretical", lg.theoretical}}},
               {"L_Fn", {{"empirical", lfn.empirical}, {"theoretical", lfn.theoretical}}},
               {"L_Gn", {{"empirical", lgn.empirical}, {"theoretical", lgn.theoretical}}},
               {"samples", samples},
               {"radius", radius}}},
             {"C_T",
              {{"T=0.1", hjmm::contraction_constant(report, 0.1, beta)},
               {"T=0.5", hjmm::contraction_constant(report, 0.5, beta)},
               {"T=1", hjmm::contraction_constant(report, 1.0, beta)}}},
             {"effective_config", cfg.effective_json()}};
    fs::create_directories(args.out_dir);
    hjmm::write_text(fs::path(args.out_dir) / "constants.json", out.dump(2) + "\n");
    std::cout << out.dump(2) << "\n";
    return 0;
}

int run_converge(const CommonArgs& args) {
    hjmm::RunConfig cfg = load(args);
    const json& exp = cfg.experiment;
    std::vector<std::size_t> factors{8, 16, 32, 64};
    if (exp.contains("factors")) factors = exp.at("factors").get<std::vector<std::size_t>>();
    const auto paths = static_cast<std::size_t>(exp.value("paths", 32));

    const hjmm::SimConfig sim = cfg.make_sim_config();
    const hjmm::ConvergenceStudy study =
        hjmm::strong_convergence_study(sim, factors, paths, args.threads);

    fs::create_directories(args.out_dir);
    std::string csv = "dt,rms_error\n";
    for (std::size_t i = 0; i < study.dts.size(); ++i) {
        csv += hjmm::format_double(study.dts[i]) + "," +
               hjmm::format_double(study.rms_errors[i]) + "\n";
    }
    hjmm::write_text(fs::path(args.out_dir) / "converge.csv", csv);
    std::cout << "strong order (log-log slope): " << study.slope << "\n";
    return 0;
}

int run_couple(const CommonArgs& args) {
    hjmm::RunConfig cfg = load(args);
    const json& exp = cfg.experiment;
    const hjmm::SimConfig sim = cfg.make_sim_config();
    const double horizon = exp.value("horizon", 20.0 / cfg.space.nu);
    const auto paths = static_cast<std::size_t>(exp.value("paths", 64));
    const hjmm::Curve r0_b =
        curve_from_json(curve_spec_from_experiment(exp, "r0_b"), sim.grid, cfg.space.nu);

    const hjmm::CouplingResult result =
        hjmm::coupling_decay(sim, sim.r0, r0_b, horizon, paths, args.threads);

    fs::create_directories(args.out_dir);
    std::string csv = "t,mean_distance\n";
    for (std::size_t k = 0; k < result.times.size(); ++k) {
        csv += hjmm::format_double(result.times[k]) + "," +
               hjmm::format_double(result.mean_distance[k]) + "\n";
    }
    hjmm::write_text(fs::path(args.out_dir) / "couple.csv", csv);
    std::cout << "coupling decay slope: " << result.slope << " +- " << result.slope_se << "\n";
    return 0;
}

int run_invariant_stats(const CommonArgs& args) {
    hjmm::RunConfig cfg = load(args);
    const json& exp = cfg.experiment;
    const hjmm::SimConfig sim = cfg.make_sim_config();
    std::vector<double> probes{0.5, 2.0, 5.0};
    if (exp.contains("probes")) probes = exp.at("probes").get<std::vector<double>>();
    const auto paths = static_cast<std::size_t>(exp.value("paths", 1000));
    const hjmm::Curve r0_b =
        curve_from_json(curve_spec_from_experiment(exp, "r0_b"), sim.grid, cfg.space.nu);

    hjmm::InvariantStats stats =
        hjmm::empirical_invariant_stats(sim, r0_b, probes, paths, args.threads);
    const hjmm::DissipativityReport cond =
        hjmm::check_invariant_condition(sim.spec, cfg.space, cfg.n_gamma);
    stats.condition_holds = cond.condition_holds;

    json rows = json::array();
    auto push_row = [&rows](const std::string& name, const hjmm::MomentRow& a,
                            const hjmm::MomentRow& b, double dse) {
        rows.push_back({{"observable", name},
                        {"mean_a", a.mean},
                        {"mean_b", b.mean},
                        {"var_a", a.variance},
                        {"var_b", b.variance},
                        {"discrepancy_se", dse}});
    };
    push_row("lp_nu_norm", stats.norm_a, stats.norm_b, stats.discrepancy_se[0]);
    for (std::size_t j = 0; j < probes.size(); ++j) {
        push_row("probe_x=" + hjmm::format_double(probes[j]), stats.probes_a[j],
                 stats.probes_b[j], stats.discrepancy_se[1 + j]);
    }
    json out{{"condition_holds", stats.condition_holds}, {"paths", paths}, {"rows", rows}};
    fs::create_directories(args.out_dir);
    hjmm::write_text(fs::path(args.out_dir) / "invariant_stats.json", out.dump(2) + "\n");
    std::cout << out.dump(2) << "\n";
    return 0;
}

int run_bond_price(const CommonArgs& args) {
    hjmm::RunConfig cfg = load(args);
    const json& exp = cfg.experiment;
    if (!exp.contains("maturities")) throw hjmm::ConfigError("experiment.maturities required");
    const auto maturities = exp.at("maturities").get<std::vector<double>>();
    const double at_time = exp.value("at_time", 0.0);

    const hjmm::SimConfig sim = cfg.make_sim_config();
    hjmm::Curve curve = sim.r0;
    if (at_time > 0.0) {
        hjmm::SimConfig run = sim;
        run.t_end = at_time;
        run.snapshot_stride = std::max<std::size_t>(1, run.n_steps());
        curve = hjmm::simulate(run).curves.back();
    }

    std::string csv = "t,T,price,yield\n";
    for (double maturity : maturities) {
        const hjmm::BondQuote quote = hjmm::bond_price(curve, at_time, maturity);
        csv += hjmm::format_double(quote.t) + "," + hjmm::format_double(quote.maturity) + "," +
               hjmm::format_double(quote.price) + "," + hjmm::format_double(quote.yield) + "\n";
    }
    fs::create_directories(args.out_dir);
    hjmm::write_text(fs::path(args.out_dir) / "bonds.csv", csv);
    std::cout << csv;
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"HJMM forward-curve laboratory"};
    app.require_subcommand(1);

    CommonArgs simulate_args, check_args, constants_args, converge_args, couple_args,
        stats_args, bond_args;

    add_common(app.add_subcommand("simulate", "simulate one path"), simulate_args);
    add_common(app.add_subcommand("check-invariant", "invariant-measure condition"), check_args,
               false);
    add_common(app.add_subcommand("estimate-constants", "Lipschitz and maximal constants"),
               constants_args);
    add_common(app.add_subcommand("converge", "dt-halving strong convergence study"),
               converge_args);
    add_common(app.add_subcommand("couple", "synchronous coupling decay"), couple_args);
    add_common(app.add_subcommand("invariant-stats", "stationary moment comparison"), stats_args);
    add_common(app.add_subcommand("bond-price", "zero-coupon quotes off the curve"), bond_args);

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand("simulate")) return run_simulate(simulate_args);
        if (app.got_subcommand("check-invariant")) return run_check_invariant(check_args);
        if (app.got_subcommand("estimate-constants")) return run_estimate_constants(constants_args);
        if (app.got_subcommand("converge")) return run_converge(converge_args);
        if (app.got_subcommand("couple")) return run_couple(couple_args);
        if (app.got_subcommand("invariant-stats")) return run_invariant_stats(stats_args);
        if (app.got_subcommand("bond-price")) return run_bond_price(bond_args);
    } catch (const hjmm::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const hjmm::NumericalAbort& e) {
        std::cerr << "numerical abort: " << e.what() << "\n";
        return 3;
    } catch (const hjmm::PicardNonConvergence& e) {
        std::cerr << "picard did not converge: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
