#include "hjmm/run_config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace hjmm {

namespace {

using nlohmann::json;

void require_keys(const json& obj, const std::string& where,
                  const std::set<std::string>& allowed) {
    if (!obj.is_object()) throw ConfigError(where + ": expected an object");
    for (const auto& [key, value] : obj.items()) {
        if (!allowed.contains(key)) {
            throw ConfigError(where + ": unknown key '" + key + "'");
        }
    }
}

double get_num(const json& obj, const std::string& where, const std::string& key,
               std::optional<double> fallback = std::nullopt) {
    if (!obj.contains(key)) {
        if (fallback) return *fallback;
        throw ConfigError(where + ": missing '" + key + "'");
    }
    if (!obj.at(key).is_number()) throw ConfigError(where + "." + key + ": expected a number");
    return obj.at(key).get<double>();
}

Saturation saturation_from_string(const std::string& name) {
    if (name == "one") return Saturation::one;
    if (name == "tanh") return Saturation::tanh_sat;
    if (name == "rational") return Saturation::rational;
    throw ConfigError("volatility: unknown saturation '" + name + "'");
}

std::string saturation_to_string(Saturation s) {
    switch (s) {
        case Saturation::one:
            return "one";
        case Saturation::tanh_sat:
            return "tanh";
        case Saturation::rational:
            return "rational";
    }
    return "one";
}

ExpFactor factor_from_json(const json& obj, const std::string& where) {
    require_keys(obj, where, {"sigma", "lambda", "saturation"});
    ExpFactor f;
    f.sigma = get_num(obj, where, "sigma");
    f.lambda = get_num(obj, where, "lambda");
    f.sat = saturation_from_string(obj.value("saturation", std::string("tanh")));
    return f;
}

}  // namespace

RunConfig RunConfig::from_json(const json& doc) {
    require_keys(doc, "config", {"space", "grid", "volatility", "noise", "run", "experiment"});
    RunConfig cfg;

    const json& space = doc.at("space");
    require_keys(space, "space", {"nu", "p"});
    cfg.space.nu = get_num(space, "space", "nu");
    cfg.space.p = get_num(space, "space", "p", 2.0);
    try {
        cfg.space.validate();
    } catch (const std::exception& e) {
        throw ConfigError(e.what());
    }

    const json grid = doc.value("grid", json::object());
    require_keys(grid, "grid", {"x_max", "n_cells"});
    cfg.x_max = get_num(grid, "grid", "x_max", default_x_max(cfg.space));
    cfg.n_cells = static_cast<std::size_t>(get_num(grid, "grid", "n_cells", 256.0));

    const json& vol = doc.at("volatility");
    require_keys(vol, "volatility", {"family", "params", "N"});
    cfg.family = vol.value("family", std::string("exponential"));
    cfg.n_gamma = get_num(vol, "volatility", "N", 1.0);
    const json params = vol.value("params", json::object());
    if (cfg.family == "exponential") {
        require_keys(params, "volatility.params", {"sigma", "lambda", "saturation"});
        cfg.factors = {factor_from_json(params, "volatility.params")};
    } else if (cfg.family == "vector_exponential") {
        require_keys(params, "volatility.params", {"factors"});
        if (!params.contains("factors") || !params.at("factors").is_array() ||
            params.at("factors").empty()) {
            throw ConfigError("volatility.params.factors: expected a non-empty array");
        }
        for (const auto& f : params.at("factors")) {
            cfg.factors.push_back(factor_from_json(f, "volatility.params.factors[]"));
        }
    } else {
        throw ConfigError("volatility.family: unknown family '" + cfg.family + "'");
    }

    const json& noise = doc.at("noise");
    require_keys(noise, "noise", {"dim_h", "seed"});
    cfg.dim_h = static_cast<std::size_t>(get_num(noise, "noise", "dim_h", 1.0));
    cfg.seed = static_cast<std::uint64_t>(get_num(noise, "noise", "seed", 1.0));
    if (cfg.family == "vector_exponential" && cfg.dim_h != cfg.factors.size()) {
        throw ConfigError("noise.dim_h must match the number of volatility factors");
    }
    if (cfg.family == "exponential" && cfg.dim_h != 1) {
        throw ConfigError("noise.dim_h must be 1 for the scalar exponential family");
    }

    const json& run = doc.at("run");
    require_keys(run, "run",
                 {"scheme", "dt", "t_end", "snapshots_stride", "truncation_n", "picard", "r0"});
    cfg.scheme = run.value("scheme", std::string("exp_euler"));
    if (cfg.scheme != "exp_euler" && cfg.scheme != "picard") {
        throw ConfigError("run.scheme: expected exp_euler or picard");
    }
    cfg.t_end = get_num(run, "run", "t_end", 1.0);
    const double default_dt = (cfg.x_max / static_cast<double>(cfg.n_cells));
    cfg.dt = get_num(run, "run", "dt", default_dt);
    cfg.snapshots_stride =
        static_cast<std::size_t>(get_num(run, "run", "snapshots_stride", 1.0));
    if (run.contains("truncation_n") && !run.at("truncation_n").is_null()) {
        cfg.truncation_n = get_num(run, "run", "truncation_n");
    }
    const json picard = run.value("picard", json::object());
    require_keys(picard, "run.picard", {"tol", "max_iter", "window"});
    cfg.picard.tol = get_num(picard, "run.picard", "tol", 1e-8);
    cfg.picard.max_iter = static_cast<int>(get_num(picard, "run.picard", "max_iter", 60.0));
    if (picard.contains("window") && !picard.at("window").is_null()) {
        cfg.picard.window = get_num(picard, "run.picard", "window");
    }

    const json r0 = run.value("r0", json::object());
    require_keys(r0, "run.r0", {"kind", "scale", "rate", "level"});
    cfg.r0_kind = r0.value("kind", std::string("exp"));
    if (cfg.r0_kind == "exp") {
        cfg.r0_scale = get_num(r0, "run.r0", "scale", 0.05);
        cfg.r0_rate = get_num(r0, "run.r0", "rate", cfg.space.nu);
    } else if (cfg.r0_kind == "flat") {
        cfg.r0_scale = get_num(r0, "run.r0", "level", 0.05);
        cfg.r0_rate = 0.0;
    } else if (cfg.r0_kind == "zero") {
        cfg.r0_scale = 0.0;
        cfg.r0_rate = 0.0;
    } else {
        throw ConfigError("run.r0.kind: expected exp, flat or zero");
    }

    cfg.experiment = doc.value("experiment", json::object());
    return cfg;
}

RunConfig RunConfig::from_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path.string());
    json doc;
    try {
        in >> doc;
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    return from_json(doc);
}

nlohmann::json RunConfig::effective_json() const {
    json vol_params;
    if (family == "exponential") {
        vol_params = {{"sigma", factors[0].sigma},
                      {"lambda", factors[0].lambda},
                      {"saturation", saturation_to_string(factors[0].sat)}};
    } else {
        json arr = json::array();
        for (const auto& f : factors) {
            arr.push_back({{"sigma", f.sigma},
                           {"lambda", f.lambda},
                           {"saturation", saturation_to_string(f.sat)}});
        }
        vol_params = {{"factors", arr}};
    }
    json r0;
    if (r0_kind == "exp") {
        r0 = {{"kind", "exp"}, {"scale", r0_scale}, {"rate", r0_rate}};
    } else if (r0_kind == "flat") {
        r0 = {{"kind", "flat"}, {"level", r0_scale}};
    } else {
        r0 = {{"kind", "zero"}};
    }
    json picard_json = {{"tol", picard.tol}, {"max_iter", picard.max_iter}};
    if (picard.window) picard_json["window"] = *picard.window;

    json run = {{"scheme", scheme},
                {"dt", dt},
                {"t_end", t_end},
                {"snapshots_stride", snapshots_stride},
                {"picard", picard_json},
                {"r0", r0}};
    if (truncation_n) run["truncation_n"] = *truncation_n;

    return json{{"space", {{"nu", space.nu}, {"p", space.p}}},
                {"grid", {{"x_max", x_max}, {"n_cells", n_cells}}},
                {"volatility", {{"family", family}, {"params", vol_params}, {"N", n_gamma}}},
                {"noise", {{"dim_h", dim_h}, {"seed", seed}}},
                {"run", run},
                {"experiment", experiment}};
}

GridPtr RunConfig::make_grid_ptr() const { return make_grid(x_max, n_cells, space); }

VolatilitySpec RunConfig::make_spec(const GridPtr& grid) const {
    if (family == "exponential") {
        return VolatilitySpec::exponential(grid, factors[0].sigma, factors[0].lambda,
                                           factors[0].sat);
    }
    return VolatilitySpec::vector_exponential(grid, factors);
}

Curve RunConfig::make_r0(const GridPtr& grid) const {
    if (r0_kind == "flat") {
        return sample_curve(grid, [&](double) { return r0_scale; });
    }
    if (r0_kind == "zero") {
        return sample_curve(grid, [](double) { return 0.0; });
    }
    return sample_curve(grid, [&](double x) { return r0_scale * std::exp(-r0_rate * x); });
}

SimConfig RunConfig::make_sim_config() const {
    const GridPtr grid = make_grid_ptr();
    SimConfig sim{.space = space,
                  .grid = grid,
                  .spec = make_spec(grid),
                  .noise = NoiseModel(dim_h, seed),
                  .r0 = make_r0(grid),
                  .t_end = t_end,
                  .dt = dt,
                  .scheme = scheme == "picard" ? Scheme::picard : Scheme::exp_euler,
                  .picard = picard,
                  .truncation_n = truncation_n,
                  .snapshot_stride = snapshots_stride};
    try {
        sim.validate();
    } catch (const std::exception& e) {
        throw ConfigError(e.what());
    }
    return sim;
}

namespace {

json entry_to_json(const ConstantEntry& e) {
    json out{{"value", e.value}, {"provenance", e.provenance}};
    if (e.samples > 0) out["samples"] = e.samples;
    return out;
}

}  // namespace

json report_to_json(const ConstantsReport& report) {
    return json{{"L_F", entry_to_json(report.L_F)},
                {"L_G", entry_to_json(report.L_G)},
                {"Lbar_F", entry_to_json(report.Lbar_F)},
                {"Lbar_G", entry_to_json(report.Lbar_G)},
                {"K_maximal", entry_to_json(report.K_maximal)},
                {"N_gamma", entry_to_json(report.N_gamma)}};
}

json dissipativity_to_json(const DissipativityReport& report) {
    return json{{"omega1", report.omega1},
                {"omega2", report.omega2},
                {"omega3", report.omega3},
                {"N", report.n_gamma},
                {"nu_half", report.nu_half},
                {"condition_holds", report.condition_holds},
                {"admissible_omega_hi", report.admissible_hi},
                {"omega", report.omega},
                {"n0", report.n0}};
}

std::string format_double(double v) {
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
}

void write_curve_csv(const std::filesystem::path& path, const Curve& curve) {
    std::ostringstream os;
    os << "x,value\n";
    for (std::size_t i = 0; i < curve.size(); ++i) {
        os << format_double(curve.grid->node(i)) << ',' << format_double(curve[i]) << '\n';
    }
    write_text(path, os.str());
}

Curve read_curve_csv(const std::filesystem::path& path, const GridPtr& grid) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    std::string line;
    std::getline(in, line);  // header
    std::vector<double> values;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto comma = line.find(',');
        values.push_back(std::stod(line.substr(comma + 1)));
    }
    return Curve(grid, std::move(values));
}

void write_norms_csv(const std::filesystem::path& path, const PathResult& result) {
    std::ostringstream os;
    os << "t,norm\n";
    for (std::size_t k = 0; k < result.times.size(); ++k) {
        os << format_double(result.times[k]) << ',' << format_double(result.norms[k]) << '\n';
    }
    write_text(path, os.str());
}

void write_path_csv(const std::filesystem::path& path, const PathResult& result) {
    std::ostringstream os;
    os << "t,x,value\n";
    for (std::size_t s = 0; s < result.curves.size(); ++s) {
        const double t = result.times[result.snapshot_steps[s]];
        const Curve& curve = result.curves[s];
        for (std::size_t i = 0; i < curve.size(); ++i) {
            os << format_double(t) << ',' << format_double(curve.grid->node(i)) << ','
               << format_double(curve[i]) << '\n';
        }
    }
    write_text(path, os.str());
}

}  // namespace hjmm
