#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "hjmm/ergodicity.hpp"
#include "hjmm/solver.hpp"

namespace hjmm {

// A parsed run configuration. Strict: unknown keys are rejected, defaults are
// materialized so effective_json() reproduces the run exactly.
struct RunConfig {
    SpaceParams space;
    double x_max = 0.0;  // materialized default: 40/nu
    std::size_t n_cells = 256;

    // volatility section
    std::string family = "exponential";  // exponential | vector_exponential
    std::vector<ExpFactor> factors;
    double n_gamma = 1.0;

    std::size_t dim_h = 1;
    std::uint64_t seed = 1;

    // run section
    std::string scheme = "exp_euler";
    double dt = 0.0;
    double t_end = 1.0;
    std::size_t snapshots_stride = 1;
    std::optional<double> truncation_n;
    PicardParams picard;

    // initial curve: flat level, or scale * e^{-rate x}
    std::string r0_kind = "exp";
    double r0_scale = 0.05;
    double r0_rate = 0.0;  // materialized default: nu

    nlohmann::json experiment;  // verb-specific, passed through

    static RunConfig from_json(const nlohmann::json& doc);
    static RunConfig from_file(const std::filesystem::path& path);
    nlohmann::json effective_json() const;

    GridPtr make_grid_ptr() const;
    VolatilitySpec make_spec(const GridPtr& grid) const;
    Curve make_r0(const GridPtr& grid) const;
    SimConfig make_sim_config() const;
};

// Thrown on schema violations; the CLI maps it to exit code 2.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

nlohmann::json report_to_json(const ConstantsReport& report);
nlohmann::json dissipativity_to_json(const DissipativityReport& report);

// CSV output, full round-trip precision, LF line endings.
void write_curve_csv(const std::filesystem::path& path, const Curve& curve);
Curve read_curve_csv(const std::filesystem::path& path, const GridPtr& grid);
void write_norms_csv(const std::filesystem::path& path, const PathResult& result);
// long format t,x,value over the stored snapshots
void write_path_csv(const std::filesystem::path& path, const PathResult& result);
void write_text(const std::filesystem::path& path, const std::string& text);

std::string format_double(double v);  // shortest round-trip decimal

}  // namespace hjmm
