#include "hjmm/finance.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hjmm {

BondQuote bond_price(const Curve& curve, double t, double maturity) {
    const Grid& grid = *curve.grid;
    const double ttm = maturity - t;
    if (ttm < 0.0) throw std::invalid_argument("bond_price: maturity before valuation time");
    if (ttm > grid.x_max() + 1e-12) {
        throw std::invalid_argument("bond_price: maturity beyond the truncated curve");
    }

    // trapezoid of r over [0, ttm] with a partial last cell
    const double h = grid.h();
    double integral = 0.0;
    const auto full_cells = static_cast<std::size_t>(ttm / h);
    for (std::size_t i = 0; i < full_cells; ++i) {
        integral += 0.5 * h * (curve[i] + curve[i + 1]);
    }
    const double rest = ttm - static_cast<double>(full_cells) * h;
    if (rest > 1e-14 && full_cells < grid.n_cells()) {
        const double theta = rest / h;
        const double end_val =
            (1.0 - theta) * curve[full_cells] + theta * curve[full_cells + 1];
        integral += 0.5 * rest * (curve[full_cells] + end_val);
    }

    BondQuote quote;
    quote.t = t;
    quote.maturity = maturity;
    quote.price = std::exp(-integral);
    quote.yield = ttm > 0.0 ? integral / ttm : 0.0;
    return quote;
}

std::vector<ForwardRatePoint> musiela_to_hjm(const PathResult& path, double maturity) {
    std::vector<ForwardRatePoint> series;
    series.reserve(path.curves.size());
    for (std::size_t s = 0; s < path.curves.size(); ++s) {
        const double t = path.times[path.snapshot_steps[s]];
        const Curve& curve = path.curves[s];
        const Grid& grid = *curve.grid;
        const double x = maturity - t;
        if (x < -1e-12 || x > grid.x_max() + 1e-12) {
            throw std::invalid_argument("musiela_to_hjm: T - t outside the grid");
        }
        const double pos = std::clamp(x, 0.0, grid.x_max()) / grid.h();
        const auto lo = std::min(static_cast<std::size_t>(pos), grid.n_cells() - 1);
        const double theta = pos - static_cast<double>(lo);
        series.push_back({t, (1.0 - theta) * curve[lo] + theta * curve[lo + 1]});
    }
    return series;
}

}  // namespace hjmm
