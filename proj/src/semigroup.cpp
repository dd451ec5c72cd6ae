#include "hjmm/semigroup.hpp"

#include <cmath>
#include <stdexcept>

namespace hjmm {

ShiftSemigroup::ShiftSemigroup(GridPtr grid, ExtensionPolicy policy, double decay_rate)
    : grid_(std::move(grid)), policy_(policy), decay_rate_(decay_rate) {
    if (!grid_) throw std::invalid_argument("ShiftSemigroup: null grid");
    if (policy_ == ExtensionPolicy::exponential_decay && !(decay_rate_ >= 0.0)) {
        throw std::invalid_argument("ShiftSemigroup: decay rate must be >= 0");
    }
}

double ShiftSemigroup::extend(const Curve& f, double x) const {
    switch (policy_) {
        case ExtensionPolicy::zero:
            return 0.0;
        case ExtensionPolicy::constant_last:
            return f.values.back();
        case ExtensionPolicy::exponential_decay:
            return f.values.back() * std::exp(-decay_rate_ * (x - grid_->x_max()));
    }
    return 0.0;
}

void ShiftSemigroup::shift_lattice(std::size_t m_cells, std::vector<double>& values) const {
    const std::size_t n = values.size();
    if (m_cells == 0) return;
    const double last = values.back();  // f(x_max), the anchor for extensions
    if (m_cells > n) m_cells = n;
    for (std::size_t i = 0; i + m_cells < n; ++i) values[i] = values[i + m_cells];
    for (std::size_t i = n - m_cells; i < n; ++i) {
        switch (policy_) {
            case ExtensionPolicy::zero:
                values[i] = 0.0;
                break;
            case ExtensionPolicy::constant_last:
                values[i] = last;
                break;
            case ExtensionPolicy::exponential_decay: {
                const double x = grid_->node(i) + static_cast<double>(m_cells) * grid_->h();
                values[i] = last * std::exp(-decay_rate_ * (x - grid_->x_max()));
                break;
            }
        }
    }
}

Curve ShiftSemigroup::shift(double t, const Curve& f) const {
    if (t < 0.0) throw std::invalid_argument("shift: t must be >= 0");
    const Grid& g = *grid_;
    const double h = g.h();
    const std::size_t n = f.size();

    double m_real = t / h;
    auto m = static_cast<std::size_t>(std::llround(m_real));
    const bool lattice = std::fabs(m_real - static_cast<double>(m)) < 1e-9;
    if (!lattice) m = static_cast<std::size_t>(std::floor(m_real));
    const double theta = lattice ? 0.0 : (t - static_cast<double>(m) * h) / h;

    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t lo = i + m;
        const double a = (lo < n) ? f[lo] : extend(f, g.node(i) + t - theta * h);
        if (theta == 0.0) {
            out[i] = a;
            continue;
        }
        const std::size_t hi = lo + 1;
        const double b = (hi < n) ? f[hi] : extend(f, g.node(i) + t + (1.0 - theta) * h);
        out[i] = (1.0 - theta) * a + theta * b;
    }
    return Curve(f.grid, std::move(out));
}

Curve ShiftSemigroup::generator_apply(const Curve& f) const { return weak_derivative(f); }

double contraction_bound(double t, const SpaceParams& params) {
    if (t < 0.0) throw std::invalid_argument("contraction_bound: t must be >= 0");
    return std::exp(-params.nu * t / params.p);
}

}  // namespace hjmm
