#pragma once

#include "hjmm/space.hpp"

namespace hjmm {

// How shift(t, f) fills values that fall beyond x_max.
enum class ExtensionPolicy {
    zero,             // f(x) = 0 for x > x_max; conservative for norms
    constant_last,    // f(x) = f(x_max)
    exponential_decay // f(x) = f(x_max) e^{-rate (x - x_max)}
};

// The shift semigroup S(t)f(x) = f(t + x) on grid curves. Shifts by integer
// multiples of the grid spacing are exact index shifts; off-lattice shifts
// interpolate linearly.
class ShiftSemigroup {
public:
    explicit ShiftSemigroup(GridPtr grid, ExtensionPolicy policy = ExtensionPolicy::zero,
                            double decay_rate = 0.0);

    const GridPtr& grid() const { return grid_; }
    ExtensionPolicy policy() const { return policy_; }

    // t >= 0 (negative t rejected). Preserves Curve validity.
    Curve shift(double t, const Curve& f) const;

    // In-place exact lattice shift by m cells; the hot path of the solver.
    void shift_lattice(std::size_t m_cells, std::vector<double>& values) const;

    // Af = Df for the shift semigroup; discrete stand-in via weak_derivative.
    Curve generator_apply(const Curve& f) const;

private:
    double extend(const Curve& f, double x) const;

    GridPtr grid_;
    ExtensionPolicy policy_;
    double decay_rate_;
};

// Operator-norm bound e^{-nu t / p} of S(t) on L^p_nu.
double contraction_bound(double t, const SpaceParams& params);

}  // namespace hjmm
