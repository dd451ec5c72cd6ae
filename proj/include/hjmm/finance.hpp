#pragma once

#include <vector>

#include "hjmm/solver.hpp"
#include "hjmm/space.hpp"

namespace hjmm {

// Zero-coupon bond quote off a forward curve in the Musiela parametrization:
// P(t, T) = exp(-\int_0^{T-t} r(t)(x) dx).
struct BondQuote {
    double t = 0.0;
    double maturity = 0.0;
    double price = 1.0;
    double yield = 0.0;  // continuously compounded, -log(price)/(T-t)
};

// curve is r(t); requires 0 <= T - t <= x_max (rejected otherwise).
BondQuote bond_price(const Curve& curve, double t, double maturity);

// HJM coordinates from a Musiela path: the fixed-maturity forward rate series
// f(t, T) = r(t)(T - t) read off the stored snapshots (linear interpolation in
// x; snapshots give the t sampling). Rejects T - t outside [0, x_max].
struct ForwardRatePoint {
    double t = 0.0;
    double value = 0.0;
};
std::vector<ForwardRatePoint> musiela_to_hjm(const PathResult& path, double maturity);

}  // namespace hjmm
