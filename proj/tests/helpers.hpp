#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "hjmm/noise.hpp"
#include "hjmm/space.hpp"

namespace hjmm::testing {

// Analytic random curve in the representable decay class; sampleable on any
// grid so the same curve can be compared across resolutions.
struct DecayingShape {
    struct Term {
        double c, a, b, phase;
    };
    std::vector<Term> terms;

    static DecayingShape draw(PhiloxStream& rng, const SpaceParams& sp) {
        DecayingShape shape;
        const double base = sp.nu / sp.p;
        const int n_terms = 1 + static_cast<int>(rng.uniform() * 3.0);
        for (int k = 0; k < n_terms; ++k) {
            shape.terms.push_back({4.0 * (rng.uniform() - 0.5),
                                   base + 0.2 + 1.8 * rng.uniform(), 3.0 * rng.uniform(),
                                   6.283185307179586 * rng.uniform()});
        }
        return shape;
    }

    double operator()(double x) const {
        double v = 0.0;
        for (const auto& t : terms) v += t.c * std::exp(-t.a * x) * std::cos(t.b * x + t.phase);
        return v;
    }

    Curve sample(const GridPtr& grid) const {
        return sample_curve(grid, [this](double x) { return (*this)(x); });
    }
};

// Discretization tolerance by Richardson comparison: ten times the observed
// self-convergence gap of the functional between resolutions n and 2n.
inline double grid_tol(const std::function<double(std::size_t)>& eval, std::size_t n_cells) {
    const double coarse = eval(n_cells);
    const double fine = eval(2 * n_cells);
    return 10.0 * std::fabs(coarse - fine) + 1e-12;
}

// Composite-Simpson quadrature oracle at very high resolution, independent of
// the grid quadrature under test.
inline double simpson_oracle(const std::function<double(double)>& f, double a, double b,
                             std::size_t n_intervals = 200000) {
    if (n_intervals % 2 == 1) ++n_intervals;
    const double h = (b - a) / static_cast<double>(n_intervals);
    double acc = f(a) + f(b);
    for (std::size_t i = 1; i < n_intervals; ++i) {
        acc += f(a + static_cast<double>(i) * h) * ((i % 2 == 1) ? 4.0 : 2.0);
    }
    return acc * h / 3.0;
}

}  // namespace hjmm::testing
