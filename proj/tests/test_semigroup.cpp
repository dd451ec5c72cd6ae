#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "hjmm/noise.hpp"
#include "hjmm/semigroup.hpp"

using namespace hjmm;
using hjmm::testing::DecayingShape;
using hjmm::testing::grid_tol;

namespace {
const SpaceParams kNu1P2{1.0, 2.0};
}

TEST_CASE("shift identity and rejection") {
    const auto grid = make_grid(20.0, 128, kNu1P2);
    const ShiftSemigroup sg(grid);
    PhiloxStream rng(21, 0);
    const Curve f = random_decaying_curve(grid, rng);
    const Curve same = sg.shift(0.0, f);
    for (std::size_t i = 0; i < f.size(); ++i) CHECK(same[i] == f[i]);
    CHECK_THROWS(sg.shift(-0.5, f));
}

TEST_CASE("lattice shift of an exponential is exact") {
    const auto grid = make_grid(20.0, 128, kNu1P2);
    const ShiftSemigroup sg(grid);
    const Curve f = sample_curve(grid, [](double x) { return std::exp(-x); });
    const double t = 16.0 * grid->h();
    const Curve g = sg.shift(t, f);
    for (std::size_t i = 0; i + 16 < f.size(); ++i) {
        CHECK(g[i] == doctest::Approx(std::exp(-t) * f[i]).epsilon(1e-13));
    }
    // norm contraction holds strictly for this curve: e^{-t} <= e^{-t/2}
    CHECK(lp_nu_norm(g) <= contraction_bound(t, kNu1P2) * lp_nu_norm(f));
}

TEST_CASE("contraction_bound values") {
    CHECK(contraction_bound(0.0, kNu1P2) == 1.0);
    CHECK(contraction_bound(2.0, kNu1P2) == doctest::Approx(std::exp(-1.0)));
    CHECK(contraction_bound(1.0, SpaceParams{4.0, 2.0}) == doctest::Approx(std::exp(-2.0)));
}

TEST_CASE("semigroup law on and off the lattice") {
    const auto grid = make_grid(20.0, 128, kNu1P2);
    const ShiftSemigroup sg(grid);
    PhiloxStream rng(22, 0);
    const Curve f = random_decaying_curve(grid, rng);

    const double h = grid->h();
    const Curve both = sg.shift(3.0 * h, sg.shift(5.0 * h, f));
    const Curve once = sg.shift(8.0 * h, f);
    for (std::size_t i = 0; i < f.size(); ++i) CHECK(both[i] == once[i]);  // exact on lattice

    const Curve off_both = sg.shift(0.4 * h, sg.shift(0.3 * h, f));
    const Curve off_once = sg.shift(0.7 * h, f);
    double max_err = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        max_err = std::max(max_err, std::fabs(off_both[i] - off_once[i]));
    }
    CHECK(max_err < 0.5 * h * h * 50.0);  // interpolation error scale
}

TEST_CASE("contraction property on random curves, both norms") {
    PhiloxStream rng(23, 0);
    for (int k = 0; k < 60; ++k) {
        const DecayingShape shape = DecayingShape::draw(rng, kNu1P2);
        const int steps = 1 + static_cast<int>(rng.uniform() * 40.0);
        auto defect_lp = [&](std::size_t n) {
            const auto g = make_grid(40.0, n, kNu1P2);
            const ShiftSemigroup sg(g);
            const Curve f = shape.sample(g);
            const double t = static_cast<double>(steps) * g->h();
            return lp_nu_norm(sg.shift(t, f)) - contraction_bound(t, kNu1P2) * lp_nu_norm(f);
        };
        CHECK(defect_lp(256) <= grid_tol(defect_lp, 256));

        // same rate tested for the Sobolev norm (derived, not quoted)
        auto defect_w = [&](std::size_t n) {
            const auto g = make_grid(40.0, n, kNu1P2);
            const ShiftSemigroup sg(g);
            const Curve f = shape.sample(g);
            const double t = static_cast<double>(steps) * g->h();
            return w1p_nu_norm(sg.shift(t, f)) - contraction_bound(t, kNu1P2) * w1p_nu_norm(f);
        };
        CHECK(defect_w(256) <= grid_tol(defect_w, 256));
    }
}

TEST_CASE("generator consistency") {
    const auto grid = make_grid(20.0, 2000, kNu1P2);
    const ShiftSemigroup sg(grid);

    const Curve c = sample_curve(grid, [](double) { return 1.5; });
    for (double v : sg.generator_apply(c).values) CHECK(v == doctest::Approx(0.0));

    const Curve f = sample_curve(grid, [](double x) { return std::exp(-x); });
    const Curve af = sg.generator_apply(f);
    for (std::size_t i = 0; i < f.size(); i += 100) {
        CHECK(af[i] == doctest::Approx(-std::exp(-grid->node(i))).epsilon(1e-4));
    }

    // ||(S(eps)f - f)/eps - Df|| = O(eps) + O(h^2) for smooth decaying f
    const Curve s = sample_curve(grid, [](double x) { return std::exp(-x) * std::sin(x); });
    const Curve ds = sg.generator_apply(s);
    double prev_err = 1e9;
    for (double eps : {8.0 * grid->h(), 4.0 * grid->h(), 2.0 * grid->h()}) {
        const Curve shifted = sg.shift(eps, s);
        std::vector<double> diff(s.size());
        for (std::size_t i = 0; i < s.size(); ++i) {
            diff[i] = (shifted[i] - s[i]) / eps - ds[i];
        }
        const double err = lp_nu_norm(Curve(grid, diff));
        CHECK(err < prev_err);
        prev_err = err;
    }
    CHECK(prev_err < 0.05);
}

TEST_CASE("extension policies") {
    const auto grid = make_grid(10.0, 100, kNu1P2);
    const Curve f = sample_curve(grid, [](double x) { return std::exp(-0.8 * x); });
    const double t = 20.0 * grid->h();  // shift of 2.0

    const ShiftSemigroup zero(grid, ExtensionPolicy::zero);
    const Curve fz = zero.shift(t, f);
    CHECK(fz.values.back() == 0.0);

    const ShiftSemigroup clast(grid, ExtensionPolicy::constant_last);
    const Curve fc = clast.shift(t, f);
    CHECK(fc.values.back() == doctest::Approx(f.values.back()));

    const ShiftSemigroup edecay(grid, ExtensionPolicy::exponential_decay, 0.8);
    const Curve fe = edecay.shift(t, f);
    CHECK(fe.values.back() ==
          doctest::Approx(f.values.back() * std::exp(-0.8 * 2.0)).epsilon(1e-12));
}
