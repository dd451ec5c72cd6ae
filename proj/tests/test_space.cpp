#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "hjmm/noise.hpp"
#include "hjmm/space.hpp"

using namespace hjmm;
using hjmm::testing::DecayingShape;
using hjmm::testing::grid_tol;
using hjmm::testing::simpson_oracle;

namespace {
const SpaceParams kNu1P2{1.0, 2.0};
}

TEST_CASE("grid invariants") {
    const auto grid = make_grid(40.0, 256, kNu1P2);
    CHECK(grid->h() == doctest::Approx(40.0 / 256));
    for (std::size_t i = 0; i + 1 < grid->n_nodes(); ++i) {
        CHECK(grid->node(i + 1) - grid->node(i) == doctest::Approx(grid->h()).epsilon(1e-12));
    }
    // positive weights summing to the exact weight integral
    double total = 0.0;
    for (double w : grid->weight_w()) {
        CHECK(w > 0.0);
        total += w;
    }
    CHECK(total == doctest::Approx(grid->weight_integral()).epsilon(1e-10));

    CHECK_THROWS(Grid(40.0, 1, kNu1P2));
    CHECK_THROWS(Grid(-1.0, 16, kNu1P2));
    CHECK_THROWS(Grid(40.0, 16, SpaceParams{-1.0, 2.0}));
    CHECK_THROWS(Grid(40.0, 16, SpaceParams{1.0, 1.5}));  // p < 2 out of scope
}

TEST_CASE("curve validation") {
    const auto grid = make_grid(40.0, 16, kNu1P2);
    CHECK_THROWS(Curve(grid, std::vector<double>(3, 0.0)));
    std::vector<double> bad(grid->n_nodes(), 0.0);
    bad[4] = std::nan("");
    CHECK_THROWS(Curve(grid, bad));
}

TEST_CASE("lp_nu_norm closed forms") {
    // zero function
    const auto grid = make_grid(40.0, 256, kNu1P2);
    CHECK(lp_nu_norm(sample_curve(grid, [](double) { return 0.0; })) == 0.0);

    // f = e^{-x}, nu=1, p=2: integral of e^{-2x} e^{x} = 1 - e^{-40}
    const auto fine = make_grid(40.0, 40960, kNu1P2);
    const Curve f = sample_curve(fine, [](double x) { return std::exp(-x); });
    CHECK(lp_nu_norm(f) == doctest::Approx(1.0).epsilon(1e-6));

    // indicator of [0,1]: norm^2 = e - 1 (grid-sampled step; O(h) at the jump)
    const Curve ind = sample_curve(fine, [](double x) { return x <= 1.0 ? 1.0 : 0.0; });
    CHECK(lp_nu_norm(ind) == doctest::Approx(std::sqrt(std::exp(1.0) - 1.0)).epsilon(1e-3));
}

TEST_CASE("l1_norm closed forms") {
    const auto grid = make_grid(40.0, 40960, kNu1P2);
    CHECK(l1_norm(sample_curve(grid, [](double) { return 0.0; })) == 0.0);
    CHECK(l1_norm(sample_curve(grid, [](double x) { return std::exp(-x); })) ==
          doctest::Approx(1.0).epsilon(1e-6));
    const Curve ind = sample_curve(grid, [](double x) { return x <= 2.0 ? 1.0 : 0.0; });
    CHECK(l1_norm(ind) == doctest::Approx(2.0).epsilon(1e-3));
}

TEST_CASE("embedding_bound formula") {
    CHECK(embedding_bound(SpaceParams{1.0, 2.0}) == doctest::Approx(1.0));
    CHECK(embedding_bound(SpaceParams{2.0, 2.0}) == doctest::Approx(std::sqrt(0.5)));
    CHECK(embedding_bound(SpaceParams{1.0, 4.0}) == doctest::Approx(std::pow(3.0, 0.75)));
}

TEST_CASE("weak_derivative stencils") {
    const auto grid = make_grid(10.0, 1000, kNu1P2);
    const Curve c = sample_curve(grid, [](double) { return 2.5; });
    for (double v : weak_derivative(c).values) CHECK(v == doctest::Approx(0.0));

    const Curve lin = sample_curve(grid, [](double x) { return 3.0 * x; });
    for (double v : weak_derivative(lin).values) CHECK(v == doctest::Approx(3.0).epsilon(1e-12));

    const Curve s = sample_curve(grid, [](double x) { return std::sin(x); });
    const Curve ds = weak_derivative(s);
    double max_err = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        max_err = std::max(max_err, std::fabs(ds[i] - std::cos(grid->node(i))));
    }
    CHECK(max_err < 1e-4);  // h = 0.01, second-order stencil
}

TEST_CASE("w1p_nu_norm closed form") {
    const auto grid = make_grid(40.0, 40960, kNu1P2);
    CHECK(w1p_nu_norm(sample_curve(grid, [](double) { return 0.0; })) == 0.0);
    const Curve f = sample_curve(grid, [](double x) { return std::exp(-x); });
    CHECK(w1p_nu_norm(f) == doctest::Approx(2.0).epsilon(1e-4));

    // growing curve: not representable, tail diagnostic fires
    const Curve grow = sample_curve(grid, [](double x) { return 3.0 * x; });
    CHECK_FALSE(tail_negligible(grow));
    CHECK(tail_negligible(f));
}

TEST_CASE("sup_weighted and sup_abs") {
    const auto grid = make_grid(40.0, 4096, kNu1P2);
    const Curve zero = sample_curve(grid, [](double) { return 0.0; });
    CHECK(sup_weighted(zero) == 0.0);
    CHECK(sup_abs(zero) == 0.0);

    const Curve f = sample_curve(grid, [](double x) { return std::exp(-x); });
    // e^{x} e^{-2x} peaks at x = 0 with value 1
    CHECK(sup_weighted(f) == doctest::Approx(1.0));
    CHECK(sup_abs(f) == doctest::Approx(1.0));
    // equality edge case of the sup bound: sup|f| = ||Df||_{L^1} = 1
    CHECK(sup_abs(f) <= l1_norm(weak_derivative(f)) + 1e-4);
}

TEST_CASE("embedding inequality on random decaying curves") {
    PhiloxStream rng(11, 0);
    const double bound = embedding_bound(kNu1P2);
    for (int k = 0; k < 100; ++k) {
        const DecayingShape shape = DecayingShape::draw(rng, kNu1P2);
        auto defect = [&](std::size_t n) {
            const auto g = make_grid(40.0, n, kNu1P2);
            const Curve f = shape.sample(g);
            return l1_norm(f) - bound * lp_nu_norm(f);
        };
        CHECK(defect(256) <= grid_tol(defect, 256));
    }
}

TEST_CASE("sup bounds on random decaying curves") {
    PhiloxStream rng(12, 0);
    const double p = kNu1P2.p;
    const double nu = kNu1P2.nu;
    for (int k = 0; k < 100; ++k) {
        const DecayingShape shape = DecayingShape::draw(rng, kNu1P2);
        // weighted sup against the additive proof constant
        auto defect_weighted = [&](std::size_t n) {
            const auto g = make_grid(40.0, n, kNu1P2);
            const Curve f = shape.sample(g);
            const double fp = std::pow(lp_nu_norm(f), p);
            const double dfp = std::pow(lp_nu_norm(weak_derivative(f)), p);
            return sup_weighted(f) - ((p - 1.0 + nu) * fp + dfp);
        };
        CHECK(defect_weighted(256) <= grid_tol(defect_weighted, 256));

        auto defect_sup = [&](std::size_t n) {
            const auto g = make_grid(40.0, n, kNu1P2);
            const Curve f = shape.sample(g);
            return sup_abs(f) - l1_norm(weak_derivative(f));
        };
        CHECK(defect_sup(256) <= grid_tol(defect_sup, 256));
    }
}

TEST_CASE("norm homogeneity and triangle inequality") {
    PhiloxStream rng(13, 0);
    const auto grid = make_grid(40.0, 256, kNu1P2);
    for (int k = 0; k < 50; ++k) {
        const Curve f = random_decaying_curve(grid, rng);
        const Curve g = random_decaying_curve(grid, rng);
        const double c = 4.0 * (rng.uniform() - 0.5);
        CHECK(lp_nu_norm(curve_scaled(f, c)) ==
              doctest::Approx(std::fabs(c) * lp_nu_norm(f)).epsilon(1e-12));
        std::vector<double> sum(f.size());
        for (std::size_t i = 0; i < sum.size(); ++i) sum[i] = f[i] + g[i];
        CHECK(lp_nu_norm(Curve(grid, sum)) <= lp_nu_norm(f) + lp_nu_norm(g) + 1e-12);
    }
}

TEST_CASE("quadrature refinement is second order") {
    const DecayingShape shape{{{1.3, 0.9, 1.7, 0.3}, {-0.4, 1.5, 0.6, 2.0}}};
    auto norm_at = [&](std::size_t n) {
        return lp_nu_norm(shape.sample(make_grid(40.0, n, kNu1P2)));
    };
    const double exact = std::sqrt(simpson_oracle(
        [&](double x) { return shape(x) * shape(x) * std::exp(x); }, 0.0, 40.0));
    const double e1 = std::fabs(norm_at(128) - exact);
    const double e2 = std::fabs(norm_at(256) - exact);
    const double e3 = std::fabs(norm_at(512) - exact);
    CHECK(e1 / e2 > 3.0);  // ~4 for O(h^2)
    CHECK(e2 / e3 > 3.0);
    CHECK(e1 / e2 < 5.5);
}

TEST_CASE("lp_nu_norm against the high-resolution oracle") {
    PhiloxStream rng(14, 0);
    for (int k = 0; k < 10; ++k) {
        const DecayingShape shape = DecayingShape::draw(rng, kNu1P2);
        const auto grid = make_grid(40.0, 2048, kNu1P2);
        const double exact = std::sqrt(simpson_oracle(
            [&](double x) { return shape(x) * shape(x) * std::exp(x); }, 0.0, 40.0));
        CHECK(lp_nu_norm(shape.sample(grid)) == doctest::Approx(exact).epsilon(1e-5));
    }
}
