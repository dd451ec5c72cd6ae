#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "hjmm/noise.hpp"

using namespace hjmm;

TEST_CASE("reproducibility: same (seed, stream) gives bit-identical draws") {
    NoiseModel a(4, 99, 3);
    NoiseModel b(4, 99, 3);
    for (int k = 0; k < 50; ++k) {
        const auto ia = a.sample_increment(0.01);
        const auto ib = b.sample_increment(0.01);
        for (std::size_t j = 0; j < ia.size(); ++j) CHECK(ia[j] == ib[j]);
    }
    NoiseModel c(4, 99, 4);  // different stream differs
    bool any_diff = false;
    NoiseModel a2(4, 99, 3);
    for (int k = 0; k < 5; ++k) {
        const auto ia = a2.sample_increment(0.01);
        const auto ic = c.sample_increment(0.01);
        for (std::size_t j = 0; j < ia.size(); ++j) any_diff |= (ia[j] != ic[j]);
    }
    CHECK(any_diff);
    CHECK_THROWS(a.sample_increment(0.0));
    CHECK_THROWS(NoiseModel(0, 1, 0));
}

TEST_CASE("increment moments at dt = 0.01") {
    const std::size_t n = 100000;
    const double dt = 0.01;
    NoiseModel model(2, 7, 0);
    double sum0 = 0.0, sumsq0 = 0.0, cross = 0.0;
    std::vector<double> sums;
    sums.reserve(n);
    for (std::size_t k = 0; k < n; ++k) {
        const auto inc = model.sample_increment(dt);
        sum0 += inc[0];
        sumsq0 += inc[0] * inc[0];
        cross += inc[0] * inc[1];
        sums.push_back(inc[0]);
    }
    const double mean = sum0 / static_cast<double>(n);
    const double var = sumsq0 / static_cast<double>(n);
    const double cov = cross / static_cast<double>(n);
    const double root_n = std::sqrt(static_cast<double>(n));
    CHECK(std::fabs(mean) < 4.0 * std::sqrt(dt) / root_n);
    CHECK(std::fabs(var - dt) < 5e-4);
    CHECK(std::fabs(cov) < 4.0 * dt / root_n);  // orthonormal coordinates
}

TEST_CASE("independent streams are empirically uncorrelated") {
    const std::size_t n = 50000;
    NoiseModel a(1, 31, 0);
    NoiseModel b(1, 31, 1);
    double cross = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        cross += a.sample_increment(1.0)[0] * b.sample_increment(1.0)[0];
    }
    CHECK(std::fabs(cross / static_cast<double>(n)) < 4.0 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("Brownian scaling: summed increments are N(0, t) by Kolmogorov-Smirnov") {
    // 2000 paths of 32 increments each over [0, 2]
    const std::size_t paths = 2000;
    const std::size_t steps = 32;
    const double t = 2.0;
    std::vector<double> endpoints(paths);
    for (std::size_t p = 0; p < paths; ++p) {
        NoiseModel model(1, 555, p);
        double acc = 0.0;
        for (std::size_t k = 0; k < steps; ++k) {
            acc += model.sample_increment(t / static_cast<double>(steps))[0];
        }
        endpoints[p] = acc;
    }
    std::sort(endpoints.begin(), endpoints.end());
    double ks = 0.0;
    for (std::size_t i = 0; i < paths; ++i) {
        const double z = endpoints[i] / std::sqrt(t);
        const double cdf = 0.5 * std::erfc(-z / std::sqrt(2.0));
        const double hi = static_cast<double>(i + 1) / static_cast<double>(paths);
        const double lo = static_cast<double>(i) / static_cast<double>(paths);
        ks = std::max({ks, std::fabs(cdf - hi), std::fabs(cdf - lo)});
    }
    // 1% critical value of the KS statistic is about 1.63 / sqrt(n)
    CHECK(ks < 1.63 / std::sqrt(static_cast<double>(paths)));
}

TEST_CASE("NoisePath coarsening sums fine increments") {
    NoiseModel model(3, 17, 2);
    const NoisePath fine = NoisePath::sample(model, 16, 0.125);
    const NoisePath coarse = fine.coarsen(4);
    CHECK(coarse.n_steps == 4);
    for (std::size_t kc = 0; kc < 4; ++kc) {
        for (std::size_t j = 0; j < 3; ++j) {
            double sum = 0.0;
            for (std::size_t k = 4 * kc; k < 4 * (kc + 1); ++k) sum += fine.step(k)[j];
            CHECK(coarse.step(kc)[j] == doctest::Approx(sum).epsilon(1e-15));
        }
    }
    CHECK_THROWS(fine.coarsen(5));
}
