#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include "hjmm/kernels.hpp"
#include "hjmm/noise.hpp"

using namespace hjmm;

namespace {

std::vector<double> random_vec(PhiloxStream& rng, std::size_t n, double scale = 2.0) {
    std::vector<double> v(n);
    for (auto& x : v) x = scale * (rng.uniform() - 0.5);
    return v;
}

}  // namespace

TEST_CASE("every available kernel set matches the scalar reference") {
    const auto& ref = kernels::scalar_set();
    PhiloxStream rng(2024, 7);
    // odd sizes exercise the vector remainders
    for (std::size_t n : {1u, 3u, 4u, 7u, 8u, 31u, 64u, 257u, 1023u}) {
        const auto a = random_vec(rng, n);
        const auto b = random_vec(rng, n);
        auto w = random_vec(rng, n);
        for (auto& x : w) x = std::fabs(x) + 0.01;

        for (const kernels::KernelSet* set : kernels::available_sets()) {
            CAPTURE(set->name);
            CAPTURE(n);
            CHECK(set->dot(a.data(), b.data(), n) ==
                  doctest::Approx(ref.dot(a.data(), b.data(), n)).epsilon(1e-13));
            CHECK(set->wsum_sq(w.data(), a.data(), n) ==
                  doctest::Approx(ref.wsum_sq(w.data(), a.data(), n)).epsilon(1e-13));
            for (double p : {2.0, 3.0, 4.5}) {
                CHECK(set->wsum_abs_pow(w.data(), a.data(), n, p) ==
                      doctest::Approx(ref.wsum_abs_pow(w.data(), a.data(), n, p))
                          .epsilon(1e-13));
                CHECK(set->wmax_abs_pow(w.data(), a.data(), n, p) ==
                      doctest::Approx(ref.wmax_abs_pow(w.data(), a.data(), n, p))
                          .epsilon(1e-13));
            }
            CHECK(set->max_abs(a.data(), n) == doctest::Approx(ref.max_abs(a.data(), n)));

            auto y1 = b;
            auto y2 = b;
            set->axpy(y1.data(), 0.37, a.data(), n);
            ref.axpy(y2.data(), 0.37, a.data(), n);
            for (std::size_t i = 0; i < n; ++i) {
                CHECK(y1[i] == doctest::Approx(y2[i]).epsilon(1e-14));
            }

            auto o1 = w;
            auto o2 = w;
            set->mul_acc(o1.data(), a.data(), b.data(), n);
            ref.mul_acc(o2.data(), a.data(), b.data(), n);
            for (std::size_t i = 0; i < n; ++i) {
                CHECK(o1[i] == doctest::Approx(o2[i]).epsilon(1e-14));
            }
        }
    }
}

TEST_CASE("kernel selection") {
    CHECK(kernels::select("scalar"));
    CHECK(std::string(kernels::active().name) == "scalar");
    CHECK_FALSE(kernels::select("no-such-set"));
    // restore the default choice for the rest of the suite
    bool restored = false;
    for (const kernels::KernelSet* set : kernels::available_sets()) {
        if (std::string(set->name) == "avx2") restored = kernels::select("avx2");
    }
    if (!restored) kernels::select("scalar");
}

TEST_CASE("cumtrapz matches closed forms") {
    std::vector<double> v{0.0, 1.0, 2.0, 3.0, 4.0};  // f(x) = x on h = 1
    std::vector<double> out(v.size());
    kernels::cumtrapz(v, 1.0, out);
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double x = static_cast<double>(i);
        CHECK(out[i] == doctest::Approx(0.5 * x * x));  // exact for linear integrands
    }
}
