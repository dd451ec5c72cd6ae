// AVX2/FMA variants of the dispatch kernels. Compiled with -mavx2 -mfma;
// only ever called after a runtime cpu-feature check in kernels_dispatch.cpp.

#include "hjmm/kernels.hpp"

#if defined(__AVX2__) && defined(__FMA__)

#include <immintrin.h>

#include <cmath>

namespace hjmm::kernels {

namespace {

inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(lo, _mm_unpackhi_pd(lo, lo)));
}

inline double hmax(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_max_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_max_sd(lo, _mm_unpackhi_pd(lo, lo)));
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
    }
    for (; i + 4 <= n; i += 4) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    }
    double acc = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

void axpy_avx2(double* y, double a, const double* x, std::size_t n) {
    const __m256d av = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d yv = _mm256_loadu_pd(y + i);
        yv = _mm256_fmadd_pd(av, _mm256_loadu_pd(x + i), yv);
        _mm256_storeu_pd(y + i, yv);
    }
    for (; i < n; ++i) y[i] += a * x[i];
}

void mul_acc_avx2(double* out, const double* a, const double* b, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d ov = _mm256_loadu_pd(out + i);
        ov = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), ov);
        _mm256_storeu_pd(out + i, ov);
    }
    for (; i < n; ++i) out[i] += a[i] * b[i];
}

double wsum_sq_avx2(const double* w, const double* v, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        __m256d v0 = _mm256_loadu_pd(v + i);
        __m256d v1 = _mm256_loadu_pd(v + i + 4);
        acc0 = _mm256_fmadd_pd(_mm256_mul_pd(_mm256_loadu_pd(w + i), v0), v0, acc0);
        acc1 = _mm256_fmadd_pd(_mm256_mul_pd(_mm256_loadu_pd(w + i + 4), v1), v1, acc1);
    }
    for (; i + 4 <= n; i += 4) {
        __m256d v0 = _mm256_loadu_pd(v + i);
        acc0 = _mm256_fmadd_pd(_mm256_mul_pd(_mm256_loadu_pd(w + i), v0), v0, acc0);
    }
    double acc = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) acc += w[i] * v[i] * v[i];
    return acc;
}

double wsum_abs_pow_avx2(const double* w, const double* v, std::size_t n, double p) {
    if (p == 2.0) return wsum_sq_avx2(w, v, n);
    // No vector pow; general exponent stays on the scalar path.
    return scalar_set().wsum_abs_pow(w, v, n, p);
}

double max_abs_avx2(const double* v, std::size_t n) {
    const __m256d sign_mask = _mm256_set1_pd(-0.0);
    __m256d m = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        m = _mm256_max_pd(m, _mm256_andnot_pd(sign_mask, _mm256_loadu_pd(v + i)));
    }
    double mx = hmax(m);
    for (; i < n; ++i) mx = std::max(mx, std::fabs(v[i]));
    return mx;
}

double wmax_abs_pow_avx2(const double* w, const double* v, std::size_t n, double p) {
    if (p != 2.0) return scalar_set().wmax_abs_pow(w, v, n, p);
    __m256d m = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d vv = _mm256_loadu_pd(v + i);
        m = _mm256_max_pd(m, _mm256_mul_pd(_mm256_loadu_pd(w + i), _mm256_mul_pd(vv, vv)));
    }
    double mx = hmax(m);
    for (; i < n; ++i) mx = std::max(mx, w[i] * v[i] * v[i]);
    return mx;
}

}  // namespace

const KernelSet* avx2_set_impl() {
    static const KernelSet set{
        "avx2",        dot_avx2,     axpy_avx2,     mul_acc_avx2,
        wsum_sq_avx2,  wsum_abs_pow_avx2, max_abs_avx2, wmax_abs_pow_avx2,
    };
    return &set;
}

}  // namespace hjmm::kernels

#else

namespace hjmm::kernels {
const KernelSet* avx2_set_impl() { return nullptr; }
}  // namespace hjmm::kernels

#endif
