#include "hjmm/kernels.hpp"

#include <cmath>

namespace hjmm::kernels {

namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

void axpy_scalar(double* y, double a, const double* x, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void mul_acc_scalar(double* out, const double* a, const double* b, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] += a[i] * b[i];
}

double wsum_sq_scalar(const double* w, const double* v, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += w[i] * v[i] * v[i];
    return acc;
}

double wsum_abs_pow_scalar(const double* w, const double* v, std::size_t n, double p) {
    if (p == 2.0) return wsum_sq_scalar(w, v, n);
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += w[i] * std::pow(std::fabs(v[i]), p);
    return acc;
}

double max_abs_scalar(const double* v, std::size_t n) {
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i) m = std::max(m, std::fabs(v[i]));
    return m;
}

double wmax_abs_pow_scalar(const double* w, const double* v, std::size_t n, double p) {
    double m = 0.0;
    if (p == 2.0) {
        for (std::size_t i = 0; i < n; ++i) m = std::max(m, w[i] * v[i] * v[i]);
    } else {
        for (std::size_t i = 0; i < n; ++i) m = std::max(m, w[i] * std::pow(std::fabs(v[i]), p));
    }
    return m;
}

}  // namespace

const KernelSet& scalar_set() {
    static const KernelSet set{
        "scalar",        dot_scalar,     axpy_scalar,        mul_acc_scalar,
        wsum_sq_scalar,  wsum_abs_pow_scalar, max_abs_scalar, wmax_abs_pow_scalar,
    };
    return set;
}

void cumtrapz(std::span<const double> v, double h, std::span<double> out) {
    out[0] = 0.0;
    for (std::size_t i = 1; i < v.size(); ++i) {
        out[i] = out[i - 1] + 0.5 * h * (v[i - 1] + v[i]);
    }
}

}  // namespace hjmm::kernels
