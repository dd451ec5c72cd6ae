#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace hjmm::kernels {

// Data-parallel primitives the grid operations run on. Every kernel has a
// scalar reference implementation; an AVX2/FMA variant is selected at runtime
// when the CPU supports it. Override with HJMM_KERNELS=scalar|avx2 or
// select() (tests exercise every available set against the scalar reference).
struct KernelSet {
    const char* name;
    double (*dot)(const double* a, const double* b, std::size_t n);
    // y += a * x
    void (*axpy)(double* y, double a, const double* x, std::size_t n);
    // out += a .* b
    void (*mul_acc)(double* out, const double* a, const double* b, std::size_t n);
    // sum_i w[i] * v[i]^2
    double (*wsum_sq)(const double* w, const double* v, std::size_t n);
    // sum_i w[i] * |v[i]|^p   (general p delegates to scalar pow)
    double (*wsum_abs_pow)(const double* w, const double* v, std::size_t n, double p);
    double (*max_abs)(const double* v, std::size_t n);
    // max_i w[i] * |v[i]|^p
    double (*wmax_abs_pow)(const double* w, const double* v, std::size_t n, double p);
};

const KernelSet& scalar_set();
std::vector<const KernelSet*> available_sets();

// Active set; fixed for the process once first queried.
const KernelSet& active();
// Force a set by name (before or after first use). Returns false if unknown.
bool select(std::string_view name);

// Convenience wrappers over the active set.
inline double dot(std::span<const double> a, std::span<const double> b) {
    return active().dot(a.data(), b.data(), a.size());
}
inline void axpy(std::span<double> y, double a, std::span<const double> x) {
    active().axpy(y.data(), a, x.data(), y.size());
}
inline void mul_acc(std::span<double> out, std::span<const double> a, std::span<const double> b) {
    active().mul_acc(out.data(), a.data(), b.data(), out.size());
}
inline double wsum_sq(std::span<const double> w, std::span<const double> v) {
    return active().wsum_sq(w.data(), v.data(), w.size());
}
inline double wsum_abs_pow(std::span<const double> w, std::span<const double> v, double p) {
    return active().wsum_abs_pow(w.data(), v.data(), w.size(), p);
}
inline double max_abs(std::span<const double> v) {
    return active().max_abs(v.data(), v.size());
}
inline double wmax_abs_pow(std::span<const double> w, std::span<const double> v, double p) {
    return active().wmax_abs_pow(w.data(), v.data(), w.size(), p);
}

// Cumulative trapezoid on a uniform grid: out[0] = 0,
// out[i] = out[i-1] + h * (v[i-1] + v[i]) / 2. Sequential by nature, not dispatched.
void cumtrapz(std::span<const double> v, double h, std::span<double> out);

}  // namespace hjmm::kernels
