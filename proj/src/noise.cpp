#include "hjmm/noise.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace hjmm {

namespace {

constexpr std::uint64_t kMul0 = 0xD2E7470EE14C6C93ull;
constexpr std::uint64_t kMul1 = 0xCA5A826395121157ull;
constexpr std::uint64_t kWeyl0 = 0x9E3779B97F4A7C15ull;
constexpr std::uint64_t kWeyl1 = 0xBB67AE8584CAA73Bull;

inline void mulhilo(std::uint64_t a, std::uint64_t b, std::uint64_t& hi, std::uint64_t& lo) {
    const unsigned __int128 prod = static_cast<unsigned __int128>(a) * b;
    hi = static_cast<std::uint64_t>(prod >> 64);
    lo = static_cast<std::uint64_t>(prod);
}

inline double to_unit(std::uint64_t x) {
    // 53 significant bits, offset keeps the value strictly inside (0, 1).
    return static_cast<double>(x >> 11) * 0x1.0p-53 + 0x1.0p-54;
}

}  // namespace

std::array<std::uint64_t, 4> philox4x64(std::array<std::uint64_t, 4> ctr,
                                        std::array<std::uint64_t, 2> key) {
    for (int round = 0; round < 10; ++round) {
        std::uint64_t hi0, lo0, hi1, lo1;
        mulhilo(kMul0, ctr[0], hi0, lo0);
        mulhilo(kMul1, ctr[2], hi1, lo1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        key[0] += kWeyl0;
        key[1] += kWeyl1;
    }
    return ctr;
}

PhiloxStream::PhiloxStream(std::uint64_t seed, std::uint64_t stream_id)
    : key_{seed, stream_id} {}

void PhiloxStream::refill() {
    buf_ = philox4x64({block_++, 0, 0, 0}, key_);
    left_ = 4;
}

double PhiloxStream::uniform() {
    if (left_ == 0) refill();
    return to_unit(buf_[4 - left_--]);
}

double PhiloxStream::normal() {
    if (has_pending_) {
        has_pending_ = false;
        return pending_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    pending_ = r * std::sin(a);
    has_pending_ = true;
    return r * std::cos(a);
}

NoiseModel::NoiseModel(std::size_t dim_h, std::uint64_t seed, std::uint64_t stream_id)
    : dim_(dim_h), seed_(seed), stream_id_(stream_id), stream_(seed, stream_id) {
    if (dim_h < 1) throw std::invalid_argument("NoiseModel: dim_h must be >= 1");
}

void NoiseModel::sample_increment(double dt, std::span<double> out) {
    if (!(dt > 0.0)) throw std::invalid_argument("sample_increment: dt must be > 0");
    const double scale = std::sqrt(dt);
    for (std::size_t j = 0; j < dim_; ++j) out[j] = scale * stream_.normal();
}

std::vector<double> NoiseModel::sample_increment(double dt) {
    std::vector<double> out(dim_);
    sample_increment(dt, out);
    return out;
}

NoiseModel NoiseModel::with_stream(std::uint64_t stream_id) const {
    return NoiseModel(dim_, seed_, stream_id);
}

NoisePath NoisePath::sample(NoiseModel& model, std::size_t n_steps, double dt) {
    NoisePath path;
    path.dim_h = model.dim_h();
    path.n_steps = n_steps;
    path.increments.resize(n_steps * path.dim_h);
    for (std::size_t k = 0; k < n_steps; ++k) {
        model.sample_increment(dt, {path.increments.data() + k * path.dim_h, path.dim_h});
    }
    return path;
}

NoisePath NoisePath::coarsen(std::size_t factor) const {
    if (factor == 0 || n_steps % factor != 0) {
        throw std::invalid_argument("NoisePath::coarsen: factor must divide n_steps");
    }
    NoisePath coarse;
    coarse.dim_h = dim_h;
    coarse.n_steps = n_steps / factor;
    coarse.increments.assign(coarse.n_steps * dim_h, 0.0);
    for (std::size_t k = 0; k < n_steps; ++k) {
        const std::size_t kc = k / factor;
        for (std::size_t j = 0; j < dim_h; ++j) {
            coarse.increments[kc * dim_h + j] += increments[k * dim_h + j];
        }
    }
    return coarse;
}

}  // namespace hjmm
