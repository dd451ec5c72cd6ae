#pragma once

#include <array>
#include <cstdint>
#include <cstddef>
#include <span>
#include <vector>

namespace hjmm {

// Philox4x64-10 block function: 4 lanes of 64-bit counter, 2-word key.
// Counter-based, so draw k of stream (seed, id) is a pure function of
// (seed, id, k) regardless of thread scheduling.
std::array<std::uint64_t, 4> philox4x64(std::array<std::uint64_t, 4> counter,
                                        std::array<std::uint64_t, 2> key);

// One reproducible stream of uniforms/normals keyed by (seed, stream id).
class PhiloxStream {
public:
    PhiloxStream(std::uint64_t seed, std::uint64_t stream_id);

    double uniform();  // strictly inside (0, 1)
    double normal();   // N(0, 1), Box-Muller

private:
    void refill();

    std::array<std::uint64_t, 2> key_;
    std::uint64_t block_ = 0;
    std::array<std::uint64_t, 4> buf_{};
    int left_ = 0;
    double pending_ = 0.0;
    bool has_pending_ = false;
};

// Truncated cylindrical Wiener process on H ~ R^{dim_h}: increments over
// [t, t + dt] are dim_h independent N(0, dt) draws. Identical (seed,
// stream_id) gives bit-identical sequences.
class NoiseModel {
public:
    NoiseModel(std::size_t dim_h, std::uint64_t seed, std::uint64_t stream_id = 0);

    std::size_t dim_h() const { return dim_; }
    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream_id() const { return stream_id_; }

    void sample_increment(double dt, std::span<double> out);  // dt > 0 rejected
    std::vector<double> sample_increment(double dt);

    // Fresh stream over the same seed (counter restarts); used for per-path
    // substreams in ensembles.
    NoiseModel with_stream(std::uint64_t stream_id) const;

private:
    std::size_t dim_;
    std::uint64_t seed_;
    std::uint64_t stream_id_;
    PhiloxStream stream_;
};

// Pre-sampled increments for a whole run: increments[k*dim_h + j] is the j-th
// coordinate of the step-k increment.
struct NoisePath {
    std::size_t dim_h = 0;
    std::size_t n_steps = 0;
    std::vector<double> increments;

    std::span<const double> step(std::size_t k) const {
        return {increments.data() + k * dim_h, dim_h};
    }

    static NoisePath sample(NoiseModel& model, std::size_t n_steps, double dt);

    // Aggregate groups of `factor` consecutive fine increments into one coarse
    // increment; keeps convergence studies on the same underlying stream.
    NoisePath coarsen(std::size_t factor) const;
};

}  // namespace hjmm
