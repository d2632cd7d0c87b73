#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace bstac {

// Deterministic random stream identified by (seed, stream id).
//
// Distributions are implemented here rather than taken from <random>: the
// standard leaves uniform_int_distribution / normal_distribution
// implementation-defined, and model files must be identical across
// toolchains for a fixed seed.
class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t stream)
        : seed_(seed), stream_(stream), engine_(mix(seed, stream)) {}

    // Stream id for a tuple of indices, e.g. (purpose, boost epoch, gp epoch, individual).
    static std::uint64_t stream_id(std::initializer_list<std::uint64_t> parts) {
        std::uint64_t h = 0x9e3779b97f4a7c15ULL;
        for (auto p : parts) h = splitmix(h ^ splitmix(p + 0x632be59bd9b4e019ULL));
        return h;
    }

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream() const { return stream_; }

    std::uint64_t next_u64() { return engine_(); }

    // Uniform in [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // Uniform integer in [0, n), unbiased (rejection on the low-product range).
    std::uint64_t below(std::uint64_t n) {
        if (n <= 1) return 0;
        const std::uint64_t threshold = (0 - n) % n;
        for (;;) {
            const unsigned __int128 m = static_cast<unsigned __int128>(next_u64()) * n;
            if (static_cast<std::uint64_t>(m) >= threshold) return static_cast<std::uint64_t>(m >> 64);
        }
    }

    bool bernoulli(double p) { return uniform01() < p; }

    // Box-Muller; one draw per call, the sibling value is discarded so the
    // stream position depends only on the number of calls.
    double gaussian(double mean, double sigma);

private:
    static std::uint64_t splitmix(std::uint64_t x) {
        x += 0x9e3779b97f4a7c15ULL;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return x ^ (x >> 31);
    }
    static std::uint64_t mix(std::uint64_t seed, std::uint64_t stream) {
        return splitmix(splitmix(seed) ^ (stream * 0xd1342543de82ef95ULL + 1));
    }

    std::uint64_t seed_;
    std::uint64_t stream_;
    std::mt19937_64 engine_;
};

}  // namespace bstac
