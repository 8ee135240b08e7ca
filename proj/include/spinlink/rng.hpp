#pragma once

#include <cmath>
#include <cstdint>

namespace spinlink {

// splitmix64 with hash-derived streams. Every Monte-Carlo trial gets its own
// stream keyed by (seed, stream index), so results are independent of thread
// count and scheduling. The algorithm id is recorded in result metadata;
// distributional quality is gated by the chi-square tests in the suite.
inline constexpr const char* kRngAlgorithm = "splitmix64-streams-v1";

class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform on (0, 1]; never 0, so log() is safe.
    double u01() {
        return (static_cast<double>(next() >> 11) + 1.0) * 0x1.0p-53;
    }

private:
    std::uint64_t state_;
};

inline SplitMix64 rng_stream(std::uint64_t seed, std::uint64_t stream) {
    SplitMix64 mixer(seed ^ (0xd2b74407b1ce6e93ULL * (stream + 1)));
    return SplitMix64(mixer.next());
}

// Number of Bernoulli(p) attempts up to and including the first success;
// support {1, 2, ...}, mean 1/p.
inline std::uint64_t geometric_attempts(SplitMix64& rng, double p) {
    if (p >= 1.0) return 1;
    double u = rng.u01();
    return 1 + static_cast<std::uint64_t>(std::floor(std::log(u) / std::log1p(-p)));
}

} // namespace spinlink
