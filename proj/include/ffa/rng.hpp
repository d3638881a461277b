#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace ffa {

/// splitmix64 finalizer; used to derive well-separated substream seeds.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t substream_seed(std::uint64_t master, std::uint64_t index) {
    return mix64(mix64(master) ^ mix64(index + 0x517cc1b727220a95ULL));
}

inline std::uint64_t substream_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b) {
    return substream_seed(substream_seed(master, a), b);
}

/// Deterministic standard-normal stream. Uses an explicit Marsaglia polar
/// transform over 53-bit uniforms so output does not depend on the standard
/// library's distribution implementation. Substreams derived from
/// (seed, index) are independent; path i of a simulation always consumes
/// substream i regardless of how paths are sharded across workers.
class NormalStream {
public:
    explicit NormalStream(std::uint64_t seed) : engine_(seed) {}

    double uniform() {  // (0, 1)
        // 53-bit mantissa; offset by half an ulp to exclude 0.
        return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1p-53;
    }

    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform() - 1.0;
            v = 2.0 * uniform() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double f = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * f;
        has_spare_ = true;
        return u * f;
    }

private:
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace ffa
