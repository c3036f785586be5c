#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace fvrf {

// Deterministic random streams. The state is derived by hashing
// (master_seed, stream_id) through an avalanche mixer, so distinct stream ids
// give statistically independent sequences and the draw for stream i never
// depends on how many other streams were consumed. Identical inputs reproduce
// bitwise-identical sequences within one build.
class RandomStream {
public:
    RandomStream(uint64_t master_seed, uint64_t stream_id) {
        state_ = mix(mix(master_seed + 0x9e3779b97f4a7c15ULL) ^
                     mix(stream_id + 0x632be59bd9b4e019ULL));
    }

    uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ULL;
        return mix(state_);
    }

    // Uniform in the open interval (0,1); never returns 0 or 1.
    double next_uniform() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    // Standard normal via Box-Muller.
    double next_normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = next_uniform();
        double u2 = next_uniform();
        double radius = std::sqrt(-2.0 * std::log(u1));
        double angle = 2.0 * M_PI * u2;
        spare_ = radius * std::sin(angle);
        have_spare_ = true;
        return radius * std::cos(angle);
    }

    static uint64_t mix(uint64_t x) {
        x ^= x >> 30;
        x *= 0xbf58476d1ce4e5b9ULL;
        x ^= x >> 27;
        x *= 0x94d049bb133111ebULL;
        x ^= x >> 31;
        return x;
    }

private:
    uint64_t state_ = 0;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

inline std::vector<double> draw_normals(uint64_t master_seed, uint64_t stream_id, int count) {
    RandomStream rs(master_seed, stream_id);
    std::vector<double> out(static_cast<size_t>(count));
    for (auto& v : out) v = rs.next_normal();
    return out;
}

}  // namespace fvrf
