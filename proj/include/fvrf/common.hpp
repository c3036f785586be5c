#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>

namespace fvrf {

// Invalid configuration or arguments. The CLI maps this to exit code 2.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Numerical breakdown: NaN blow-up, non-convergent solver, singular system.
// The CLI maps this to exit code 3.
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline void require(bool cond, const std::string& msg) {
    if (!cond) throw ConfigError(msg);
}

// Worker count: explicit argument wins, then FVRF_THREADS, then hardware.
int default_threads();

// Runs body(i) for i in [0, n). Work is split into contiguous chunks, one per
// worker; callers are responsible for writing to disjoint output slots so the
// result is independent of scheduling.
void parallel_for(int n, int threads, const std::function<void(int)>& body);

// FNV-1a, used for manifest integrity digests.
uint64_t fnv1a64(const void* data, size_t len);
uint64_t fnv1a64_file(const std::string& path);
std::string hex64(uint64_t v);

}  // namespace fvrf
