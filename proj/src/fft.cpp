#include "fvrf/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>

#include "fvrf/common.hpp"

namespace fvrf::fft {

namespace {

// FFTW planning is not thread-safe; executing a cached plan on new arrays is.
// Plans are created with FFTW_UNALIGNED so they may run on any buffer.
std::mutex plan_mutex;

enum class Kind { R2C, C2R, DST2D, DCT2D };

fftw_plan get_plan(Kind kind, int n) {
    static std::map<std::pair<int, int>, fftw_plan> cache;
    std::lock_guard<std::mutex> lock(plan_mutex);
    auto key = std::make_pair(static_cast<int>(kind), n);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;

    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    fftw_plan p = nullptr;
    switch (kind) {
        case Kind::R2C: {
            std::vector<double> in(static_cast<size_t>(n));
            std::vector<fftw_complex> out(static_cast<size_t>(n / 2 + 1));
            p = fftw_plan_dft_r2c_1d(n, in.data(), out.data(), flags);
            break;
        }
        case Kind::C2R: {
            std::vector<fftw_complex> in(static_cast<size_t>(n / 2 + 1));
            std::vector<double> out(static_cast<size_t>(n));
            p = fftw_plan_dft_c2r_1d(n, in.data(), out.data(), flags);
            break;
        }
        case Kind::DST2D: {
            std::vector<double> in(static_cast<size_t>(n) * n), out(static_cast<size_t>(n) * n);
            p = fftw_plan_r2r_2d(n, n, in.data(), out.data(), FFTW_RODFT00, FFTW_RODFT00, flags);
            break;
        }
        case Kind::DCT2D: {
            std::vector<double> in(static_cast<size_t>(n) * n), out(static_cast<size_t>(n) * n);
            p = fftw_plan_r2r_2d(n, n, in.data(), out.data(), FFTW_REDFT00, FFTW_REDFT00, flags);
            break;
        }
    }
    if (!p) throw NumericalError("fftw plan creation failed");
    cache.emplace(key, p);
    return p;
}

}  // namespace

std::vector<std::complex<double>> rfft(const std::vector<double>& x) {
    int n = static_cast<int>(x.size());
    require(n >= 2 && n % 2 == 0, "rfft: length must be even and >= 2");
    fftw_plan p = get_plan(Kind::R2C, n);
    std::vector<double> in = x;  // r2c may destroy its input
    std::vector<std::complex<double>> out(static_cast<size_t>(n / 2 + 1));
    fftw_execute_dft_r2c(p, in.data(), reinterpret_cast<fftw_complex*>(out.data()));
    return out;
}

std::vector<double> irfft(const std::vector<std::complex<double>>& spec, int n) {
    require(static_cast<int>(spec.size()) == n / 2 + 1, "irfft: spectrum length mismatch");
    fftw_plan p = get_plan(Kind::C2R, n);
    std::vector<std::complex<double>> in = spec;  // c2r destroys its input
    std::vector<double> out(static_cast<size_t>(n));
    fftw_execute_dft_c2r(p, reinterpret_cast<fftw_complex*>(in.data()), out.data());
    return out;
}

std::vector<double> dst2d(const std::vector<double>& v, int n) {
    require(static_cast<int>(v.size()) == n * n, "dst2d: size mismatch");
    fftw_plan p = get_plan(Kind::DST2D, n);
    std::vector<double> in = v;
    std::vector<double> out(v.size());
    fftw_execute_r2r(p, in.data(), out.data());
    return out;
}

std::vector<double> dct2d(const std::vector<double>& v, int r) {
    require(static_cast<int>(v.size()) == r * r, "dct2d: size mismatch");
    fftw_plan p = get_plan(Kind::DCT2D, r);
    std::vector<double> in = v;
    std::vector<double> out(v.size());
    fftw_execute_r2r(p, in.data(), out.data());
    return out;
}

}  // namespace fvrf::fft
