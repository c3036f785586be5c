#include "fvrf/grf.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>
#include <tuple>

#include "fvrf/fft.hpp"
#include "fvrf/rng.hpp"

namespace fvrf {

static CovarianceSpectrum eigenpairs_1d(double tau, double alpha_reg, int j_max) {
    CovarianceSpectrum s;
    s.domain_kind = DomainKind::Periodic1D;
    s.tau = tau;
    s.alpha_reg = alpha_reg;
    int pairs = (j_max + 1) / 2;
    for (int j = 1; j <= pairs; ++j) {
        double lam = std::pow(tau, 2.0 * alpha_reg - 1.0) *
                     std::pow(4.0 * M_PI * M_PI * j * j + tau * tau, -alpha_reg);
        s.modes.push_back(KlMode{j, 0, true});   // sin(2 pi j x)
        s.lambda.push_back(lam);
        s.modes.push_back(KlMode{j, 0, false});  // cos(2 pi j x)
        s.lambda.push_back(lam);
    }
    s.modes.resize(static_cast<size_t>(j_max));
    s.lambda.resize(static_cast<size_t>(j_max));
    return s;
}

static CovarianceSpectrum eigenpairs_2d(double tau, double alpha_reg, int j_max) {
    CovarianceSpectrum s;
    s.domain_kind = DomainKind::Neumann2D;
    s.tau = tau;
    s.alpha_reg = alpha_reg;
    // Enumerate a box large enough that the j_max smallest |k'|^2 are inside.
    int box = static_cast<int>(std::ceil(2.0 * std::sqrt(j_max / M_PI))) + 2;
    std::vector<std::tuple<long long, int, int>> order;
    order.reserve(static_cast<size_t>(box + 1) * (box + 1));
    for (int k1 = 0; k1 <= box; ++k1)
        for (int k2 = 0; k2 <= box; ++k2) {
            if (k1 == 0 && k2 == 0) continue;
            order.emplace_back(static_cast<long long>(k1) * k1 + static_cast<long long>(k2) * k2,
                               k1, k2);
        }
    std::sort(order.begin(), order.end());
    require(static_cast<int>(order.size()) >= j_max, "eigenpairs: mode box too small");
    for (int l = 0; l < j_max; ++l) {
        auto [nrm2, k1, k2] = order[static_cast<size_t>(l)];
        double lam = std::pow(tau, 2.0 * alpha_reg - 2.0) *
                     std::pow(M_PI * M_PI * static_cast<double>(nrm2) + tau * tau, -alpha_reg);
        s.modes.push_back(KlMode{k1, k2, false});
        s.lambda.push_back(lam);
    }
    return s;
}

CovarianceSpectrum eigenpairs(DomainKind kind, double tau, double alpha_reg, int j_max) {
    int d = kind == DomainKind::Periodic1D ? 1 : 2;
    require(tau >= 0.0, "eigenpairs: tau must be >= 0");
    require(alpha_reg > 0.5 * d,
            "eigenpairs: alpha_reg must exceed d/2 = " + std::to_string(0.5 * d));
    require(j_max >= 1, "eigenpairs: j_max must be >= 1");
    return kind == DomainKind::Periodic1D ? eigenpairs_1d(tau, alpha_reg, j_max)
                                          : eigenpairs_2d(tau, alpha_reg, j_max);
}

FeatureParam draw_feature_param(uint64_t master_seed, uint64_t stream_id, int j_max) {
    return FeatureParam{draw_normals(master_seed, stream_id, j_max)};
}

int default_modes(DomainKind kind, const Grid& g) {
    if (kind == DomainKind::Periodic1D) {
        const auto* g1 = std::get_if<Grid1D>(&g);
        require(g1 != nullptr, "periodic 1D spectrum needs a 1D grid");
        return 2 * (g1->n_unique / 2 - 1);
    }
    const auto* g2 = std::get_if<Grid2D>(&g);
    require(g2 != nullptr, "Neumann 2D spectrum needs a 2D grid");
    int kmax = g2->r - 2;
    int count = 0;
    for (int k1 = 0; k1 <= kmax; ++k1)
        for (int k2 = 0; k2 <= kmax; ++k2)
            if ((k1 || k2) && k1 * k1 + k2 * k2 <= kmax * kmax) ++count;
    return count;
}

std::vector<std::complex<double>> kl_half_spectrum(const CovarianceSpectrum& s,
                                                   const FeatureParam& p, int n_unique) {
    require(s.domain_kind == DomainKind::Periodic1D, "kl_half_spectrum: periodic 1D only");
    require(p.count() <= s.count(), "kl_half_spectrum: more coefficients than modes");
    int n = n_unique;
    int active = p.count();
    for (int l = 0; l < active; ++l)
        if (s.modes[static_cast<size_t>(l)].k1 > n / 2 - 1)
            throw ConfigError("sample_field: grid too coarse for retained 1D modes");

    // The pair (xi_sin, xi_cos) at wavenumber j contributes
    // sqrt(lambda/2) * (xi_cos - i xi_sin) to the e^{+2 pi i j x} bin.
    std::vector<std::complex<double>> spec(static_cast<size_t>(n / 2 + 1), {0.0, 0.0});
    for (int l = 0; l < active; ++l) {
        const KlMode& mode = s.modes[static_cast<size_t>(l)];
        double amp = std::sqrt(0.5 * s.lambda[static_cast<size_t>(l)]) * p.xi[static_cast<size_t>(l)];
        if (mode.sine)
            spec[static_cast<size_t>(mode.k1)] += std::complex<double>(0.0, -amp);
        else
            spec[static_cast<size_t>(mode.k1)] += std::complex<double>(amp, 0.0);
    }
    return spec;
}

static GridFunction sample_field_1d(const CovarianceSpectrum& s, const FeatureParam& p,
                                    const Grid1D& grid) {
    return GridFunction{Grid{grid}, fft::irfft(kl_half_spectrum(s, p, grid.n_unique), grid.n_unique)};
}

static GridFunction sample_field_2d(const CovarianceSpectrum& s, const FeatureParam& p,
                                    const Grid2D& grid) {
    int r = grid.r;
    int active = p.count();
    for (int l = 0; l < active; ++l) {
        const KlMode& mode = s.modes[static_cast<size_t>(l)];
        if (mode.k1 > r - 1 || mode.k2 > r - 1)
            throw ConfigError("sample_field: grid too coarse for retained 2D modes");
    }

    // DCT-I synthesis: out_i = c_0 + (-1)^i c_{r-1} + 2 sum' c_k cos(pi k i/(r-1)),
    // so interior coefficients carry a 1/2 per dimension.
    std::vector<double> coeff(static_cast<size_t>(r) * r, 0.0);
    for (int l = 0; l < active; ++l) {
        const KlMode& mode = s.modes[static_cast<size_t>(l)];
        int zero_count = (mode.k1 == 0 ? 1 : 0) + (mode.k2 == 0 ? 1 : 0);
        double norm = zero_count == 1 ? std::sqrt(2.0) : 2.0;
        double scale1 = (mode.k1 == 0 || mode.k1 == r - 1) ? 1.0 : 0.5;
        double scale2 = (mode.k2 == 0 || mode.k2 == r - 1) ? 1.0 : 0.5;
        coeff[static_cast<size_t>(mode.k1) * r + mode.k2] +=
            p.xi[static_cast<size_t>(l)] * std::sqrt(s.lambda[static_cast<size_t>(l)]) * norm *
            scale1 * scale2;
    }
    return GridFunction{Grid{grid}, fft::dct2d(coeff, r)};
}

GridFunction sample_field(const CovarianceSpectrum& spectrum, const FeatureParam& param,
                          const Grid& g) {
    require(param.count() <= spectrum.count(),
            "sample_field: parameter has more coefficients than spectrum modes");
    if (spectrum.domain_kind == DomainKind::Periodic1D) {
        const auto* g1 = std::get_if<Grid1D>(&g);
        require(g1 != nullptr, "sample_field: periodic 1D spectrum needs a 1D grid");
        return sample_field_1d(spectrum, param, *g1);
    }
    const auto* g2 = std::get_if<Grid2D>(&g);
    require(g2 != nullptr, "sample_field: Neumann 2D spectrum needs a 2D grid");
    return sample_field_2d(spectrum, param, *g2);
}

}  // namespace fvrf
