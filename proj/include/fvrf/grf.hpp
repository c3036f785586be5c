#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "fvrf/grid.hpp"

namespace fvrf {

enum class DomainKind { Periodic1D, Neumann2D };

// One Karhunen-Loeve mode. 1D periodic: wavenumber k1 with a sine/cosine
// flag. 2D Neumann: cosine product with multi-index (k1, k2).
struct KlMode {
    int k1 = 0;
    int k2 = 0;
    bool sine = false;
};

// Ordered eigenpairs of the Matern-like covariance tau^(2*alpha-d) *
// (-Laplacian + tau^2)^(-alpha). The zero mode is excluded so sampled fields
// integrate to zero; eigenvalues are nonincreasing along the list.
struct CovarianceSpectrum {
    DomainKind domain_kind = DomainKind::Periodic1D;
    double tau = 0.0;
    double alpha_reg = 0.0;
    std::vector<KlMode> modes;
    std::vector<double> lambda;

    int count() const { return static_cast<int>(modes.size()); }
};

// Vector of i.i.d. standard-normal KL coefficients; resolution-independent.
struct FeatureParam {
    std::vector<double> xi;
    int count() const { return static_cast<int>(xi.size()); }
};

// First j_max modes ordered by nondecreasing |k'|^2, ties lexicographic.
// In 1D each wavenumber j contributes the pair (sin, cos) with equal
// eigenvalue tau^(2a-1) * (4 pi^2 j^2 + tau^2)^(-a); in 2D the eigenvalues are
// tau^(2a-2) * (pi^2 |k'|^2 + tau^2)^(-a).
CovarianceSpectrum eigenpairs(DomainKind kind, double tau, double alpha_reg, int j_max);

FeatureParam draw_feature_param(uint64_t master_seed, uint64_t stream_id, int j_max);

// Default mode count for a grid: 1D retains all wavenumbers below the
// Nyquist bin (j <= n/2 - 1); 2D retains the quarter-disc |k'| <= r-2, the
// largest |k'|^2-ordered prefix safely inside the grid's cosine band.
int default_modes(DomainKind kind, const Grid& g);

// KL synthesis g = sum_l xi_l sqrt(lambda_l) phi_l at the grid nodes via FFT;
// agrees with direct summation to roundoff. Errors if some retained mode is
// not representable on the grid.
GridFunction sample_field(const CovarianceSpectrum& spectrum, const FeatureParam& param,
                          const Grid& g);

// Continuum Fourier coefficients (bins 0..n/2) of the 1D KL field on an
// n_unique-point periodic grid; irfft of this spectrum equals sample_field.
std::vector<std::complex<double>> kl_half_spectrum(const CovarianceSpectrum& spectrum,
                                                   const FeatureParam& param, int n_unique);

}  // namespace fvrf
