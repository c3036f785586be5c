#pragma once

#include <complex>
#include <span>
#include <vector>

#include "fvrf/darcy.hpp"
#include "fvrf/grf.hpp"
#include "fvrf/grid.hpp"

namespace fvrf {

// chi(k) = max(0, min(2r, (r + 1/2)^-beta)) with r = 2 pi |k| delta.
double wavenumber_filter(int k, double delta, double beta);

double elu(double x);

// (s_plus - s_minus) / (1 + exp(-x/delta)) + s_minus
double thresholded_sigmoid(double x, double s_plus, double s_minus, double delta);

// Brownian bridge feature: sum_{j=1}^J theta_j (j pi)^-1 sqrt(2) sin(j pi x).
double bb_feature(double x, std::span<const double> theta, int modes);

struct FourierFamily {
    double tau_prime = 5.0;
    double alpha_prime = 2.0;
    double delta = 0.0025;
    double beta = 4.0;
    int theta_modes = 0;  // 0 -> all modes below the grid Nyquist at training
};

struct PcFamily {
    double tau_prime = 7.5;
    double alpha_prime = 2.0;
    double s_plus = 1.0 / 12.0;
    double s_minus = -1.0 / 3.0;
    double sigma_delta = 0.15;
    int theta_modes = 0;  // 0 -> grid default, the quarter-disc |k'| <= r-2
    double forcing = 1.0;
    SmoothingParams smoothing;
};

struct BbFamily {
    int modes = 512;
};

// Evaluates m filtered-convolution features sigma(F^-1(chi Fa Ftheta)) on a
// fixed periodic grid. Theta spectra are synthesized once from the stored KL
// coefficients, so the same xi rows give the same feature at every
// resolution that can hold the retained modes.
class FourierFeatureSet {
public:
    FourierFeatureSet(const FourierFamily& family, const std::vector<std::vector<double>>& xi,
                      const Grid1D& grid);

    int count() const { return static_cast<int>(theta_hat_.size()); }
    const Grid1D& grid() const { return grid_; }

    struct InputContext {
        std::vector<std::complex<double>> a_hat;  // forward transform / n
    };
    InputContext prepare(const GridFunction& a) const;
    void eval(const InputContext& ctx, int j, std::vector<double>& out) const;
    GridFunction eval_one(const GridFunction& a, int j) const;

private:
    FourierFamily family_;
    Grid1D grid_;
    std::vector<double> chi_;  // filter at bins 0..n/2
    std::vector<std::vector<std::complex<double>>> theta_hat_;
};

// Predictor-corrector features for the Darcy problem: two chained Poisson
// solves with sigmoid-squashed random forcings and a log-gradient correction.
class PcFeatureSet {
public:
    // xi rows hold the two stacked draws: [xi_1 | xi_2], each of length J.
    PcFeatureSet(const PcFamily& family, const std::vector<std::vector<double>>& xi,
                 const Grid2D& grid);

    int count() const { return static_cast<int>(s1_.size()); }
    const Grid2D& grid() const { return grid_; }

    struct InputContext {
        std::vector<double> f_over_a;
        std::vector<double> grad_log_x, grad_log_y;  // of the smoothed coefficient
    };
    InputContext prepare(const GridFunction& a) const;
    void eval(const InputContext& ctx, int j, std::vector<double>& out) const;
    GridFunction eval_one(const GridFunction& a, int j) const;

private:
    PcFamily family_;
    Grid2D grid_;
    std::vector<std::vector<double>> s1_, s2_;  // sigma_gamma(theta fields)
};

// Single-feature conveniences built on the sets above.
GridFunction fourier_feature(const GridFunction& a, const FeatureParam& theta,
                             const FourierFamily& family);
GridFunction pc_feature(const GridFunction& a, const FeatureParam& theta1,
                        const FeatureParam& theta2, const PcFamily& family);

// d/dx and d/dy with centered second-order interior stencils and first-order
// one-sided differences on the boundary.
void gradient_2d(const std::vector<double>& f, int r, double h, std::vector<double>& gx,
                 std::vector<double>& gy);

}  // namespace fvrf
