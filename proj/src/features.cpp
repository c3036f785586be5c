#include "fvrf/features.hpp"

#include <algorithm>
#include <cmath>

#include "fvrf/fft.hpp"

namespace fvrf {

double wavenumber_filter(int k, double delta, double beta) {
    require(delta > 0.0 && beta > 0.0, "wavenumber_filter: delta and beta must be positive");
    double r = 2.0 * M_PI * std::abs(k) * delta;
    return std::max(0.0, std::min(2.0 * r, std::pow(r + 0.5, -beta)));
}

double elu(double x) { return x >= 0.0 ? x : std::expm1(x); }

double thresholded_sigmoid(double x, double s_plus, double s_minus, double delta) {
    require(delta > 0.0, "thresholded_sigmoid: delta must be positive");
    return (s_plus - s_minus) / (1.0 + std::exp(-x / delta)) + s_minus;
}

double bb_feature(double x, std::span<const double> theta, int modes) {
    require(modes <= static_cast<int>(theta.size()), "bb_feature: too few coefficients");
    double s = 0.0;
    for (int j = 1; j <= modes; ++j)
        s += theta[static_cast<size_t>(j - 1)] * (M_SQRT2 / (j * M_PI)) * std::sin(j * M_PI * x);
    return s;
}

// ---------------------------------------------------------------------------
// Fourier features

FourierFeatureSet::FourierFeatureSet(const FourierFamily& family,
                                     const std::vector<std::vector<double>>& xi,
                                     const Grid1D& grid)
    : family_(family), grid_(grid) {
    require(family.delta > 0.0 && family.beta > 0.0, "fourier family: delta, beta must be positive");
    int n = grid.n_unique;
    int bins = n / 2 + 1;
    chi_.resize(static_cast<size_t>(bins));
    for (int k = 0; k < bins; ++k) chi_[static_cast<size_t>(k)] = wavenumber_filter(k, family.delta, family.beta);

    int modes = family.theta_modes > 0 ? family.theta_modes : default_modes(DomainKind::Periodic1D, Grid{grid});
    CovarianceSpectrum spectrum =
        eigenpairs(DomainKind::Periodic1D, family.tau_prime, family.alpha_prime, modes);
    theta_hat_.reserve(xi.size());
    for (const auto& row : xi) {
        require(static_cast<int>(row.size()) == modes,
                "fourier feature set: xi row length does not match theta_modes");
        theta_hat_.push_back(kl_half_spectrum(spectrum, FeatureParam{row}, n));
    }
}

FourierFeatureSet::InputContext FourierFeatureSet::prepare(const GridFunction& a) const {
    const auto* g1 = std::get_if<Grid1D>(&a.grid);
    require(g1 != nullptr && *g1 == grid_, "fourier feature: input grid mismatch");
    InputContext ctx;
    ctx.a_hat = fft::rfft(a.values);
    double inv_n = 1.0 / grid_.n_unique;
    for (auto& c : ctx.a_hat) c *= inv_n;
    return ctx;
}

void FourierFeatureSet::eval(const InputContext& ctx, int j, std::vector<double>& out) const {
    const auto& th = theta_hat_[static_cast<size_t>(j)];
    std::vector<std::complex<double>> prod(th.size());
    for (size_t k = 0; k < th.size(); ++k) prod[k] = chi_[k] * ctx.a_hat[k] * th[k];
    out = fft::irfft(prod, grid_.n_unique);
    for (auto& v : out) v = elu(v);
}

GridFunction FourierFeatureSet::eval_one(const GridFunction& a, int j) const {
    std::vector<double> out;
    eval(prepare(a), j, out);
    return GridFunction{a.grid, std::move(out)};
}

GridFunction fourier_feature(const GridFunction& a, const FeatureParam& theta,
                             const FourierFamily& family) {
    const auto* g1 = std::get_if<Grid1D>(&a.grid);
    require(g1 != nullptr, "fourier_feature: input must live on a 1D grid");
    FourierFamily fam = family;
    if (fam.theta_modes == 0) fam.theta_modes = theta.count();
    FourierFeatureSet set(fam, {theta.xi}, *g1);
    return set.eval_one(a, 0);
}

// ---------------------------------------------------------------------------
// Predictor-corrector features

void gradient_2d(const std::vector<double>& f, int r, double h, std::vector<double>& gx,
                 std::vector<double>& gy) {
    gx.assign(f.size(), 0.0);
    gy.assign(f.size(), 0.0);
    auto id = [r](int i, int j) { return static_cast<size_t>(i) * r + j; };
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < r; ++j) {
            if (i == 0)
                gx[id(i, j)] = (f[id(1, j)] - f[id(0, j)]) / h;
            else if (i == r - 1)
                gx[id(i, j)] = (f[id(r - 1, j)] - f[id(r - 2, j)]) / h;
            else
                gx[id(i, j)] = (f[id(i + 1, j)] - f[id(i - 1, j)]) / (2.0 * h);
            if (j == 0)
                gy[id(i, j)] = (f[id(i, 1)] - f[id(i, 0)]) / h;
            else if (j == r - 1)
                gy[id(i, j)] = (f[id(i, r - 1)] - f[id(i, r - 2)]) / h;
            else
                gy[id(i, j)] = (f[id(i, j + 1)] - f[id(i, j - 1)]) / (2.0 * h);
        }
}

PcFeatureSet::PcFeatureSet(const PcFamily& family, const std::vector<std::vector<double>>& xi,
                           const Grid2D& grid)
    : family_(family), grid_(grid) {
    require(family.sigma_delta > 0.0, "pc family: sigma delta must be positive");
    require(family.s_minus <= family.s_plus, "pc family: needs s_minus <= s_plus");
    int modes = family.theta_modes > 0 ? family.theta_modes : default_modes(DomainKind::Neumann2D, Grid{grid});
    CovarianceSpectrum spectrum =
        eigenpairs(DomainKind::Neumann2D, family.tau_prime, family.alpha_prime, modes);
    s1_.reserve(xi.size());
    s2_.reserve(xi.size());
    for (const auto& row : xi) {
        require(static_cast<int>(row.size()) == 2 * modes,
                "pc feature set: xi row must stack two draws of length theta_modes");
        FeatureParam p1{std::vector<double>(row.begin(), row.begin() + modes)};
        FeatureParam p2{std::vector<double>(row.begin() + modes, row.end())};
        GridFunction t1 = sample_field(spectrum, p1, Grid{grid});
        GridFunction t2 = sample_field(spectrum, p2, Grid{grid});
        for (auto& v : t1.values)
            v = thresholded_sigmoid(v, family.s_plus, family.s_minus, family.sigma_delta);
        for (auto& v : t2.values)
            v = thresholded_sigmoid(v, family.s_plus, family.s_minus, family.sigma_delta);
        s1_.push_back(std::move(t1.values));
        s2_.push_back(std::move(t2.values));
    }
}

PcFeatureSet::InputContext PcFeatureSet::prepare(const GridFunction& a) const {
    const auto* g2 = std::get_if<Grid2D>(&a.grid);
    require(g2 != nullptr && *g2 == grid_, "pc feature: input grid mismatch");
    for (double v : a.values)
        if (!(v > 0.0)) throw ConfigError("pc feature: coefficient must be positive everywhere");

    InputContext ctx;
    ctx.f_over_a.resize(a.values.size());
    for (size_t i = 0; i < a.values.size(); ++i) ctx.f_over_a[i] = family_.forcing / a.values[i];

    // grad(log a) uses the heat-mollified coefficient; f/a uses the raw one.
    GridFunction a_eps = smooth_coefficient(a, family_.smoothing);
    std::vector<double> log_a(a_eps.values.size());
    for (size_t i = 0; i < log_a.size(); ++i) log_a[i] = std::log(a_eps.values[i]);
    gradient_2d(log_a, grid_.r, grid_.h(), ctx.grad_log_x, ctx.grad_log_y);
    return ctx;
}

void PcFeatureSet::eval(const InputContext& ctx, int j, std::vector<double>& out) const {
    const auto& s1 = s1_[static_cast<size_t>(j)];
    const auto& s2 = s2_[static_cast<size_t>(j)];
    size_t sz = ctx.f_over_a.size();

    GridFunction rhs0{Grid{grid_}, std::vector<double>(sz)};
    for (size_t i = 0; i < sz; ++i) rhs0.values[i] = ctx.f_over_a[i] + s1[i];
    GridFunction p0 = fast_poisson_dirichlet(rhs0);

    std::vector<double> gx, gy;
    gradient_2d(p0.values, grid_.r, grid_.h(), gx, gy);

    GridFunction rhs1{Grid{grid_}, std::vector<double>(sz)};
    for (size_t i = 0; i < sz; ++i)
        rhs1.values[i] =
            ctx.f_over_a[i] + s2[i] + ctx.grad_log_x[i] * gx[i] + ctx.grad_log_y[i] * gy[i];
    out = fast_poisson_dirichlet(rhs1).values;
}

GridFunction PcFeatureSet::eval_one(const GridFunction& a, int j) const {
    std::vector<double> out;
    eval(prepare(a), j, out);
    return GridFunction{a.grid, std::move(out)};
}

GridFunction pc_feature(const GridFunction& a, const FeatureParam& theta1,
                        const FeatureParam& theta2, const PcFamily& family) {
    const auto* g2 = std::get_if<Grid2D>(&a.grid);
    require(g2 != nullptr, "pc_feature: input must live on a 2D grid");
    require(theta1.count() == theta2.count(), "pc_feature: draws must have equal length");
    PcFamily fam = family;
    if (fam.theta_modes == 0) fam.theta_modes = theta1.count();
    std::vector<double> stacked = theta1.xi;
    stacked.insert(stacked.end(), theta2.xi.begin(), theta2.xi.end());
    PcFeatureSet set(fam, {stacked}, *g2);
    return set.eval_one(a, 0);
}

}  // namespace fvrf
