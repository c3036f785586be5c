#include "fvrf/burgers.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "fvrf/fft.hpp"
#include "fvrf/rng.hpp"

namespace fvrf {

double default_burgers_dt(const Grid1D& grid) { return 1e-4 * 1024.0 / grid.n_unique; }

namespace {

using Spectrum = std::vector<std::complex<double>>;

// -1/2 d/dx (u^2) in coefficient space. Spectra hold continuum coefficients
// (unnormalized inverse / forward divided by n). The Nyquist bin is always
// dropped; with dealiasing the 2/3 rule zeroes |k| > n/3 as well.
struct NonlinearTerm {
    int n;
    int k_cut;

    Spectrum operator()(const Spectrum& v_hat) const {
        std::vector<double> u = fft::irfft(v_hat, n);
        for (auto& x : u) x *= x;
        Spectrum w = fft::rfft(u);
        Spectrum out(v_hat.size());
        double inv_n = 1.0 / n;
        for (int k = 0; k < static_cast<int>(out.size()); ++k) {
            if (k > k_cut) {
                out[static_cast<size_t>(k)] = {0.0, 0.0};
                continue;
            }
            // -(i 2 pi k / 2) * w_k, with w normalized by 1/n
            std::complex<double> wk = w[static_cast<size_t>(k)] * inv_n;
            out[static_cast<size_t>(k)] =
                std::complex<double>(0.0, -M_PI * k) * wk;
        }
        return out;
    }
};

bool finite_spectrum(const Spectrum& v) {
    for (const auto& c : v)
        if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) return false;
    return true;
}

// One integrating-factor RK4 step of size h on the coefficient vector.
// e_half/e_full are exp(-eps (2 pi k)^2 h/2) and its square.
Spectrum ifrk4_step(const Spectrum& v, double h, const std::vector<double>& e_half,
                    const std::vector<double>& e_full, const NonlinearTerm& nonlinear) {
    size_t nb = v.size();
    Spectrum n1 = nonlinear(v);
    Spectrum a(nb), b(nb), c(nb);
    for (size_t k = 0; k < nb; ++k) a[k] = e_half[k] * (v[k] + 0.5 * h * n1[k]);
    Spectrum na = nonlinear(a);
    for (size_t k = 0; k < nb; ++k) b[k] = e_half[k] * v[k] + 0.5 * h * na[k];
    Spectrum nb_term = nonlinear(b);
    for (size_t k = 0; k < nb; ++k) c[k] = e_full[k] * v[k] + h * e_half[k] * nb_term[k];
    Spectrum nc = nonlinear(c);
    Spectrum out(nb);
    for (size_t k = 0; k < nb; ++k)
        out[k] = e_full[k] * v[k] +
                 (h / 6.0) * (e_full[k] * n1[k] + 2.0 * e_half[k] * (na[k] + nb_term[k]) + nc[k]);
    return out;
}

}  // namespace

GridFunction solve_burgers(const GridFunction& a, const BurgersConfig& cfg) {
    const auto* g1 = std::get_if<Grid1D>(&a.grid);
    require(g1 != nullptr, "solve_burgers: input must live on a 1D grid");
    require(cfg.viscosity > 0.0, "solve_burgers: viscosity must be positive");
    require(cfg.t_final > 0.0, "solve_burgers: t_final must be positive");
    double dt = cfg.dt > 0.0 ? cfg.dt : default_burgers_dt(*g1);
    require(dt <= cfg.t_final, "solve_burgers: dt exceeds t_final");

    if (std::fabs(spatial_mean(a)) > 1e-10)
        throw ConfigError("solve_burgers: input mean exceeds 1e-10");

    int n = g1->n_unique;
    NonlinearTerm nonlinear{n, cfg.dealias ? n / 3 : n / 2 - 1};

    Spectrum v = fft::rfft(a.values);
    for (auto& c : v) c /= static_cast<double>(n);
    v.back() = {0.0, 0.0};  // Nyquist carries no usable derivative

    auto make_factors = [&](double h) {
        std::vector<double> e_half(v.size()), e_full(v.size());
        for (size_t k = 0; k < v.size(); ++k) {
            double ksq = 4.0 * M_PI * M_PI * static_cast<double>(k) * static_cast<double>(k);
            e_half[k] = std::exp(-cfg.viscosity * ksq * 0.5 * h);
            e_full[k] = e_half[k] * e_half[k];
        }
        return std::make_pair(e_half, e_full);
    };

    long long steps = static_cast<long long>(std::floor(cfg.t_final / dt + 1e-9));
    double remainder = cfg.t_final - static_cast<double>(steps) * dt;
    if (remainder < 1e-12 * cfg.t_final) remainder = 0.0;

    auto [e_half, e_full] = make_factors(dt);
    for (long long s = 0; s < steps; ++s) {
        v = ifrk4_step(v, dt, e_half, e_full, nonlinear);
        if (!finite_spectrum(v))
            throw NumericalError("solve_burgers: NaN during time stepping (CFL violation?)");
    }
    if (remainder > 0.0) {
        auto [eh, ef] = make_factors(remainder);
        v = ifrk4_step(v, remainder, eh, ef, nonlinear);
        if (!finite_spectrum(v)) throw NumericalError("solve_burgers: NaN in final short step");
    }

    return GridFunction{a.grid, fft::irfft(v, n)};
}

Dataset gen_burgers_dataset(int n, const BurgersPrior& prior, const BurgersConfig& cfg,
                            const Grid1D& grid, uint64_t master_seed, int threads) {
    require(n >= 1, "gen_burgers_dataset: n must be >= 1");
    int modes = prior.modes > 0 ? prior.modes : default_modes(DomainKind::Periodic1D, Grid{grid});
    CovarianceSpectrum spectrum = eigenpairs(DomainKind::Periodic1D, prior.tau, prior.alpha_reg, modes);

    Dataset ds;
    ds.grid = grid;
    ds.n = n;
    ds.inputs.resize(static_cast<size_t>(n) * grid.n_unique);
    ds.outputs.resize(static_cast<size_t>(n) * grid.n_unique);

    double dt = cfg.dt > 0.0 ? cfg.dt : default_burgers_dt(grid);
    parallel_for(n, threads, [&](int i) {
        try {
            FeatureParam xi = draw_feature_param(master_seed, static_cast<uint64_t>(i), modes);
            GridFunction a = sample_field(spectrum, xi, Grid{grid});
            GridFunction u = solve_burgers(a, cfg);
            std::copy(a.values.begin(), a.values.end(),
                      ds.inputs.begin() + static_cast<size_t>(i) * grid.n_unique);
            std::copy(u.values.begin(), u.values.end(),
                      ds.outputs.begin() + static_cast<size_t>(i) * grid.n_unique);
        } catch (const std::exception& e) {
            throw NumericalError("sample " + std::to_string(i) + ": " + e.what());
        }
    });

    ds.manifest = {{"pde", "burgers"},
                   {"k", grid.external_k()},
                   {"epsilon", cfg.viscosity},
                   {"t_final", cfg.t_final},
                   {"dt", dt},
                   {"dealias", cfg.dealias},
                   {"tau", prior.tau},
                   {"alpha_reg", prior.alpha_reg},
                   {"prior_modes", modes},
                   {"seed", master_seed}};
    return ds;
}

}  // namespace fvrf
