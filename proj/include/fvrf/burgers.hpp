#pragma once

#include <cstdint>

#include "fvrf/grf.hpp"
#include "fvrf/grid.hpp"
#include "fvrf/io.hpp"

namespace fvrf {

struct BurgersConfig {
    double viscosity = 1e-2;
    double t_final = 1.0;
    // Time step; 0 selects the default 1e-4 * (1024 / n_unique), which keeps
    // the advective CFL comfortable for draws from the tau=7, alpha=2.5 prior.
    double dt = 0.0;
    bool dealias = true;
};

double default_burgers_dt(const Grid1D& grid);

// Evolves the viscous Burgers equation with periodic boundary conditions and
// zero forcing to t = t_final. FFT pseudospectral in space; diffusion handled
// exactly through the integrating factor exp(-eps (2 pi k)^2 t) and classical
// RK4 on the transformed nonlinear term. The last step is shortened so the
// total time is exactly t_final. Input must have zero mean (1e-10).
GridFunction solve_burgers(const GridFunction& a, const BurgersConfig& cfg);

struct BurgersPrior {
    double tau = 7.0;
    double alpha_reg = 2.5;
    int modes = 0;  // 0 -> all modes below the generation grid Nyquist
};

// n pairs (a_i, u_i(T)) with a_i drawn from independent per-sample streams.
Dataset gen_burgers_dataset(int n, const BurgersPrior& prior, const BurgersConfig& cfg,
                            const Grid1D& grid, uint64_t master_seed, int threads);

}  // namespace fvrf
