#pragma once

#include <cstdint>
#include <optional>

#include "fvrf/grf.hpp"
#include "fvrf/grid.hpp"
#include "fvrf/io.hpp"

namespace fvrf {

// Two-valued level-set prior: a = a_plus where the underlying Gaussian field
// is >= 0 and a_minus where it is negative.
struct LevelSetPrior {
    double a_plus = 12.0;
    double a_minus = 3.0;
    double tau = 3.0;
    double alpha_reg = 2.0;
    int modes = 0;  // 0 -> grid default, the quarter-disc |k'| <= r-2
};

struct SmoothingParams {
    double eta = 1e-4;
    double dt = 0.03;
    int steps = 34;
};

struct DarcyConfig {
    double forcing = 1.0;                       // constant source term
    std::optional<GridFunction> forcing_field;  // overrides the constant when set
    double cg_tolerance = 1e-10;
    int cg_max_iters = 500;
    bool harmonic_faces = false;  // arithmetic face averaging by default
    SmoothingParams smoothing;
};

GridFunction sample_levelset_coefficient(const LevelSetPrior& prior, const Grid2D& grid,
                                         uint64_t master_seed, uint64_t stream_id);

// Forward-Euler heat flow v_t = eta Lap v with reflected-ghost Neumann walls;
// errors if the explicit step is unstable on the given grid.
GridFunction smooth_coefficient(const GridFunction& a, const SmoothingParams& p);

// Exact solve of the 5-point discrete problem -Lap u = rhs, u = 0 on the
// boundary, by DST-I diagonalization. Boundary entries of rhs are ignored.
GridFunction fast_poisson_dirichlet(const GridFunction& rhs);

struct CgStats {
    int iterations = 0;
    double rel_residual = 0.0;
};

// Conservative flux discretization of -div(a grad u) = f with zero Dirichlet
// data, solved by CG preconditioned with the fast Poisson solver.
GridFunction solve_darcy(const GridFunction& a, const DarcyConfig& cfg, CgStats* stats = nullptr);

Dataset gen_darcy_dataset(int n, const LevelSetPrior& prior, const DarcyConfig& cfg,
                          const Grid2D& grid, uint64_t master_seed, int threads);

}  // namespace fvrf
