#include <doctest.h>

#include <cmath>

#include "fvrf/darcy.hpp"
#include "fvrf/rng.hpp"

using namespace fvrf;

namespace {

GridFunction manufactured_rhs(int r) {
    GridFunction f = make_function(Grid{make_grid2d(r)});
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < r; ++j) {
            double x = static_cast<double>(i) / (r - 1);
            double y = static_cast<double>(j) / (r - 1);
            f.values[static_cast<size_t>(i) * r + j] =
                2.0 * M_PI * M_PI * std::sin(M_PI * x) * std::sin(M_PI * y);
        }
    return f;
}

double manufactured_max_error(const GridFunction& u) {
    int r = std::get<Grid2D>(u.grid).r;
    double err = 0.0;
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < r; ++j) {
            double x = static_cast<double>(i) / (r - 1);
            double y = static_cast<double>(j) / (r - 1);
            err = std::max(err, std::fabs(u.values[static_cast<size_t>(i) * r + j] -
                                          std::sin(M_PI * x) * std::sin(M_PI * y)));
        }
    return err;
}

// Independent 5-point stencil, used to verify the fast solver's residual.
double stencil_residual(const GridFunction& u, const GridFunction& rhs) {
    int r = std::get<Grid2D>(u.grid).r;
    double h = std::get<Grid2D>(u.grid).h();
    double worst = 0.0;
    auto at = [&](const GridFunction& f, int i, int j) {
        return f.values[static_cast<size_t>(i) * r + j];
    };
    for (int i = 1; i < r - 1; ++i)
        for (int j = 1; j < r - 1; ++j) {
            double lap = (4.0 * at(u, i, j) - at(u, i + 1, j) - at(u, i - 1, j) -
                          at(u, i, j + 1) - at(u, i, j - 1)) /
                         (h * h);
            worst = std::max(worst, std::fabs(lap - at(rhs, i, j)));
        }
    return worst;
}

GridFunction constant_field(int r, double v) {
    GridFunction f = make_function(Grid{make_grid2d(r)});
    for (auto& x : f.values) x = v;
    return f;
}

}  // namespace

TEST_CASE("level-set coefficient takes exactly the two prior values") {
    LevelSetPrior prior;
    GridFunction a = sample_levelset_coefficient(prior, make_grid2d(33), 1, 0);
    bool saw_plus = false, saw_minus = false;
    for (double v : a.values) {
        CHECK((v == 12.0 || v == 3.0));
        saw_plus |= v == 12.0;
        saw_minus |= v == 3.0;
    }
    CHECK(saw_plus);
    CHECK(saw_minus);
}

TEST_CASE("level sets split evenly by symmetry") {
    LevelSetPrior prior;
    long long plus = 0, total = 0;
    for (uint64_t s = 0; s < 200; ++s) {
        GridFunction a = sample_levelset_coefficient(prior, make_grid2d(17), 99, s);
        for (double v : a.values) {
            plus += v == 12.0 ? 1 : 0;
            ++total;
        }
    }
    double frac = static_cast<double>(plus) / total;
    CHECK(frac == doctest::Approx(0.5).epsilon(0.04));
}

TEST_CASE("heat smoother: fixed points, mass conservation, extrema") {
    SmoothingParams sp;
    GridFunction c = constant_field(33, 5.0);
    GridFunction sc = smooth_coefficient(c, sp);
    for (double v : sc.values) CHECK(v == doctest::Approx(5.0).epsilon(1e-14));

    LevelSetPrior prior;
    GridFunction a = sample_levelset_coefficient(prior, make_grid2d(33), 2, 0);
    GridFunction sa = smooth_coefficient(a, sp);
    CHECK(spatial_mean(sa) == doctest::Approx(spatial_mean(a)).epsilon(1e-10));
    double lo = 1e300, hi = -1e300;
    for (double v : sa.values) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    CHECK(lo >= 3.0 - 1e-12);
    CHECK(hi <= 12.0 + 1e-12);
}

TEST_CASE("fast Poisson: manufactured eigenfunction and exact discrete residual") {
    GridFunction rhs = manufactured_rhs(33);
    GridFunction u = fast_poisson_dirichlet(rhs);
    CHECK(manufactured_max_error(u) < 2.0 * M_PI * M_PI / (33.0 * 33.0));
    CHECK(stencil_residual(u, rhs) < 1e-10);

    GridFunction zero = make_function(Grid{make_grid2d(17)});
    GridFunction uz = fast_poisson_dirichlet(zero);
    for (double v : uz.values) CHECK(v == 0.0);
}

TEST_CASE("fast Poisson residual is exact for random right-hand sides") {
    GridFunction rhs = make_function(Grid{make_grid2d(33)});
    RandomStream rs(4, 0);
    for (auto& v : rhs.values) v = rs.next_normal();
    GridFunction u = fast_poisson_dirichlet(rhs);
    CHECK(stencil_residual(u, rhs) < 1e-10);
}

TEST_CASE("darcy solve: manufactured solution, second order, linearity") {
    DarcyConfig cfg;
    cfg.forcing_field = manufactured_rhs(33);
    GridFunction a1 = constant_field(33, 1.0);
    CgStats stats;
    GridFunction u33 = solve_darcy(a1, cfg, &stats);
    // constant coefficient: preconditioner is exact, CG converges immediately
    CHECK(stats.iterations <= 3);
    double e33 = manufactured_max_error(u33);

    DarcyConfig cfg65;
    cfg65.forcing_field = manufactured_rhs(65);
    GridFunction u65 = solve_darcy(constant_field(65, 1.0), cfg65);
    double e65 = manufactured_max_error(u65);
    CHECK(e33 / e65 > 3.5);
    CHECK(e33 / e65 < 4.5);

    // linearity in 1/a for constant coefficients
    GridFunction u_half = solve_darcy(constant_field(33, 2.0), cfg);
    for (size_t i = 0; i < u_half.values.size(); ++i)
        CHECK(u_half.values[i] == doctest::Approx(0.5 * u33.values[i]).epsilon(1e-9));
}

TEST_CASE("darcy solve on level-set coefficients: energy identity and positivity") {
    DarcyConfig cfg;
    LevelSetPrior prior;
    Grid2D grid = make_grid2d(33);
    int r = grid.r;
    double h = grid.h();
    for (uint64_t s = 0; s < 3; ++s) {
        GridFunction a = sample_levelset_coefficient(prior, grid, 31, s);
        CgStats stats;
        GridFunction u = solve_darcy(a, cfg, &stats);
        CHECK(stats.iterations <= 200);

        for (double v : u.values) CHECK(v >= -1e-12);  // discrete maximum principle, f >= 0

        // sum over faces of a_face (du)^2 vs sum f u h^2
        double energy = 0.0, work = 0.0;
        auto uat = [&](int i, int j) { return u.values[static_cast<size_t>(i) * r + j]; };
        auto aat = [&](int i, int j) { return a.values[static_cast<size_t>(i) * r + j]; };
        for (int i = 0; i < r - 1; ++i)
            for (int j = 0; j < r; ++j) {
                double du = uat(i + 1, j) - uat(i, j);
                energy += 0.5 * (aat(i + 1, j) + aat(i, j)) * du * du;
            }
        for (int i = 0; i < r; ++i)
            for (int j = 0; j < r - 1; ++j) {
                double du = uat(i, j + 1) - uat(i, j);
                energy += 0.5 * (aat(i, j + 1) + aat(i, j)) * du * du;
            }
        for (int i = 1; i < r - 1; ++i)
            for (int j = 1; j < r - 1; ++j) work += cfg.forcing * uat(i, j) * h * h;
        CHECK(energy == doctest::Approx(work).epsilon(0.01));
    }
}

TEST_CASE("nonpositive coefficients are rejected") {
    GridFunction a = constant_field(17, 1.0);
    a.values[40] = 0.0;
    DarcyConfig cfg;
    CHECK_THROWS_AS((void)solve_darcy(a, cfg), ConfigError);
}

TEST_CASE("darcy dataset generation is deterministic") {
    LevelSetPrior prior;
    DarcyConfig cfg;
    Dataset d1 = gen_darcy_dataset(2, prior, cfg, make_grid2d(17), 7, 2);
    Dataset d2 = gen_darcy_dataset(2, prior, cfg, make_grid2d(17), 7, 1);
    CHECK(d1.inputs == d2.inputs);
    CHECK(d1.outputs == d2.outputs);
    CHECK(d1.manifest["contrast_ratio"] == 4.0);
}
