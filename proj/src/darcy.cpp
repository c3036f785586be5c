#include "fvrf/darcy.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "fvrf/fft.hpp"

namespace fvrf {

GridFunction sample_levelset_coefficient(const LevelSetPrior& prior, const Grid2D& grid,
                                         uint64_t master_seed, uint64_t stream_id) {
    require(prior.a_minus > 0.0 && prior.a_minus <= prior.a_plus,
            "level-set prior needs 0 < a_minus <= a_plus");
    int modes = prior.modes > 0 ? prior.modes : default_modes(DomainKind::Neumann2D, Grid{grid});
    CovarianceSpectrum spectrum =
        eigenpairs(DomainKind::Neumann2D, prior.tau, prior.alpha_reg, modes);
    FeatureParam xi = draw_feature_param(master_seed, stream_id, modes);
    GridFunction g = sample_field(spectrum, xi, Grid{grid});
    for (auto& v : g.values) v = v >= 0.0 ? prior.a_plus : prior.a_minus;
    return g;
}

GridFunction smooth_coefficient(const GridFunction& a, const SmoothingParams& p) {
    const auto* g2 = std::get_if<Grid2D>(&a.grid);
    require(g2 != nullptr, "smooth_coefficient: field must live on a 2D grid");
    int r = g2->r;
    double h = g2->h();
    double mu = p.eta * p.dt / (h * h);
    if (mu >= 0.25)
        throw NumericalError("smooth_coefficient: explicit step unstable (eta dt/h^2 = " +
                             std::to_string(mu) + " >= 1/4)");

    std::vector<double> v = a.values, next(a.values.size());
    auto at = [&](const std::vector<double>& f, int i, int j) -> double {
        // reflected ghost nodes give the homogeneous Neumann wall
        if (i < 0) i = 1;
        if (i > r - 1) i = r - 2;
        if (j < 0) j = 1;
        if (j > r - 1) j = r - 2;
        return f[static_cast<size_t>(i) * r + j];
    };
    for (int s = 0; s < p.steps; ++s) {
        for (int i = 0; i < r; ++i)
            for (int j = 0; j < r; ++j) {
                double lap = at(v, i + 1, j) + at(v, i - 1, j) + at(v, i, j + 1) +
                             at(v, i, j - 1) - 4.0 * at(v, i, j);
                next[static_cast<size_t>(i) * r + j] = v[static_cast<size_t>(i) * r + j] + mu * lap;
            }
        v.swap(next);
    }
    return GridFunction{a.grid, std::move(v)};
}

namespace {

// 5-point variable-coefficient operator on interior nodes, zero Dirichlet.
// Face coefficients by arithmetic (or harmonic) averaging.
struct DarcyOperator {
    int r;
    double inv_h2;
    const std::vector<double>& a;
    bool harmonic;

    double face(double left, double right) const {
        if (harmonic) return 2.0 * left * right / (left + right);
        return 0.5 * (left + right);
    }

    // u and out are (r-2)x(r-2) interior blocks, row-major.
    void apply(const std::vector<double>& u, std::vector<double>& out) const {
        int n = r - 2;
        auto uin = [&](int i, int j) -> double {  // interior indices, 1-based grid offsets
            if (i < 1 || i > n || j < 1 || j > n) return 0.0;
            return u[static_cast<size_t>(i - 1) * n + (j - 1)];
        };
        auto ag = [&](int i, int j) -> double { return a[static_cast<size_t>(i) * r + j]; };
        for (int i = 1; i <= n; ++i)
            for (int j = 1; j <= n; ++j) {
                double an = face(ag(i, j), ag(i + 1, j));
                double as = face(ag(i, j), ag(i - 1, j));
                double ae = face(ag(i, j), ag(i, j + 1));
                double aw = face(ag(i, j), ag(i, j - 1));
                double c = uin(i, j);
                out[static_cast<size_t>(i - 1) * n + (j - 1)] =
                    inv_h2 * (an * (c - uin(i + 1, j)) + as * (c - uin(i - 1, j)) +
                              ae * (c - uin(i, j + 1)) + aw * (c - uin(i, j - 1)));
            }
    }
};

// DST-I solve of the interior 5-point Laplacian; input and output are
// (r-2)^2 interior blocks.
std::vector<double> poisson_interior(const std::vector<double>& rhs, int r, double h) {
    int n = r - 2;
    std::vector<double> u = fft::dst2d(rhs, n);
    double scale = 1.0 / (4.0 * static_cast<double>(n + 1) * (n + 1));
    for (int p = 1; p <= n; ++p) {
        double sp = std::sin(0.5 * M_PI * p * h);
        for (int q = 1; q <= n; ++q) {
            double sq = std::sin(0.5 * M_PI * q * h);
            double eig = 4.0 / (h * h) * (sp * sp + sq * sq);
            u[static_cast<size_t>(p - 1) * n + (q - 1)] *= scale / eig;
        }
    }
    return fft::dst2d(u, n);
}

std::vector<double> interior_of(const GridFunction& f, int r) {
    int n = r - 2;
    std::vector<double> out(static_cast<size_t>(n) * n);
    for (int i = 1; i <= n; ++i)
        for (int j = 1; j <= n; ++j)
            out[static_cast<size_t>(i - 1) * n + (j - 1)] = f.values[static_cast<size_t>(i) * r + j];
    return out;
}

GridFunction embed_interior(const std::vector<double>& interior, const Grid& g, int r) {
    GridFunction out = make_function(g);
    int n = r - 2;
    for (int i = 1; i <= n; ++i)
        for (int j = 1; j <= n; ++j)
            out.values[static_cast<size_t>(i) * r + j] = interior[static_cast<size_t>(i - 1) * n + (j - 1)];
    return out;
}

}  // namespace

GridFunction fast_poisson_dirichlet(const GridFunction& rhs) {
    const auto* g2 = std::get_if<Grid2D>(&rhs.grid);
    require(g2 != nullptr, "fast_poisson_dirichlet: rhs must live on a 2D grid");
    int r = g2->r;
    return embed_interior(poisson_interior(interior_of(rhs, r), r, g2->h()), rhs.grid, r);
}

GridFunction solve_darcy(const GridFunction& a, const DarcyConfig& cfg, CgStats* stats) {
    const auto* g2 = std::get_if<Grid2D>(&a.grid);
    require(g2 != nullptr, "solve_darcy: coefficient must live on a 2D grid");
    for (double v : a.values)
        if (!(v > 0.0)) throw ConfigError("solve_darcy: coefficient must be positive everywhere");
    require(cfg.cg_tolerance > 0.0, "solve_darcy: cg_tolerance must be positive");

    int r = g2->r;
    double h = g2->h();
    int n = r - 2;
    size_t sz = static_cast<size_t>(n) * n;
    DarcyOperator op{r, 1.0 / (h * h), a.values, cfg.harmonic_faces};

    std::vector<double> f(sz, cfg.forcing);
    if (cfg.forcing_field) {
        require(same_grid(cfg.forcing_field->grid, a.grid),
                "solve_darcy: forcing field grid mismatch");
        f = interior_of(*cfg.forcing_field, r);
    }
    std::vector<double> u(sz, 0.0), res = f, z, p, au(sz);

    auto dot = [&](const std::vector<double>& x, const std::vector<double>& y) {
        double s = 0.0;
        for (size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
        return s;
    };

    double f_norm = std::sqrt(dot(f, f));
    if (f_norm == 0.0) {
        if (stats) *stats = {0, 0.0};
        return make_function(a.grid);
    }

    z = poisson_interior(res, r, h);
    p = z;
    double rz = dot(res, z);
    int it = 0;
    double rel = 1.0;
    for (; it < cfg.cg_max_iters; ++it) {
        rel = std::sqrt(dot(res, res)) / f_norm;
        if (rel <= cfg.cg_tolerance) break;
        op.apply(p, au);
        double alpha = rz / dot(p, au);
        for (size_t i = 0; i < sz; ++i) u[i] += alpha * p[i];
        for (size_t i = 0; i < sz; ++i) res[i] -= alpha * au[i];
        z = poisson_interior(res, r, h);
        double rz_next = dot(res, z);
        double beta = rz_next / rz;
        rz = rz_next;
        for (size_t i = 0; i < sz; ++i) p[i] = z[i] + beta * p[i];
        if (!std::isfinite(rz)) throw NumericalError("solve_darcy: CG broke down");
    }
    rel = std::sqrt(dot(res, res)) / f_norm;
    if (rel > cfg.cg_tolerance)
        throw NumericalError("solve_darcy: CG failed to converge in " +
                             std::to_string(cfg.cg_max_iters) + " iterations (rel=" +
                             std::to_string(rel) + ")");
    if (stats) *stats = {it, rel};
    return embed_interior(u, a.grid, r);
}

Dataset gen_darcy_dataset(int n, const LevelSetPrior& prior, const DarcyConfig& cfg,
                          const Grid2D& grid, uint64_t master_seed, int threads) {
    require(n >= 1, "gen_darcy_dataset: n must be >= 1");
    Dataset ds;
    ds.grid = grid;
    ds.n = n;
    size_t nodes = static_cast<size_t>(grid.r) * grid.r;
    ds.inputs.resize(static_cast<size_t>(n) * nodes);
    ds.outputs.resize(static_cast<size_t>(n) * nodes);

    parallel_for(n, threads, [&](int i) {
        try {
            GridFunction a =
                sample_levelset_coefficient(prior, grid, master_seed, static_cast<uint64_t>(i));
            GridFunction u = solve_darcy(a, cfg);
            std::copy(a.values.begin(), a.values.end(), ds.inputs.begin() + i * nodes);
            std::copy(u.values.begin(), u.values.end(), ds.outputs.begin() + i * nodes);
        } catch (const std::exception& e) {
            throw NumericalError("sample " + std::to_string(i) + ": " + e.what());
        }
    });

    int modes = prior.modes > 0 ? prior.modes : default_modes(DomainKind::Neumann2D, Grid{grid});
    ds.manifest = {{"pde", "darcy"},
                   {"r", grid.r},
                   {"a_plus", prior.a_plus},
                   {"a_minus", prior.a_minus},
                   {"contrast_ratio", prior.a_plus / prior.a_minus},
                   {"tau", prior.tau},
                   {"alpha_reg", prior.alpha_reg},
                   {"prior_modes", modes},
                   {"forcing", cfg.forcing},
                   {"cg_tolerance", cfg.cg_tolerance},
                   {"seed", master_seed}};
    return ds;
}

}  // namespace fvrf
