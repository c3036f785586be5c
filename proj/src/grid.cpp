#include "fvrf/grid.hpp"

#include <cmath>
#include <string>

namespace fvrf {

bool is_power_of_two(int v) { return v > 0 && (v & (v - 1)) == 0; }

Grid1D make_grid1d(int n_unique) {
    require(is_power_of_two(n_unique) && n_unique >= 16,
            "1D grid needs n_unique = 2^p with p >= 4, got " + std::to_string(n_unique));
    return Grid1D{n_unique};
}

Grid2D make_grid2d(int r) {
    require(r >= 17 && is_power_of_two(r - 1),
            "2D grid needs r = 2^p + 1 with p >= 4, got " + std::to_string(r));
    return Grid2D{r};
}

int num_nodes(const Grid& g) {
    if (const auto* g1 = std::get_if<Grid1D>(&g)) return g1->n_unique;
    return std::get<Grid2D>(g).r * std::get<Grid2D>(g).r;
}

bool same_grid(const Grid& a, const Grid& b) { return a == b; }

GridFunction make_function(const Grid& g) {
    return GridFunction{g, std::vector<double>(static_cast<size_t>(num_nodes(g)), 0.0)};
}

std::vector<double> quadrature_weights(const Grid& g) {
    std::vector<double> w(static_cast<size_t>(num_nodes(g)));
    if (const auto* g1 = std::get_if<Grid1D>(&g)) {
        double h = g1->h();
        for (auto& v : w) v = h;
        return w;
    }
    const auto& g2 = std::get<Grid2D>(g);
    int r = g2.r;
    double h2 = g2.h() * g2.h();
    for (int i = 0; i < r; ++i) {
        double wi = (i == 0 || i == r - 1) ? 0.5 : 1.0;
        for (int j = 0; j < r; ++j) {
            double wj = (j == 0 || j == r - 1) ? 0.5 : 1.0;
            w[static_cast<size_t>(i) * r + j] = wi * wj * h2;
        }
    }
    return w;
}

static void check_same_grid(const GridFunction& f, const GridFunction& g) {
    require(same_grid(f.grid, g.grid), "grid mismatch between operands");
    require(f.values.size() == g.values.size(), "field length mismatch");
}

double inner_product_l2(const GridFunction& f, const GridFunction& g) {
    check_same_grid(f, g);
    if (const auto* g1 = std::get_if<Grid1D>(&f.grid)) {
        double s = 0.0;
        for (size_t i = 0; i < f.values.size(); ++i) s += f.values[i] * g.values[i];
        return g1->h() * s;
    }
    const auto& g2 = std::get<Grid2D>(f.grid);
    int r = g2.r;
    double h2 = g2.h() * g2.h();
    double s = 0.0;
    for (int i = 0; i < r; ++i) {
        double wi = (i == 0 || i == r - 1) ? 0.5 : 1.0;
        double row = 0.0;
        const double* fv = &f.values[static_cast<size_t>(i) * r];
        const double* gv = &g.values[static_cast<size_t>(i) * r];
        row += 0.5 * fv[0] * gv[0];
        for (int j = 1; j < r - 1; ++j) row += fv[j] * gv[j];
        row += 0.5 * fv[r - 1] * gv[r - 1];
        s += wi * row;
    }
    return h2 * s;
}

double norm_l2(const GridFunction& f) { return std::sqrt(inner_product_l2(f, f)); }

double spatial_mean(const GridFunction& f) {
    GridFunction one = make_function(f.grid);
    for (auto& v : one.values) v = 1.0;
    return inner_product_l2(f, one);  // domain has unit measure
}

double relative_l2_error(const GridFunction& truth, const GridFunction& pred) {
    check_same_grid(truth, pred);
    double nt = norm_l2(truth);
    if (nt <= 0.0) throw ConfigError("relative_l2_error: truth has zero L2 norm");
    GridFunction diff = truth;
    for (size_t i = 0; i < diff.values.size(); ++i) diff.values[i] -= pred.values[i];
    return norm_l2(diff) / nt;
}

GridFunction restrict_function(const GridFunction& f, int factor) {
    require(factor >= 1 && is_power_of_two(factor), "restriction factor must be a power of two");
    if (factor == 1) return f;
    if (const auto* g1 = std::get_if<Grid1D>(&f.grid)) {
        require(g1->n_unique % factor == 0, "factor does not divide n_unique");
        Grid1D coarse = make_grid1d(g1->n_unique / factor);
        GridFunction out{coarse, std::vector<double>(static_cast<size_t>(coarse.n_unique))};
        for (int j = 0; j < coarse.n_unique; ++j)
            out.values[j] = f.values[static_cast<size_t>(j) * factor];
        return out;
    }
    const auto& g2 = std::get<Grid2D>(f.grid);
    require((g2.r - 1) % factor == 0, "factor does not divide r-1");
    Grid2D coarse = make_grid2d((g2.r - 1) / factor + 1);
    GridFunction out{coarse, std::vector<double>(static_cast<size_t>(coarse.r) * coarse.r)};
    for (int i = 0; i < coarse.r; ++i)
        for (int j = 0; j < coarse.r; ++j)
            out.values[static_cast<size_t>(i) * coarse.r + j] =
                f.values[static_cast<size_t>(i) * factor * g2.r + static_cast<size_t>(j) * factor];
    return out;
}

}  // namespace fvrf
