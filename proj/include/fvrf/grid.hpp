#pragma once

#include <variant>
#include <vector>

#include "fvrf/common.hpp"

namespace fvrf {

// Equispaced periodic mesh on [0,1). Only the n_unique distinct nodes
// x_j = j*h are stored; external files carry K = n_unique + 1 nodes with the
// duplicated endpoint.
struct Grid1D {
    int n_unique = 0;
    double h() const { return 1.0 / n_unique; }
    int external_k() const { return n_unique + 1; }
    bool operator==(const Grid1D&) const = default;
};

// Equispaced mesh on [0,1]^2 with r nodes per side, boundary included.
// Fields are stored row-major, second index fastest.
struct Grid2D {
    int r = 0;
    double h() const { return 1.0 / (r - 1); }
    bool operator==(const Grid2D&) const = default;
};

using Grid = std::variant<Grid1D, Grid2D>;

bool is_power_of_two(int v);

Grid1D make_grid1d(int n_unique);  // requires n_unique = 2^p, p >= 4
Grid2D make_grid2d(int r);         // requires r = 2^p + 1, p >= 4

int num_nodes(const Grid& g);
bool same_grid(const Grid& a, const Grid& b);

struct GridFunction {
    Grid grid;
    std::vector<double> values;
};

GridFunction make_function(const Grid& g);

// Composite trapezoid weights. On the periodic 1D grid every unique node gets
// weight h; on the 2D grid edges get h^2/2 and corners h^2/4.
std::vector<double> quadrature_weights(const Grid& g);

double inner_product_l2(const GridFunction& f, const GridFunction& g);
double norm_l2(const GridFunction& f);
double spatial_mean(const GridFunction& f);

// ||truth - pred|| / ||truth||; errors on zero-norm truth.
double relative_l2_error(const GridFunction& truth, const GridFunction& pred);

// Strided subsampling keeping node 0 (and, in 2D, all four boundaries).
// factor must be a power of two dividing n_unique (1D) or r-1 (2D).
GridFunction restrict_function(const GridFunction& f, int factor);

}  // namespace fvrf
