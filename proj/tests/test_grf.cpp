#include <doctest.h>

#include <cmath>

#include "fvrf/grf.hpp"
#include "fvrf/grid.hpp"
#include "fvrf/rng.hpp"

using namespace fvrf;

namespace {

// Direct KL summation, the oracle for the FFT synthesis path.
double mode_value_1d(const KlMode& m, double x) {
    return m.sine ? M_SQRT2 * std::sin(2 * M_PI * m.k1 * x) : M_SQRT2 * std::cos(2 * M_PI * m.k1 * x);
}

double mode_value_2d(const KlMode& m, double x, double y) {
    int zeros = (m.k1 == 0 ? 1 : 0) + (m.k2 == 0 ? 1 : 0);
    double norm = zeros == 1 ? M_SQRT2 : 2.0;
    return norm * std::cos(m.k1 * M_PI * x) * std::cos(m.k2 * M_PI * y);
}

GridFunction direct_sum(const CovarianceSpectrum& s, const FeatureParam& p, const Grid& g) {
    GridFunction out = make_function(g);
    if (const auto* g1 = std::get_if<Grid1D>(&g)) {
        for (int i = 0; i < g1->n_unique; ++i) {
            double x = static_cast<double>(i) / g1->n_unique;
            double acc = 0.0;
            for (int l = 0; l < p.count(); ++l)
                acc += p.xi[static_cast<size_t>(l)] * std::sqrt(s.lambda[static_cast<size_t>(l)]) *
                       mode_value_1d(s.modes[static_cast<size_t>(l)], x);
            out.values[static_cast<size_t>(i)] = acc;
        }
        return out;
    }
    int r = std::get<Grid2D>(g).r;
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < r; ++j) {
            double x = static_cast<double>(i) / (r - 1);
            double y = static_cast<double>(j) / (r - 1);
            double acc = 0.0;
            for (int l = 0; l < p.count(); ++l)
                acc += p.xi[static_cast<size_t>(l)] * std::sqrt(s.lambda[static_cast<size_t>(l)]) *
                       mode_value_2d(s.modes[static_cast<size_t>(l)], x, y);
            out.values[static_cast<size_t>(i) * r + j] = acc;
        }
    return out;
}

double rel_diff(const GridFunction& a, const GridFunction& b) {
    double num = 0.0, den = 0.0;
    for (size_t i = 0; i < a.values.size(); ++i) {
        num = std::max(num, std::fabs(a.values[i] - b.values[i]));
        den = std::max(den, std::fabs(b.values[i]));
    }
    return den > 0 ? num / den : num;
}

}  // namespace

TEST_CASE("1D eigenvalues match the covariance formula") {
    auto s = eigenpairs(DomainKind::Periodic1D, 7.0, 2.5, 10);
    // j = 1: tau^(2a-1) (4 pi^2 + tau^2)^(-a)
    double expected = std::pow(7.0, 4.0) * std::pow(4 * M_PI * M_PI + 49.0, -2.5);
    CHECK(s.lambda[0] == doctest::Approx(expected).epsilon(1e-14));
    CHECK(s.lambda[0] == doctest::Approx(0.0326).epsilon(2e-3));
    // sin/cos pairs share eigenvalues, ordering sin first
    for (int j = 0; j + 1 < s.count(); j += 2) {
        CHECK(s.lambda[static_cast<size_t>(j)] == s.lambda[static_cast<size_t>(j) + 1]);
        CHECK(s.modes[static_cast<size_t>(j)].sine);
        CHECK(!s.modes[static_cast<size_t>(j) + 1].sine);
    }
    for (int j = 0; j + 1 < s.count(); ++j)
        CHECK(s.lambda[static_cast<size_t>(j)] >= s.lambda[static_cast<size_t>(j) + 1]);
}

TEST_CASE("2D eigenvalues match the covariance formula and ordering") {
    auto s = eigenpairs(DomainKind::Neumann2D, 3.0, 2.0, 12);
    // lexicographic tie-break: (0,1) before (1,0)
    CHECK(s.modes[0].k1 == 0);
    CHECK(s.modes[0].k2 == 1);
    CHECK(s.modes[1].k1 == 1);
    CHECK(s.modes[1].k2 == 0);
    double expected = 9.0 * std::pow(M_PI * M_PI + 9.0, -2.0);
    CHECK(s.lambda[1] == doctest::Approx(expected).epsilon(1e-14));
    CHECK(s.lambda[1] == doctest::Approx(0.025277).epsilon(1e-4));
    for (int j = 0; j + 1 < s.count(); ++j)
        CHECK(s.lambda[static_cast<size_t>(j)] >= s.lambda[static_cast<size_t>(j) + 1]);
}

TEST_CASE("eigenpairs rejects insufficient regularity") {
    CHECK_THROWS_AS((void)eigenpairs(DomainKind::Periodic1D, 1.0, 0.5, 4), ConfigError);
    CHECK_THROWS_AS((void)eigenpairs(DomainKind::Neumann2D, 1.0, 1.0, 4), ConfigError);
}

TEST_CASE("zero coefficients give the zero field") {
    auto s = eigenpairs(DomainKind::Periodic1D, 7.0, 2.5, 8);
    GridFunction g = sample_field(s, FeatureParam{std::vector<double>(8, 0.0)}, Grid{make_grid1d(32)});
    for (double v : g.values) CHECK(v == 0.0);
}

TEST_CASE("single active coefficient reproduces sqrt(lambda) phi pointwise") {
    auto s = eigenpairs(DomainKind::Periodic1D, 7.0, 2.5, 8);
    for (int l : {0, 1, 4}) {
        FeatureParam p{std::vector<double>(8, 0.0)};
        p.xi[static_cast<size_t>(l)] = 1.0;
        GridFunction g = sample_field(s, p, Grid{make_grid1d(64)});
        for (int i = 0; i < 64; ++i) {
            double x = i / 64.0;
            double expected = std::sqrt(s.lambda[static_cast<size_t>(l)]) *
                              mode_value_1d(s.modes[static_cast<size_t>(l)], x);
            CHECK(g.values[static_cast<size_t>(i)] == doctest::Approx(expected).epsilon(1e-12));
        }
    }
}

TEST_CASE("FFT synthesis matches direct summation, both domains") {
    auto s1 = eigenpairs(DomainKind::Periodic1D, 7.0, 2.5, 30);
    FeatureParam p1{draw_normals(5, 0, 30)};
    GridFunction fast1 = sample_field(s1, p1, Grid{make_grid1d(128)});
    CHECK(rel_diff(fast1, direct_sum(s1, p1, fast1.grid)) < 1e-10);

    auto s2 = eigenpairs(DomainKind::Neumann2D, 3.0, 2.0, 40);
    FeatureParam p2{draw_normals(6, 0, 40)};
    GridFunction fast2 = sample_field(s2, p2, Grid{make_grid2d(33)});
    CHECK(rel_diff(fast2, direct_sum(s2, p2, fast2.grid)) < 1e-10);
}

TEST_CASE("sampled fields have zero spatial mean") {
    auto s = eigenpairs(DomainKind::Periodic1D, 7.0, 2.5, 40);
    for (uint64_t i = 0; i < 5; ++i) {
        GridFunction g = sample_field(s, draw_feature_param(11, i, 40), Grid{make_grid1d(128)});
        CHECK(std::fabs(spatial_mean(g)) < 1e-12);
    }
    auto s2 = eigenpairs(DomainKind::Neumann2D, 3.0, 2.0, 30);
    for (uint64_t i = 0; i < 3; ++i) {
        GridFunction g = sample_field(s2, draw_feature_param(12, i, 30), Grid{make_grid2d(33)});
        CHECK(std::fabs(spatial_mean(g)) < 1e-12);
    }
}

TEST_CASE("features are grid-independent: fine-grid restriction matches coarse synthesis") {
    auto s = eigenpairs(DomainKind::Periodic1D, 7.0, 2.5, 30);
    FeatureParam p{draw_normals(21, 3, 30)};
    GridFunction fine = sample_field(s, p, Grid{make_grid1d(128)});
    GridFunction coarse = sample_field(s, p, Grid{make_grid1d(64)});
    GridFunction down = restrict_function(fine, 2);
    CHECK(rel_diff(down, coarse) < 1e-10);

    auto s2 = eigenpairs(DomainKind::Neumann2D, 3.0, 2.0, 60);
    FeatureParam p2{draw_normals(22, 3, 60)};
    GridFunction fine2 = sample_field(s2, p2, Grid{make_grid2d(65)});
    GridFunction coarse2 = sample_field(s2, p2, Grid{make_grid2d(33)});
    CHECK(rel_diff(restrict_function(fine2, 2), coarse2) < 1e-10);
}

TEST_CASE("too coarse grids are rejected") {
    auto s = eigenpairs(DomainKind::Periodic1D, 7.0, 2.5, 40);
    FeatureParam p{draw_normals(1, 0, 40)};
    CHECK_THROWS_AS((void)sample_field(s, p, Grid{make_grid1d(16)}), ConfigError);
}

TEST_CASE("pointwise variance and two-point covariance match the truncated kernel") {
    const int modes = 20;
    auto s = eigenpairs(DomainKind::Periodic1D, 7.0, 2.5, modes);
    Grid g{make_grid1d(32)};
    const int node_a = 5, node_b = 20;
    double xa = node_a / 32.0, xb = node_b / 32.0;

    double var_expected = 0.0, cov_expected = 0.0;
    for (int l = 0; l < modes; ++l) {
        double pa = mode_value_1d(s.modes[static_cast<size_t>(l)], xa);
        double pb = mode_value_1d(s.modes[static_cast<size_t>(l)], xb);
        var_expected += s.lambda[static_cast<size_t>(l)] * pa * pa;
        cov_expected += s.lambda[static_cast<size_t>(l)] * pa * pb;
    }

    const int draws = 10000;
    double var = 0.0, cov = 0.0;
    for (int i = 0; i < draws; ++i) {
        GridFunction f = sample_field(s, draw_feature_param(77, static_cast<uint64_t>(i), modes), g);
        double va = f.values[node_a], vb = f.values[node_b];
        var += va * va;
        cov += va * vb;
    }
    var /= draws;
    cov /= draws;
    CHECK(var == doctest::Approx(var_expected).epsilon(0.05));
    // absolute MC tolerance ~ 3 sqrt(var(XY)/draws)
    CHECK(std::fabs(cov - cov_expected) < 0.05 * var_expected);
}
