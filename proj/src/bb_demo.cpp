#include "fvrf/bb_demo.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "fvrf/common.hpp"
#include "fvrf/rfm.hpp"
#include "fvrf/rng.hpp"

namespace fvrf {

double bb_demo_target(double x) {
    double kink = std::max(0.0, x - 0.6);
    return x - x * x + 0.5 * kink * (x - 0.6);
}

namespace {

// Basis values c_l(x) = sqrt(2)/(l pi) sin(l pi x) as a points x modes matrix.
Eigen::MatrixXd bridge_basis(const std::vector<double>& x, int modes) {
    Eigen::MatrixXd c(static_cast<int>(x.size()), modes);
    for (int i = 0; i < c.rows(); ++i)
        for (int l = 1; l <= modes; ++l)
            c(i, l - 1) = M_SQRT2 / (l * M_PI) * std::sin(l * M_PI * x[static_cast<size_t>(i)]);
    return c;
}

double bridge_kernel(double x, double y) { return std::min(x, y) - x * y; }

}  // namespace

BbDemoResult run_bb_demo(const BbDemoConfig& cfg) {
    require(cfg.n >= 2, "bb demo: need at least two training points");
    require(cfg.modes >= 1 && cfg.test_points >= 2, "bb demo: bad configuration");

    BbDemoResult res;
    res.m_values = cfg.m_values;

    RandomStream xs(cfg.seed, 0xb0b);
    res.train_x.resize(static_cast<size_t>(cfg.n));
    res.train_y.resize(static_cast<size_t>(cfg.n));
    for (int i = 0; i < cfg.n; ++i) {
        res.train_x[static_cast<size_t>(i)] = xs.next_uniform();
        res.train_y[static_cast<size_t>(i)] = bb_demo_target(res.train_x[static_cast<size_t>(i)]);
    }

    res.x.resize(static_cast<size_t>(cfg.test_points));
    for (int i = 0; i < cfg.test_points; ++i)
        res.x[static_cast<size_t>(i)] = static_cast<double>(i) / (cfg.test_points - 1);
    res.truth.resize(res.x.size());
    for (size_t i = 0; i < res.x.size(); ++i) res.truth[i] = bb_demo_target(res.x[i]);

    // Exact-kernel interpolant (lambda = 0): K beta = y.
    Eigen::MatrixXd kmat(cfg.n, cfg.n);
    for (int i = 0; i < cfg.n; ++i)
        for (int j = 0; j < cfg.n; ++j)
            kmat(i, j) = bridge_kernel(res.train_x[static_cast<size_t>(i)],
                                       res.train_x[static_cast<size_t>(j)]);
    Eigen::Map<const Eigen::VectorXd> y(res.train_y.data(), cfg.n);
    Eigen::VectorXd beta = kmat.ldlt().solve(y);

    res.oracle.assign(res.x.size(), 0.0);
    for (size_t t = 0; t < res.x.size(); ++t)
        for (int i = 0; i < cfg.n; ++i)
            res.oracle[t] += beta(i) * bridge_kernel(res.x[t], res.train_x[static_cast<size_t>(i)]);

    Eigen::MatrixXd basis_train = bridge_basis(res.train_x, cfg.modes);
    Eigen::MatrixXd basis_test = bridge_basis(res.x, cfg.modes);

    for (int m : cfg.m_values) {
        uint64_t master = feature_master_seed(cfg.seed, m);
        Eigen::MatrixXd theta(cfg.modes, m);
        for (int j = 0; j < m; ++j) {
            std::vector<double> draw = draw_normals(master, static_cast<uint64_t>(j), cfg.modes);
            for (int l = 0; l < cfg.modes; ++l) theta(l, j) = draw[static_cast<size_t>(l)];
        }
        Eigen::MatrixXd design = basis_train * theta;  // n x m feature values
        Eigen::VectorXd alpha = solve_minimum_norm_design(design, y);
        Eigen::VectorXd pred = (basis_test * theta) * alpha / static_cast<double>(m);

        std::vector<double> row(pred.data(), pred.data() + pred.size());
        double gap = 0.0;
        for (size_t t = 0; t < row.size(); ++t)
            gap = std::max(gap, std::fabs(row[t] - res.oracle[t]));
        res.preds.push_back(std::move(row));
        res.sup_gaps.push_back(gap);
    }
    return res;
}

}  // namespace fvrf
