#pragma once

#include <cstdint>
#include <vector>

namespace fvrf {

// Scalar-input, scalar-output instantiation of the random feature model with
// Brownian bridge features, compared against the exact-kernel interpolant
// (covariance min(x,x') - x x') on the same training points.
struct BbDemoConfig {
    int n = 32;
    std::vector<int> m_values = {50, 500, 5000};
    int modes = 512;
    uint64_t seed = 0;
    int test_points = 513;
};

struct BbDemoResult {
    std::vector<int> m_values;
    std::vector<double> x;       // test grid, endpoints included
    std::vector<double> truth;   // target at the test grid
    std::vector<double> oracle;  // kernel interpolant at the test grid
    std::vector<std::vector<double>> preds;  // one row per m
    std::vector<double> sup_gaps;            // max |pred - oracle| per m
    std::vector<double> train_x, train_y;
};

double bb_demo_target(double x);

BbDemoResult run_bb_demo(const BbDemoConfig& cfg);

}  // namespace fvrf
