#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "fvrf/features.hpp"
#include "fvrf/io.hpp"

namespace fvrf {

using FeatureFamily = std::variant<FourierFamily, PcFamily>;
using FeatureSet = std::variant<FourierFeatureSet, PcFeatureSet>;

std::string family_name(const FeatureFamily& family);

// Gram matrix of the regularized normal equations,
//   A_lj = (1/m) sum_i <phi_l(a_i), phi_j(a_i)> + lambda delta_lj,
//   b_l = sum_i <phi_l(a_i), y_i>,
// all inner products in L2 via the grid quadrature.
struct NormalSystem {
    Eigen::MatrixXd a;
    Eigen::VectorXd b;
    double lambda = 0.0;
};

// Trained random feature model: m frozen parameter draws (stored as their KL
// coefficients, so the model can be evaluated on any sufficiently fine grid)
// plus the learned coefficient vector.
struct RfmModel {
    FeatureFamily family;
    std::vector<std::vector<double>> xi;  // m rows; pc rows stack the two draws
    Eigen::VectorXd alpha;
    double lambda = 0.0;
    double rcond = 1e-13;
    uint64_t seed = 0;
    nlohmann::json training;

    int m() const { return static_cast<int>(xi.size()); }
};

// Deterministic derivation of the feature-parameter master seed; m enters so
// sweeps over the feature count redraw their parameters.
uint64_t feature_master_seed(uint64_t seed, int m);

// i.i.d. KL coefficient rows for m features of the given family.
std::vector<std::vector<double>> draw_model_xi(const FeatureFamily& family, int m, uint64_t seed,
                                               int modes);

// Resolves theta_modes defaults against a grid (Nyquist cap).
int resolve_theta_modes(const FeatureFamily& family, const Grid& g);

FeatureSet make_feature_set(const FeatureFamily& family, const std::vector<std::vector<double>>& xi,
                            const Grid& g);

NormalSystem assemble_normal_system(const Dataset& train, const FeatureSet& features,
                                    double lambda, int threads);

// lambda > 0: Cholesky solve of the already-shifted system. lambda = 0:
// minimum-norm least squares through a truncated eigendecomposition with
// relative cutoff rcond * lambda_max.
Eigen::VectorXd solve_coefficients(const NormalSystem& system, double rcond = 1e-13);

// Minimum-norm solution of the lambda = 0 normal equations computed from the
// stacked weighted design matrix F (rows: sample x output node, cols:
// features): alpha = m * pinv(F) y. Algebraically identical to the
// pseudoinverse route through A = (1/m) F^T F and cheap when rank(F) is
// limited by the data rather than by m.
Eigen::VectorXd solve_minimum_norm_design(const Eigen::MatrixXd& design, const Eigen::VectorXd& y,
                                          double rcond = 1e-13);

RfmModel train_model(const Dataset& train, const FeatureFamily& family, int m, double lambda,
                     uint64_t seed, double rcond, int threads);

// Bound to one evaluation grid; the grid may differ from the training grid.
class Predictor {
public:
    Predictor(FeatureSet features, Eigen::VectorXd alpha);

    GridFunction predict(const GridFunction& a) const;
    // j-fold self-composition; requires matching input/output grids.
    GridFunction compose_predict(const GridFunction& a, int j) const;

    int m() const { return static_cast<int>(alpha_.size()); }
    const FeatureSet& features() const { return features_; }
    const Eigen::VectorXd& alpha() const { return alpha_; }

private:
    FeatureSet features_;
    Eigen::VectorXd alpha_;
};

Predictor make_predictor(const RfmModel& model, const Grid& g);

double expected_relative_test_error(const Predictor& p, const Dataset& test, int threads);

// Value of the regularized empirical risk
//   sum_i 1/2 ||y_i - F_m(a_i; alpha)||^2 + lambda/(2m) ||alpha||^2.
double rfm_objective(const Predictor& p, const Dataset& data, double lambda);

// Discretized empirical kernel (1/m) sum_j phi_j(a) phi_j(b)^T in the
// L2-weighted representation W^(1/2) phi (so plain transpose symmetry and
// positive semidefiniteness hold as matrices). Oracle use on small grids.
Eigen::MatrixXd empirical_kernel_matrix(const std::vector<std::vector<double>>& phi_a,
                                        const std::vector<std::vector<double>>& phi_b,
                                        const std::vector<double>& w);

// Dense representer-theorem solve over the empirical kernel: fits beta in
//   sum_l k(a_i, a_l) beta_l + lambda beta_i = y_i
// and predicts F(a) = sum_i k(a, a_i) beta_i. Independent of the normal
// equations path; restricted to n * K <= 2000.
class KernelRidgeOracle {
public:
    // phi_train[i] is the K x m matrix of feature values at sample i.
    static KernelRidgeOracle fit(const std::vector<Eigen::MatrixXd>& phi_train,
                                 const std::vector<Eigen::VectorXd>& y_train,
                                 const std::vector<double>& w, double lambda);

    Eigen::VectorXd predict(const Eigen::MatrixXd& phi_at_a) const;

private:
    std::vector<Eigen::MatrixXd> phi_weighted_;  // W^(1/2) Phi_i
    Eigen::VectorXd beta_weighted_;              // stacked W^(1/2) beta_i
    Eigen::VectorXd sqrt_w_;
    int m_ = 0;
};

void save_model(const RfmModel& model, const std::string& dir);
RfmModel load_model(const std::string& dir);

}  // namespace fvrf
