#include "fvrf/rfm.hpp"

#include <cmath>
#include <filesystem>

#include "fvrf/rng.hpp"

namespace fvrf {

std::string family_name(const FeatureFamily& family) {
    if (std::holds_alternative<FourierFamily>(family)) return "fourier-burgers";
    return "predictor-corrector-darcy";
}

uint64_t feature_master_seed(uint64_t seed, int m) {
    return RandomStream::mix(RandomStream::mix(seed + 0x9e3779b97f4a7c15ULL) ^
                             (static_cast<uint64_t>(m) + 0x100000001b3ULL));
}

int resolve_theta_modes(const FeatureFamily& family, const Grid& g) {
    if (const auto* ff = std::get_if<FourierFamily>(&family)) {
        if (ff->theta_modes > 0) return ff->theta_modes;
        return default_modes(DomainKind::Periodic1D, g);
    }
    const auto& pf = std::get<PcFamily>(family);
    if (pf.theta_modes > 0) return pf.theta_modes;
    return default_modes(DomainKind::Neumann2D, g);
}

std::vector<std::vector<double>> draw_model_xi(const FeatureFamily& family, int m, uint64_t seed,
                                               int modes) {
    require(m >= 1, "draw_model_xi: m must be >= 1");
    uint64_t master = feature_master_seed(seed, m);
    bool paired = std::holds_alternative<PcFamily>(family);
    std::vector<std::vector<double>> xi(static_cast<size_t>(m));
    for (int j = 0; j < m; ++j) {
        if (paired) {
            std::vector<double> row =
                draw_normals(master, 2 * static_cast<uint64_t>(j), modes);
            std::vector<double> second =
                draw_normals(master, 2 * static_cast<uint64_t>(j) + 1, modes);
            row.insert(row.end(), second.begin(), second.end());
            xi[static_cast<size_t>(j)] = std::move(row);
        } else {
            xi[static_cast<size_t>(j)] = draw_normals(master, static_cast<uint64_t>(j), modes);
        }
    }
    return xi;
}

FeatureSet make_feature_set(const FeatureFamily& family, const std::vector<std::vector<double>>& xi,
                            const Grid& g) {
    if (const auto* ff = std::get_if<FourierFamily>(&family)) {
        const auto* g1 = std::get_if<Grid1D>(&g);
        require(g1 != nullptr, "fourier family needs a 1D grid");
        FourierFamily fam = *ff;
        if (fam.theta_modes == 0 && !xi.empty()) fam.theta_modes = static_cast<int>(xi[0].size());
        return FourierFeatureSet(fam, xi, *g1);
    }
    const auto& pf = std::get<PcFamily>(family);
    const auto* g2 = std::get_if<Grid2D>(&g);
    require(g2 != nullptr, "predictor-corrector family needs a 2D grid");
    PcFamily fam = pf;
    if (fam.theta_modes == 0 && !xi.empty()) fam.theta_modes = static_cast<int>(xi[0].size()) / 2;
    return PcFeatureSet(fam, xi, *g2);
}

namespace {

int feature_count(const FeatureSet& fs) {
    return std::visit([](const auto& s) { return s.count(); }, fs);
}

Grid feature_grid(const FeatureSet& fs) {
    return std::visit([](const auto& s) { return Grid{s.grid()}; }, fs);
}

// Materializes all m features for one input as columns of a K x m matrix.
Eigen::MatrixXd feature_matrix(const FeatureSet& fs, const GridFunction& a, int threads) {
    int m = feature_count(fs);
    int k = static_cast<int>(a.values.size());
    Eigen::MatrixXd phi(k, m);
    std::visit(
        [&](const auto& s) {
            auto ctx = s.prepare(a);
            parallel_for(m, threads, [&](int j) {
                std::vector<double> col;
                s.eval(ctx, j, col);
                for (int i = 0; i < k; ++i) phi(i, j) = col[static_cast<size_t>(i)];
            });
        },
        fs);
    return phi;
}

}  // namespace

NormalSystem assemble_normal_system(const Dataset& train, const FeatureSet& features,
                                    double lambda, int threads) {
    require(lambda >= 0.0, "assemble_normal_system: lambda must be >= 0");
    require(same_grid(train.grid, feature_grid(features)),
            "assemble_normal_system: dataset grid does not match feature grid");
    int m = feature_count(features);
    int k = train.nodes();
    std::vector<double> w = quadrature_weights(train.grid);
    Eigen::VectorXd sqrt_w(k);
    for (int i = 0; i < k; ++i) sqrt_w(i) = std::sqrt(w[static_cast<size_t>(i)]);

    Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(m, m);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(m);
    // Samples are streamed one at a time; only the current K x m feature
    // block is ever materialized.
    for (int i = 0; i < train.n; ++i) {
        GridFunction a = train.input(i);
        Eigen::MatrixXd phi = feature_matrix(features, a, threads);
        phi.array().colwise() *= sqrt_w.array();
        gram.selfadjointView<Eigen::Lower>().rankUpdate(phi.transpose());
        Eigen::VectorXd y(k);
        for (int r = 0; r < k; ++r)
            y(r) = train.outputs[static_cast<size_t>(i) * k + r] * sqrt_w(r);
        b.noalias() += phi.transpose() * y;
    }
    gram = gram.selfadjointView<Eigen::Lower>();

    NormalSystem sys;
    sys.lambda = lambda;
    sys.a = gram / static_cast<double>(m);
    sys.a.diagonal().array() += lambda;
    sys.b = b;
    return sys;
}

Eigen::VectorXd solve_coefficients(const NormalSystem& system, double rcond) {
    require(system.a.rows() == system.a.cols() && system.a.rows() == system.b.size(),
            "solve_coefficients: malformed system");
    if (system.lambda > 0.0) {
        Eigen::LLT<Eigen::MatrixXd> llt(system.a);
        if (llt.info() != Eigen::Success)
            throw NumericalError(
                "solve_coefficients: Cholesky failed on shifted system; the matrix is "
                "numerically singular, use the lambda = 0 pseudoinverse path");
        return llt.solve(system.b);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(system.a);
    if (es.info() != Eigen::Success)
        throw NumericalError("solve_coefficients: eigendecomposition failed");
    const Eigen::VectorXd& lam = es.eigenvalues();
    double cutoff = rcond * std::max(lam.cwiseAbs().maxCoeff(), 0.0);
    Eigen::VectorXd proj = es.eigenvectors().transpose() * system.b;
    for (int i = 0; i < lam.size(); ++i)
        proj(i) = lam(i) > cutoff ? proj(i) / lam(i) : 0.0;
    return es.eigenvectors() * proj;
}

Eigen::VectorXd solve_minimum_norm_design(const Eigen::MatrixXd& design, const Eigen::VectorXd& y,
                                          double rcond) {
    require(design.rows() == y.size(), "solve_minimum_norm_design: shape mismatch");
    Eigen::BDCSVD<Eigen::MatrixXd> svd(design, Eigen::ComputeThinU | Eigen::ComputeThinV);
    // Matching the A-side eigenvalue cutoff rcond * sigma_max^2 means cutting
    // singular values at sqrt(rcond) * sigma_max.
    double cutoff = std::sqrt(rcond) * svd.singularValues().maxCoeff();
    Eigen::VectorXd inv_sigma = svd.singularValues();
    for (int i = 0; i < inv_sigma.size(); ++i)
        inv_sigma(i) = inv_sigma(i) > cutoff ? 1.0 / inv_sigma(i) : 0.0;
    Eigen::VectorXd alpha =
        svd.matrixV() * inv_sigma.asDiagonal() * (svd.matrixU().transpose() * y);
    return static_cast<double>(design.cols()) * alpha;
}

RfmModel train_model(const Dataset& train, const FeatureFamily& family, int m, double lambda,
                     uint64_t seed, double rcond, int threads) {
    int modes = resolve_theta_modes(family, train.grid);
    RfmModel model;
    model.family = family;
    model.xi = draw_model_xi(family, m, seed, modes);
    model.lambda = lambda;
    model.rcond = rcond;
    model.seed = seed;

    FeatureSet features = make_feature_set(family, model.xi, train.grid);
    NormalSystem sys = assemble_normal_system(train, features, lambda, threads);
    model.alpha = solve_coefficients(sys, rcond);

    nlohmann::json grid_json;
    if (const auto* g1 = std::get_if<Grid1D>(&train.grid))
        grid_json = {{"kind", "periodic-1d"}, {"k", g1->external_k()}};
    else
        grid_json = {{"kind", "boundary-2d"}, {"r", std::get<Grid2D>(train.grid).r}};
    std::string manifest_dump = train.manifest.dump();
    model.training = {{"n", train.n},
                      {"grid", grid_json},
                      {"theta_modes", modes},
                      {"dataset_digest", hex64(fnv1a64(manifest_dump.data(), manifest_dump.size()))}};
    return model;
}

Predictor::Predictor(FeatureSet features, Eigen::VectorXd alpha)
    : features_(std::move(features)), alpha_(std::move(alpha)) {
    require(feature_count(features_) == alpha_.size(),
            "predictor: alpha length does not match feature count");
}

GridFunction Predictor::predict(const GridFunction& a) const {
    GridFunction out{a.grid, std::vector<double>(a.values.size(), 0.0)};
    double inv_m = 1.0 / static_cast<double>(m());
    std::visit(
        [&](const auto& s) {
            auto ctx = s.prepare(a);
            std::vector<double> col;
            for (int j = 0; j < alpha_.size(); ++j) {
                s.eval(ctx, j, col);
                double wj = alpha_(j) * inv_m;
                for (size_t i = 0; i < col.size(); ++i) out.values[i] += wj * col[i];
            }
        },
        features_);
    return out;
}

GridFunction Predictor::compose_predict(const GridFunction& a, int j) const {
    require(j >= 1, "compose_predict: composition count must be >= 1");
    GridFunction u = predict(a);
    for (int step = 1; step < j; ++step) u = predict(u);
    return u;
}

Predictor make_predictor(const RfmModel& model, const Grid& g) {
    return Predictor(make_feature_set(model.family, model.xi, g), model.alpha);
}

double expected_relative_test_error(const Predictor& p, const Dataset& test, int threads) {
    require(test.n >= 1, "expected_relative_test_error: empty dataset");
    std::vector<double> errs(static_cast<size_t>(test.n));
    parallel_for(test.n, threads, [&](int i) {
        errs[static_cast<size_t>(i)] = relative_l2_error(test.output(i), p.predict(test.input(i)));
    });
    double s = 0.0;
    for (double e : errs) s += e;
    return s / test.n;
}

double rfm_objective(const Predictor& p, const Dataset& data, double lambda) {
    double risk = 0.0;
    for (int i = 0; i < data.n; ++i) {
        GridFunction diff = data.output(i);
        GridFunction pred = p.predict(data.input(i));
        for (size_t k = 0; k < diff.values.size(); ++k) diff.values[k] -= pred.values[k];
        double nrm = norm_l2(diff);
        risk += 0.5 * nrm * nrm;
    }
    return risk + 0.5 * lambda / p.m() * p.alpha().squaredNorm();
}

Eigen::MatrixXd empirical_kernel_matrix(const std::vector<std::vector<double>>& phi_a,
                                        const std::vector<std::vector<double>>& phi_b,
                                        const std::vector<double>& w) {
    require(!phi_a.empty() && phi_a.size() == phi_b.size(),
            "empirical_kernel_matrix: feature lists must be non-empty and equal length");
    int k = static_cast<int>(w.size());
    require(k <= 4096, "empirical_kernel_matrix: oracle restricted to small grids");
    int m = static_cast<int>(phi_a.size());
    Eigen::VectorXd sqrt_w(k);
    for (int i = 0; i < k; ++i) sqrt_w(i) = std::sqrt(w[static_cast<size_t>(i)]);
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(k, k);
    for (int j = 0; j < m; ++j) {
        require(static_cast<int>(phi_a[static_cast<size_t>(j)].size()) == k &&
                    static_cast<int>(phi_b[static_cast<size_t>(j)].size()) == k,
                "empirical_kernel_matrix: field length mismatch");
        Eigen::VectorXd u(k), v(k);
        for (int i = 0; i < k; ++i) {
            u(i) = phi_a[static_cast<size_t>(j)][static_cast<size_t>(i)] * sqrt_w(i);
            v(i) = phi_b[static_cast<size_t>(j)][static_cast<size_t>(i)] * sqrt_w(i);
        }
        out.noalias() += u * v.transpose();
    }
    return out / static_cast<double>(m);
}

KernelRidgeOracle KernelRidgeOracle::fit(const std::vector<Eigen::MatrixXd>& phi_train,
                                         const std::vector<Eigen::VectorXd>& y_train,
                                         const std::vector<double>& w, double lambda) {
    int n = static_cast<int>(phi_train.size());
    require(n >= 1 && y_train.size() == phi_train.size(), "oracle: bad training data");
    int k = static_cast<int>(w.size());
    require(static_cast<long long>(n) * k <= 2000, "oracle: instance too large for dense solve");

    KernelRidgeOracle o;
    o.m_ = static_cast<int>(phi_train[0].cols());
    o.sqrt_w_.resize(k);
    for (int i = 0; i < k; ++i) o.sqrt_w_(i) = std::sqrt(w[static_cast<size_t>(i)]);

    o.phi_weighted_.reserve(static_cast<size_t>(n));
    for (const auto& phi : phi_train) {
        require(phi.rows() == k && phi.cols() == o.m_, "oracle: feature matrix shape mismatch");
        o.phi_weighted_.push_back(o.sqrt_w_.asDiagonal() * phi);
    }

    // Block Gram of the weighted empirical kernel plus the ridge shift.
    Eigen::MatrixXd big = Eigen::MatrixXd::Zero(n * k, n * k);
    for (int i = 0; i < n; ++i)
        for (int l = 0; l < n; ++l)
            big.block(i * k, l * k, k, k) =
                o.phi_weighted_[static_cast<size_t>(i)] *
                o.phi_weighted_[static_cast<size_t>(l)].transpose() / o.m_;
    big.diagonal().array() += lambda;

    Eigen::VectorXd rhs(n * k);
    for (int i = 0; i < n; ++i)
        rhs.segment(i * k, k) = o.sqrt_w_.asDiagonal() * y_train[static_cast<size_t>(i)];

    Eigen::LDLT<Eigen::MatrixXd> ldlt(big);
    if (ldlt.info() != Eigen::Success) throw NumericalError("oracle: block solve failed");
    o.beta_weighted_ = ldlt.solve(rhs);
    return o;
}

Eigen::VectorXd KernelRidgeOracle::predict(const Eigen::MatrixXd& phi_at_a) const {
    int k = static_cast<int>(sqrt_w_.size());
    require(phi_at_a.rows() == k && phi_at_a.cols() == m_, "oracle: feature matrix shape mismatch");
    Eigen::MatrixXd phi_w = sqrt_w_.asDiagonal() * phi_at_a;
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(k);
    int n = static_cast<int>(phi_weighted_.size());
    for (int i = 0; i < n; ++i)
        acc.noalias() += phi_w * (phi_weighted_[static_cast<size_t>(i)].transpose() *
                                  beta_weighted_.segment(i * k, k)) /
                         m_;
    return sqrt_w_.cwiseInverse().asDiagonal() * acc;
}

void save_model(const RfmModel& model, const std::string& dir) {
    std::filesystem::create_directories(dir);
    int m = model.m();
    require(m >= 1, "save_model: empty model");

    nlohmann::json hyper;
    std::vector<uint64_t> xi_dims;
    int row_len = static_cast<int>(model.xi[0].size());
    if (const auto* ff = std::get_if<FourierFamily>(&model.family)) {
        hyper = {{"tau_prime", ff->tau_prime}, {"alpha_prime", ff->alpha_prime},
                 {"delta", ff->delta},         {"beta", ff->beta},
                 {"theta_modes", row_len}};
        xi_dims = {static_cast<uint64_t>(m), static_cast<uint64_t>(row_len)};
    } else {
        const auto& pf = std::get<PcFamily>(model.family);
        hyper = {{"tau_prime", pf.tau_prime},
                 {"alpha_prime", pf.alpha_prime},
                 {"s_plus", pf.s_plus},
                 {"s_minus", pf.s_minus},
                 {"sigma_delta", pf.sigma_delta},
                 {"forcing", pf.forcing},
                 {"smoothing", {{"eta", pf.smoothing.eta},
                                {"dt", pf.smoothing.dt},
                                {"steps", pf.smoothing.steps}}},
                 {"theta_modes", row_len / 2}};
        xi_dims = {static_cast<uint64_t>(m), 2, static_cast<uint64_t>(row_len / 2)};
    }

    std::vector<double> alpha(model.alpha.data(), model.alpha.data() + m);
    write_tensor(dir + "/alpha.bin", {static_cast<uint64_t>(m)}, alpha);

    std::vector<double> xi_flat;
    xi_flat.reserve(static_cast<size_t>(m) * row_len);
    for (const auto& row : model.xi) {
        require(static_cast<int>(row.size()) == row_len, "save_model: ragged xi rows");
        xi_flat.insert(xi_flat.end(), row.begin(), row.end());
    }
    write_tensor(dir + "/xi.bin", xi_dims, xi_flat);

    nlohmann::json j = {{"schema", "fvrf-model-v1"},
                        {"family", family_name(model.family)},
                        {"hyperparameters", hyper},
                        {"m", m},
                        {"lambda", model.lambda},
                        {"rcond", model.rcond},
                        {"seed", model.seed},
                        {"training", model.training},
                        {"digests",
                         {{"alpha.bin", hex64(fnv1a64_file(dir + "/alpha.bin"))},
                          {"xi.bin", hex64(fnv1a64_file(dir + "/xi.bin"))}}}};
    write_json(dir + "/model.json", j);
}

RfmModel load_model(const std::string& dir) {
    nlohmann::json j = read_json(dir + "/model.json");
    require(j.value("schema", "") == "fvrf-model-v1", "load_model: unknown schema");
    if (j.contains("digests")) {
        if (j["digests"].value("alpha.bin", "") != hex64(fnv1a64_file(dir + "/alpha.bin")) ||
            j["digests"].value("xi.bin", "") != hex64(fnv1a64_file(dir + "/xi.bin")))
            throw ConfigError("load_model: digest mismatch in " + dir);
    }

    RfmModel model;
    const auto& hyper = j["hyperparameters"];
    std::string fam = j.value("family", "");
    if (fam == "fourier-burgers") {
        FourierFamily f;
        f.tau_prime = hyper["tau_prime"];
        f.alpha_prime = hyper["alpha_prime"];
        f.delta = hyper["delta"];
        f.beta = hyper["beta"];
        f.theta_modes = hyper["theta_modes"];
        model.family = f;
    } else if (fam == "predictor-corrector-darcy") {
        PcFamily f;
        f.tau_prime = hyper["tau_prime"];
        f.alpha_prime = hyper["alpha_prime"];
        f.s_plus = hyper["s_plus"];
        f.s_minus = hyper["s_minus"];
        f.sigma_delta = hyper["sigma_delta"];
        f.forcing = hyper["forcing"];
        f.smoothing.eta = hyper["smoothing"]["eta"];
        f.smoothing.dt = hyper["smoothing"]["dt"];
        f.smoothing.steps = hyper["smoothing"]["steps"];
        f.theta_modes = hyper["theta_modes"];
        model.family = f;
    } else {
        throw ConfigError("load_model: unknown family '" + fam + "'");
    }

    TensorFile alpha = read_tensor(dir + "/alpha.bin");
    require(alpha.dims.size() == 1, "load_model: alpha.bin must be rank 1");
    int m = static_cast<int>(alpha.dims[0]);
    model.alpha = Eigen::Map<Eigen::VectorXd>(alpha.data.data(), m);

    TensorFile xi = read_tensor(dir + "/xi.bin");
    require(static_cast<int>(xi.dims[0]) == m, "load_model: xi.bin leading dim mismatch");
    size_t row_len = xi.data.size() / static_cast<size_t>(m);
    model.xi.resize(static_cast<size_t>(m));
    for (int i = 0; i < m; ++i)
        model.xi[static_cast<size_t>(i)] =
            std::vector<double>(xi.data.begin() + i * row_len, xi.data.begin() + (i + 1) * row_len);

    model.lambda = j["lambda"];
    model.rcond = j["rcond"];
    model.seed = j["seed"];
    model.training = j.value("training", nlohmann::json::object());
    return model;
}

}  // namespace fvrf
