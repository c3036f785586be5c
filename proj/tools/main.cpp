// Command line driver: data generation, training, evaluation and the
// experiment protocols (resolution transfer, semigroup composition, the
// Brownian bridge demo). All outputs are reproducible from the recorded flags.

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "fvrf/bb_demo.hpp"
#include "fvrf/burgers.hpp"
#include "fvrf/darcy.hpp"
#include "fvrf/rfm.hpp"

using nlohmann::json;

namespace {

struct Timer {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
};

std::string csv_num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

json file_entry(const std::string& path) {
    return json{{"path", path}, {"digest", fvrf::hex64(fvrf::fnv1a64_file(path))}};
}

void write_run_manifest(const std::string& dir, const std::string& command, const json& config,
                        const json& inputs, const json& outputs, double seconds) {
    json run = {{"command", command}, {"config", config},     {"inputs", inputs},
                {"outputs", outputs}, {"timing_s", seconds}};
    fvrf::write_json(dir + "/run.json", run);
}

fvrf::Dataset load_restricted(const std::string& dir, int factor) {
    fvrf::Dataset ds = fvrf::load_dataset(dir);
    return fvrf::restrict_dataset(ds, factor);
}

int resolution_of(const fvrf::Grid& g) {
    if (const auto* g1 = std::get_if<fvrf::Grid1D>(&g)) return g1->external_k();
    return std::get<fvrf::Grid2D>(g).r;
}

// Shared training flags; defaults that depend on the family are resolved in
// build_family().
struct TrainFlags {
    std::string features = "fourier";
    int m = 128;
    double lambda = std::nan("");
    uint64_t seed = 0;
    double rcond = 1e-13;
    int theta_modes = 0;
    double tau_prime = std::nan("");
    double alpha_prime = 2.0;
    double delta = 0.0025;
    double beta = 4.0;
    double s_plus = 1.0 / 12.0;
    double s_minus = -1.0 / 3.0;
    double sigma_delta = 0.15;
    double pc_forcing = 1.0;

    fvrf::FeatureFamily build_family() const {
        if (features == "fourier") {
            fvrf::FourierFamily f;
            f.tau_prime = std::isnan(tau_prime) ? 5.0 : tau_prime;
            f.alpha_prime = alpha_prime;
            f.delta = delta;
            f.beta = beta;
            f.theta_modes = theta_modes;
            return f;
        }
        if (features == "pc") {
            fvrf::PcFamily f;
            f.tau_prime = std::isnan(tau_prime) ? 7.5 : tau_prime;
            f.alpha_prime = alpha_prime;
            f.s_plus = s_plus;
            f.s_minus = s_minus;
            f.sigma_delta = sigma_delta;
            f.forcing = pc_forcing;
            f.theta_modes = theta_modes;
            return f;
        }
        throw fvrf::ConfigError("unknown feature family '" + features + "' (fourier|pc)");
    }

    double resolved_lambda() const {
        if (!std::isnan(lambda)) return lambda;
        return features == "pc" ? 1e-8 : 0.0;
    }

    void add_to(CLI::App* cmd) {
        cmd->add_option("--features", features, "feature family: fourier|pc");
        cmd->add_option("--m", m, "number of random features");
        cmd->add_option("--lambda", lambda, "ridge parameter (default: 0 fourier, 1e-8 pc)");
        cmd->add_option("--seed", seed, "feature parameter seed");
        cmd->add_option("--rcond", rcond, "pseudoinverse relative cutoff");
        cmd->add_option("--theta-modes", theta_modes, "KL modes per draw (0 = grid default)");
        cmd->add_option("--tau-prime", tau_prime, "feature inverse length scale");
        cmd->add_option("--alpha-prime", alpha_prime, "feature regularity");
        cmd->add_option("--delta", delta, "filter length scale (fourier)");
        cmd->add_option("--beta", beta, "filter decay exponent (fourier)");
        cmd->add_option("--s-plus", s_plus, "sigmoid upper level (pc)");
        cmd->add_option("--s-minus", s_minus, "sigmoid lower level (pc)");
        cmd->add_option("--sigma-delta", sigma_delta, "sigmoid steepness (pc)");
        cmd->add_option("--pc-forcing", pc_forcing, "source term used inside pc features");
    }

    json to_json() const {
        return {{"features", features},   {"m", m},
                {"lambda", resolved_lambda()}, {"seed", seed},
                {"rcond", rcond},         {"theta_modes", theta_modes},
                {"tau_prime", std::isnan(tau_prime) ? (features == "pc" ? 7.5 : 5.0) : tau_prime},
                {"alpha_prime", alpha_prime}, {"delta", delta},
                {"beta", beta},           {"s_plus", s_plus},
                {"s_minus", s_minus},     {"sigma_delta", sigma_delta},
                {"pc_forcing", pc_forcing}};
    }
};

int cmd_gen(const std::string& pde, int n, int k, int r, double t_final, double viscosity,
            double dt, bool no_dealias, double tau, double alpha, int modes, double aplus,
            double aminus, double forcing, double cg_tol, uint64_t seed, int restrict_factor,
            const std::string& out, int threads) {
    Timer timer;
    fvrf::Dataset ds;
    if (pde == "burgers") {
        fvrf::Grid1D grid = fvrf::make_grid1d(k - 1);
        fvrf::BurgersConfig cfg{viscosity, t_final, dt, !no_dealias};
        fvrf::BurgersPrior prior{tau, alpha, modes};
        ds = fvrf::gen_burgers_dataset(n, prior, cfg, grid, seed, threads);
    } else if (pde == "darcy") {
        fvrf::Grid2D grid = fvrf::make_grid2d(r);
        fvrf::LevelSetPrior prior;
        prior.a_plus = aplus;
        prior.a_minus = aminus;
        prior.tau = tau;
        prior.alpha_reg = alpha;
        prior.modes = modes;
        fvrf::DarcyConfig cfg;
        cfg.forcing = forcing;
        cfg.cg_tolerance = cg_tol;
        ds = fvrf::gen_darcy_dataset(n, prior, cfg, grid, seed, threads);
    } else {
        throw fvrf::ConfigError("unknown pde '" + pde + "' (burgers|darcy)");
    }

    if (restrict_factor > 1) {
        ds.manifest["generated_resolution"] = resolution_of(ds.grid);
        ds = fvrf::restrict_dataset(ds, restrict_factor);
        if (std::holds_alternative<fvrf::Grid1D>(ds.grid))
            ds.manifest["k"] = resolution_of(ds.grid);
        else
            ds.manifest["r"] = resolution_of(ds.grid);
    }
    fvrf::save_dataset(ds, out);

    json outputs = json::array(
        {file_entry(out + "/inputs.bin"), file_entry(out + "/outputs.bin")});
    write_run_manifest(out, "gen " + pde, ds.manifest, json::array(), outputs, timer.seconds());
    std::printf("wrote %d %s pairs at resolution %d to %s (%.1fs)\n", ds.n, pde.c_str(),
                resolution_of(ds.grid), out.c_str(), timer.seconds());
    return 0;
}

int cmd_train(const std::string& data, const TrainFlags& flags, int restrict_factor,
              const std::string& model_out, int threads) {
    Timer timer;
    fvrf::Dataset train = load_restricted(data, restrict_factor);
    fvrf::FeatureFamily family = flags.build_family();
    fvrf::RfmModel model = fvrf::train_model(train, family, flags.m, flags.resolved_lambda(),
                                             flags.seed, flags.rcond, threads);
    fvrf::save_model(model, model_out);

    json config = flags.to_json();
    config["data"] = data;
    config["restrict"] = restrict_factor;
    json inputs = json::array({file_entry(data + "/inputs.bin"), file_entry(data + "/outputs.bin")});
    json outputs = json::array({file_entry(model_out + "/model.json"),
                                file_entry(model_out + "/alpha.bin"),
                                file_entry(model_out + "/xi.bin")});
    write_run_manifest(model_out, "train", config, inputs, outputs, timer.seconds());
    std::printf("trained %s model: m=%d lambda=%g on n=%d at resolution %d (%.1fs)\n",
                flags.features.c_str(), flags.m, flags.resolved_lambda(), train.n,
                resolution_of(train.grid), timer.seconds());
    return 0;
}

int cmd_eval(const std::string& model_dir, const std::string& data, int restrict_factor,
             const std::string& out, int threads) {
    Timer timer;
    fvrf::RfmModel model = fvrf::load_model(model_dir);
    fvrf::Dataset test = load_restricted(data, restrict_factor);
    fvrf::Predictor predictor = fvrf::make_predictor(model, test.grid);

    std::vector<double> errs(static_cast<size_t>(test.n));
    fvrf::parallel_for(test.n, threads, [&](int i) {
        errs[static_cast<size_t>(i)] =
            fvrf::relative_l2_error(test.output(i), predictor.predict(test.input(i)));
    });
    double mean = 0.0;
    for (double e : errs) mean += e;
    mean /= test.n;

    json report = {{"error", mean},
                   {"n_prime", test.n},
                   {"m", model.m()},
                   {"resolution", resolution_of(test.grid)},
                   {"lambda", model.lambda},
                   {"per_sample_errors", errs},
                   {"timing_s", timer.seconds()}};
    fvrf::write_json(out, report);
    std::printf("eval: error=%.6f over n'=%d at resolution %d (%.1fs)\n", mean, test.n,
                resolution_of(test.grid), timer.seconds());
    return 0;
}

int cmd_transfer(const std::string& model_dir, const std::vector<std::string>& data_dirs,
                 bool coeff_convergence, const TrainFlags& flags, const std::string& out,
                 int threads) {
    Timer timer;
    std::FILE* f = std::fopen(out.c_str(), "w");
    if (!f) throw fvrf::ConfigError("cannot open for writing: " + out);

    if (!coeff_convergence) {
        fvrf::RfmModel model = fvrf::load_model(model_dir);
        std::fprintf(f, "resolution,error\n");
        for (const auto& dir : data_dirs) {
            fvrf::Dataset test = fvrf::load_dataset(dir);
            fvrf::Predictor predictor = fvrf::make_predictor(model, test.grid);
            double err = fvrf::expected_relative_test_error(predictor, test, threads);
            std::fprintf(f, "%d,%s\n", resolution_of(test.grid), csv_num(err).c_str());
        }
    } else {
        // Per-resolution retraining with shared feature draws; distance of
        // each learned coefficient vector to the finest-resolution one.
        std::vector<fvrf::RfmModel> models;
        std::vector<int> resolutions;
        for (const auto& dir : data_dirs) {
            fvrf::Dataset train = fvrf::load_dataset(dir);
            models.push_back(fvrf::train_model(train, flags.build_family(), flags.m,
                                               flags.resolved_lambda(), flags.seed, flags.rcond,
                                               threads));
            resolutions.push_back(resolution_of(train.grid));
        }
        int ref = 0;
        for (size_t i = 1; i < resolutions.size(); ++i)
            if (resolutions[i] > resolutions[static_cast<size_t>(ref)]) ref = static_cast<int>(i);
        const Eigen::VectorXd& alpha_ref = models[static_cast<size_t>(ref)].alpha;
        std::fprintf(f, "resolution,coeff_dist\n");
        for (size_t i = 0; i < models.size(); ++i) {
            double dist = (models[i].alpha - alpha_ref).norm() / alpha_ref.norm();
            std::fprintf(f, "%d,%s\n", resolutions[i], csv_num(dist).c_str());
        }
    }
    std::fclose(f);

    json config = {{"model", model_dir}, {"data", data_dirs},
                   {"coeff_convergence", coeff_convergence}};
    if (coeff_convergence) config["train"] = flags.to_json();
    fvrf::write_json(out + ".run.json",
                     {{"command", "transfer"},
                      {"config", config},
                      {"outputs", json::array({file_entry(out)})},
                      {"timing_s", timer.seconds()}});
    std::printf("transfer table written to %s (%.1fs)\n", out.c_str(), timer.seconds());
    return 0;
}

int cmd_semigroup(const std::string& model_dir, const std::vector<std::string>& data_dirs,
                  const std::string& out, int threads) {
    Timer timer;
    fvrf::RfmModel model = fvrf::load_model(model_dir);
    std::FILE* f = std::fopen(out.c_str(), "w");
    if (!f) throw fvrf::ConfigError("cannot open for writing: " + out);
    std::fprintf(f, "j,error\n");
    for (size_t idx = 0; idx < data_dirs.size(); ++idx) {
        int j = static_cast<int>(idx) + 1;
        fvrf::Dataset test = fvrf::load_dataset(data_dirs[idx]);
        fvrf::Predictor predictor = fvrf::make_predictor(model, test.grid);
        std::vector<double> errs(static_cast<size_t>(test.n));
        fvrf::parallel_for(test.n, threads, [&](int i) {
            errs[static_cast<size_t>(i)] = fvrf::relative_l2_error(
                test.output(i), predictor.compose_predict(test.input(i), j));
        });
        double mean = 0.0;
        for (double e : errs) mean += e;
        mean /= test.n;
        std::fprintf(f, "%d,%s\n", j, csv_num(mean).c_str());
    }
    std::fclose(f);
    fvrf::write_json(out + ".run.json",
                     {{"command", "semigroup"},
                      {"config", {{"model", model_dir}, {"data", data_dirs}}},
                      {"outputs", json::array({file_entry(out)})},
                      {"timing_s", timer.seconds()}});
    std::printf("semigroup table written to %s (%.1fs)\n", out.c_str(), timer.seconds());
    return 0;
}

int cmd_bb_demo(int n, std::vector<int> m_values, int modes, uint64_t seed, int points,
                const std::string& out) {
    Timer timer;
    if (m_values.empty()) m_values = {50, 500, 5000};
    fvrf::BbDemoConfig cfg{n, m_values, modes, seed, points};
    fvrf::BbDemoResult res = fvrf::run_bb_demo(cfg);

    std::filesystem::create_directories(out);
    std::string curve_path = out + "/bb_demo.csv";
    std::FILE* f = std::fopen(curve_path.c_str(), "w");
    if (!f) throw fvrf::ConfigError("cannot open for writing: " + curve_path);
    std::fprintf(f, "x,truth");
    for (int m : res.m_values) std::fprintf(f, ",pred_m%d", m);
    std::fprintf(f, ",oracle\n");
    for (size_t t = 0; t < res.x.size(); ++t) {
        std::fprintf(f, "%s,%s", csv_num(res.x[t]).c_str(), csv_num(res.truth[t]).c_str());
        for (const auto& pred : res.preds) std::fprintf(f, ",%s", csv_num(pred[t]).c_str());
        std::fprintf(f, ",%s\n", csv_num(res.oracle[t]).c_str());
    }
    std::fclose(f);

    std::string gap_path = out + "/bb_gaps.csv";
    f = std::fopen(gap_path.c_str(), "w");
    if (!f) throw fvrf::ConfigError("cannot open for writing: " + gap_path);
    std::fprintf(f, "m,sup_gap\n");
    for (size_t i = 0; i < res.m_values.size(); ++i)
        std::fprintf(f, "%d,%s\n", res.m_values[i], csv_num(res.sup_gaps[i]).c_str());
    std::fclose(f);

    json config = {{"n", n}, {"m", m_values}, {"modes", modes}, {"seed", seed}, {"points", points}};
    write_run_manifest(out, "bb-demo", config,
                       json::array(), json::array({file_entry(curve_path), file_entry(gap_path)}),
                       timer.seconds());
    std::printf("bb-demo written to %s;", out.c_str());
    for (size_t i = 0; i < res.m_values.size(); ++i)
        std::printf(" gap(m=%d)=%.4g", res.m_values[i], res.sup_gaps[i]);
    std::printf(" (%.1fs)\n", timer.seconds());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Function-valued random features for PDE operator learning"};
    app.require_subcommand(1);

    int threads = fvrf::default_threads();
    app.add_option("--threads", threads, "worker thread cap (env FVRF_THREADS)")
        ->envname("FVRF_THREADS");

    // gen
    auto* gen = app.add_subcommand("gen", "generate a PDE dataset");
    std::string gen_pde, gen_out;
    int gen_n = 8, gen_k = 1025, gen_r = 257, gen_modes = 0, gen_restrict = 1;
    double gen_t = 1.0, gen_visc = 1e-2, gen_dt = 0.0, gen_tau = std::nan(""), gen_alpha = std::nan("");
    double gen_aplus = 12.0, gen_aminus = 3.0, gen_forcing = 1.0, gen_cgtol = 1e-10;
    uint64_t gen_seed = 1;
    bool gen_no_dealias = false;
    gen->add_option("pde", gen_pde, "burgers|darcy")->required();
    gen->add_option("--n", gen_n, "number of samples");
    gen->add_option("--k", gen_k, "1D mesh size K (power of two plus one)");
    gen->add_option("--r", gen_r, "2D nodes per side (power of two plus one)");
    gen->add_option("--t", gen_t, "final time (burgers)");
    gen->add_option("--viscosity", gen_visc, "viscosity (burgers)");
    gen->add_option("--dt", gen_dt, "time step (0 = scaled default)");
    gen->add_flag("--no-dealias", gen_no_dealias, "disable the 2/3 rule (burgers)");
    gen->add_option("--tau", gen_tau, "prior inverse length scale (default 7 / 3)");
    gen->add_option("--alpha", gen_alpha, "prior regularity (default 2.5 / 2)");
    gen->add_option("--modes", gen_modes, "prior KL modes (0 = grid default)");
    gen->add_option("--aplus", gen_aplus, "level-set upper value (darcy)");
    gen->add_option("--aminus", gen_aminus, "level-set lower value (darcy)");
    gen->add_option("--forcing", gen_forcing, "constant source term (darcy)");
    gen->add_option("--cg-tol", gen_cgtol, "CG relative residual tolerance (darcy)");
    gen->add_option("--seed", gen_seed, "master seed");
    gen->add_option("--restrict", gen_restrict, "write the dataset restricted by this factor");
    gen->add_option("--out", gen_out, "output directory")->required();

    // train
    auto* train = app.add_subcommand("train", "train a random feature model");
    std::string train_data, train_model_out;
    int train_restrict = 1;
    TrainFlags train_flags;
    train->add_option("--data", train_data, "training dataset directory")->required();
    train->add_option("--restrict", train_restrict, "restrict the dataset by this factor");
    train->add_option("--model-out", train_model_out, "model output directory")->required();
    train_flags.add_to(train);

    // eval
    auto* eval = app.add_subcommand("eval", "evaluate a model on a test dataset");
    std::string eval_model, eval_data, eval_out = "report.json";
    int eval_restrict = 1;
    eval->add_option("--model", eval_model, "model directory")->required();
    eval->add_option("--data", eval_data, "test dataset directory")->required();
    eval->add_option("--restrict", eval_restrict, "restrict the dataset by this factor");
    eval->add_option("--out", eval_out, "JSON report path");

    // transfer
    auto* transfer = app.add_subcommand("transfer", "error or coefficient study across resolutions");
    std::string tr_model, tr_out = "transfer.csv";
    std::vector<std::string> tr_data;
    bool tr_coeff = false;
    TrainFlags tr_flags;
    transfer->add_option("--model", tr_model, "model directory (error mode)");
    transfer->add_option("--data", tr_data, "dataset directories, one per resolution")->required();
    transfer->add_flag("--coeff-convergence", tr_coeff,
                       "train per-resolution models and report coefficient distances");
    transfer->add_option("--out", tr_out, "CSV output path");
    tr_flags.add_to(transfer);

    // semigroup
    auto* semigroup = app.add_subcommand("semigroup", "composed-prediction error against j*T data");
    std::string sg_model, sg_out = "semigroup.csv";
    std::vector<std::string> sg_data;
    semigroup->add_option("--model", sg_model, "model trained at horizon T")->required();
    semigroup->add_option("--data", sg_data, "test datasets at horizons T, 2T, ... in order")
        ->required();
    semigroup->add_option("--out", sg_out, "CSV output path");

    // bb-demo
    auto* bb = app.add_subcommand("bb-demo", "Brownian bridge model vs exact kernel interpolant");
    int bb_n = 32, bb_modes = 512, bb_points = 513;
    std::vector<int> bb_m;
    uint64_t bb_seed = 0;
    std::string bb_out;
    bb->add_option("--n", bb_n, "training points");
    bb->add_option("--m", bb_m, "feature counts (repeatable; default 50 500 5000)");
    bb->add_option("--modes", bb_modes, "bridge series truncation");
    bb->add_option("--seed", bb_seed, "seed");
    bb->add_option("--points", bb_points, "test grid size");
    bb->add_option("--out", bb_out, "output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (gen->parsed()) {
            double tau = std::isnan(gen_tau) ? (gen_pde == "darcy" ? 3.0 : 7.0) : gen_tau;
            double alpha = std::isnan(gen_alpha) ? (gen_pde == "darcy" ? 2.0 : 2.5) : gen_alpha;
            return cmd_gen(gen_pde, gen_n, gen_k, gen_r, gen_t, gen_visc, gen_dt, gen_no_dealias,
                           tau, alpha, gen_modes, gen_aplus, gen_aminus, gen_forcing, gen_cgtol,
                           gen_seed, gen_restrict, gen_out, threads);
        }
        if (train->parsed())
            return cmd_train(train_data, train_flags, train_restrict, train_model_out, threads);
        if (eval->parsed())
            return cmd_eval(eval_model, eval_data, eval_restrict, eval_out, threads);
        if (transfer->parsed()) {
            if (!tr_coeff && tr_model.empty())
                throw fvrf::ConfigError("transfer: --model is required unless --coeff-convergence");
            return cmd_transfer(tr_model, tr_data, tr_coeff, tr_flags, tr_out, threads);
        }
        if (semigroup->parsed()) return cmd_semigroup(sg_model, sg_data, sg_out, threads);
        if (bb->parsed()) return cmd_bb_demo(bb_n, bb_m, bb_modes, bb_seed, bb_points, bb_out);
    } catch (const fvrf::ConfigError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const fvrf::NumericalError& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}
