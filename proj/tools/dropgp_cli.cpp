// dropgp: train / predict / convert / check / gen-data front-end.
//
// Exit codes: 0 success, 1 runtime failure (bad data, NaN loss, ...),
// 2 usage error. Set DROPGP_LOG=info (or debug) for progress output.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "dropgp/checkpoint.hpp"
#include "dropgp/data.hpp"
#include "dropgp/gp.hpp"
#include "dropgp/network.hpp"
#include "dropgp/predict.hpp"
#include "dropgp/selfcheck.hpp"
#include "dropgp/trainer.hpp"

namespace {

using namespace dropgp;

int log_level() {
    const char* v = std::getenv("DROPGP_LOG");
    if (!v) return 0;
    const std::string s(v);
    if (s == "debug") return 2;
    if (s == "info") return 1;
    return 0;
}

void info(const std::string& msg) {
    if (log_level() >= 1) std::cerr << "dropgp: " << msg << "\n";
}

NetworkSpec spec_from_config(const RunConfig& cfg) {
    NetworkSpec spec;
    spec.widths = cfg.widths;
    spec.nonlinearity = cfg.nonlinearity;
    spec.scale_features = cfg.scale_features;
    spec.output_bias = cfg.output_bias;
    spec.validate();
    return spec;
}

void check_dims(const NetworkSpec& spec, const LoadedData& loaded, bool need_targets) {
    if (loaded.data.inputs.cols() != spec.input_dim())
        throw std::runtime_error("data has " + std::to_string(loaded.data.inputs.cols()) +
                                 " features but the network expects " +
                                 std::to_string(spec.input_dim()));
    if (need_targets && !loaded.has_targets)
        throw std::runtime_error("data file has no target columns");
    if (loaded.has_targets) loaded.data.validate(spec.output_dim());
}

int cmd_train(const std::string& config_path, const std::string& data_path,
              const std::string& out_path, const std::string& trace_path,
              std::int64_t seed_override) {
    RunConfig cfg = load_config(config_path);
    if (seed_override >= 0) cfg.seed = static_cast<std::uint64_t>(seed_override);

    const LoadedData loaded = load_csv(data_path);
    if (loaded.data.classification != cfg.classification)
        throw std::runtime_error("config task does not match the data file");
    const NetworkSpec spec = spec_from_config(cfg);
    check_dims(spec, loaded, true);

    const ResolvedHyper rh = resolve_hyper(cfg, loaded.data.size());
    info("training on " + std::to_string(loaded.data.size()) + " points, tau = " +
         std::to_string(rh.tau));

    RngState rng(cfg.seed);
    const ParamSet init = init_params(spec, rng);
    TrainOptions opts;
    opts.keep_probs = cfg.keep_probs;
    const TrainResult result =
        sgd_train(spec, init, rh.hyper, loaded.data, cfg.schedule, opts, rng);

    for (std::size_t i = 0; i < result.loss_trace.size(); ++i)
        if (!std::isfinite(result.loss_trace[i]))
            throw std::runtime_error("training diverged: non-finite cost at iteration " +
                                     std::to_string(i) + "; lower base_lr");

    write_checkpoint_file(out_path, Checkpoint{spec, result.params});
    info("checkpoint written to " + out_path);

    if (!trace_path.empty()) {
        Matrix trace(result.loss_trace.size(), 2);
        for (std::size_t i = 0; i < result.loss_trace.size(); ++i) {
            trace(i, 0) = static_cast<double>(i);
            trace(i, 1) = result.loss_trace[i];
        }
        write_matrix_csv(trace_path, trace, {"iteration", "cost"});
    }
    if (!result.loss_trace.empty())
        std::cout << "final cost " << result.loss_trace.back() << "\n";
    return 0;
}

int cmd_predict(const std::string& ckpt_path, const std::string& config_path,
                const std::string& data_path, const std::string& out_path,
                std::int64_t samples_override, std::int64_t seed_override,
                const std::string& calib_path, bool weight_avg) {
    const Checkpoint ck = read_checkpoint_file(ckpt_path);
    RunConfig cfg = load_config(config_path);
    if (cfg.widths != ck.spec.widths)
        throw std::runtime_error("config widths do not match the checkpoint");

    const LoadedData loaded = load_csv(data_path);
    check_dims(ck.spec, loaded, false);

    LoadedData calib;
    bool has_calib = !calib_path.empty();
    if (has_calib) {
        calib = load_csv(calib_path);
        check_dims(ck.spec, calib, false);
    }

    double tau = cfg.tau;
    if (tau <= 0.0) {
        if (!has_calib)
            throw std::runtime_error(
                "config gives lambda1 only; pass --calib-data (the training set) so "
                "tau can be recovered from its size");
        tau = tau_from_weight_decay(cfg.lengthscale, cfg.keep_probs.front(),
                                    calib.data.size(), cfg.lambda1);
    }

    McConfig mc;
    mc.samples = samples_override > 0 ? static_cast<std::size_t>(samples_override)
                                      : cfg.predict_samples;
    mc.master_seed = seed_override >= 0 ? static_cast<std::uint64_t>(seed_override)
                                        : cfg.seed;
    mc.keep_probs = cfg.keep_probs;
    mc.tau = tau;

    CalibrationTable table;
    if (has_calib) {
        info("building calibration table from " + std::to_string(calib.data.size()) +
             " points");
        std::vector<double> stds;
        for (std::size_t i = 0; i < calib.data.size(); ++i) {
            McConfig c = mc;
            c.stream = 1000000 + i;  // distinct from the prediction streams
            stds.push_back(pooled_std(mc_predict(ck.spec, ck.params, c,
                                                 calib.data.inputs.row_vec(i))));
        }
        table = CalibrationTable::from_values(std::move(stds));
    }

    const std::size_t d = ck.spec.output_dim();
    std::vector<std::string> header{"id"};
    for (std::size_t j = 0; j < d; ++j) header.push_back("mean_" + std::to_string(j));
    for (std::size_t j = 0; j < d; ++j) header.push_back("std_" + std::to_string(j));
    if (has_calib) header.push_back("percentile");
    const bool with_ll = loaded.has_targets && !loaded.data.classification;
    if (with_ll) header.push_back("log_lik");

    Matrix out(loaded.data.size(), header.size());
    const ParamSet averaged =
        weight_avg ? weight_averaged_params(ck.spec, ck.params, cfg.keep_probs)
                   : ParamSet{};
    for (std::size_t i = 0; i < loaded.data.size(); ++i) {
        const Vec x = loaded.data.inputs.row_vec(i);
        McConfig c = mc;
        c.stream = i;
        PredictiveSummary s;
        if (weight_avg) {
            // Deterministic pass through the keep-prob-scaled weights; the
            // reported spread is the observation noise floor only.
            const Vec y = forward(ck.spec, averaged, MaskSet::all_ones(ck.spec), x);
            s.mean = y;
            s.std_devs.assign(d, std::sqrt(1.0 / tau));
            if (with_ll) {
                Matrix one(1, d);
                for (std::size_t j = 0; j < d; ++j) one(0, j) = y[j];
                s.samples = std::move(one);
            }
        } else {
            s = mc_predict(ck.spec, ck.params, c, x, with_ll);
        }
        std::size_t col = 0;
        out(i, col++) = static_cast<double>(i);
        for (std::size_t j = 0; j < d; ++j) out(i, col++) = s.mean[j];
        for (std::size_t j = 0; j < d; ++j) out(i, col++) = s.std_devs[j];
        if (has_calib) out(i, col++) = calibration_percentile(table, pooled_std(s));
        if (with_ll)
            out(i, col++) = predictive_log_likelihood(*s.samples,
                                                      loaded.data.targets.row_vec(i), tau);
    }
    write_matrix_csv(out_path, out, header);
    info("predictions written to " + out_path);
    return 0;
}

int cmd_convert(double l, double p1, std::size_t n, double lambda1, double tau) {
    if ((lambda1 > 0.0) == (tau > 0.0))
        throw CLI::ValidationError("convert", "give exactly one of --lambda1 / --tau");
    if (lambda1 > 0.0) {
        const double t = tau_from_weight_decay(l, p1, n, lambda1);
        std::printf("tau = %.17g\n", t);
        std::printf("identity: tau = l^2 p1 / (2 N lambda1) = %.17g^2 * %.17g / (2 * %zu * %.17g)\n",
                    l, p1, n, lambda1);
    } else {
        const double lam = weight_decay_from_tau(l, p1, n, tau);
        std::printf("lambda1 = %.17g\n", lam);
        std::printf("identity: lambda1 = l^2 p1 / (2 N tau) = %.17g^2 * %.17g / (2 * %zu * %.17g)\n",
                    l, p1, n, tau);
    }
    return 0;
}

int cmd_gen_data(const std::string& kind, std::size_t n, double noise,
                 std::uint64_t seed, const std::string& out_path) {
    RngState rng(seed);
    Dataset d;
    if (kind == "sine-gap") d = make_sine_gap(n, noise, rng);
    else if (kind == "two-moons") d = make_two_moons(n, noise, rng);
    else throw CLI::ValidationError("gen-data", "unknown kind: " + kind);
    write_dataset_csv(out_path, d);
    info(kind + " dataset with " + std::to_string(n) + " rows written to " + out_path);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"MC-dropout network trainer and uncertainty-aware predictor"};
    app.require_subcommand(1);

    std::string config_path, data_path, out_path, trace_path, ckpt_path, calib_path;
    std::string kind = "sine-gap", suite;
    std::int64_t seed_override = -1, samples_override = -1;
    std::size_t gen_n = 100, conv_n = 0;
    double noise = 0.0, conv_l = 1.0, conv_p1 = 1.0, conv_lambda1 = 0.0, conv_tau = 0.0;
    std::uint64_t gen_seed = 0;
    bool weight_avg = false;

    auto* train = app.add_subcommand("train", "fit a dropout network with SGD");
    train->add_option("--config", config_path, "key=value run configuration")->required();
    train->add_option("--data", data_path, "training CSV")->required();
    train->add_option("--out", out_path, "checkpoint output path")->required();
    train->add_option("--trace", trace_path, "write the cost trace CSV here");
    train->add_option("--seed", seed_override, "override the config seed");

    auto* predict = app.add_subcommand("predict", "MC-dropout predictive moments");
    predict->add_option("--checkpoint", ckpt_path, "trained checkpoint")->required();
    predict->add_option("--config", config_path, "run configuration")->required();
    predict->add_option("--data", data_path, "input CSV")->required();
    predict->add_option("--out", out_path, "prediction CSV output path")->required();
    predict->add_option("--samples", samples_override, "number of stochastic passes T");
    predict->add_option("--seed", seed_override, "override the config seed");
    predict->add_option("--calib-data", calib_path,
                        "reference CSV (usually the training set) for uncertainty percentiles");
    predict->add_flag("--weight-avg", weight_avg,
                      "single pass through keep-prob-averaged weights instead of MC");

    auto* convert = app.add_subcommand("convert", "precision <-> weight-decay algebra");
    convert->add_option("--lengthscale", conv_l, "prior length-scale l")->required();
    convert->add_option("--p1", conv_p1, "first-layer keep probability")->required();
    convert->add_option("--n", conv_n, "training-set size")->required();
    convert->add_option("--lambda1", conv_lambda1, "first-layer weight decay");
    convert->add_option("--tau", conv_tau, "observation precision");

    auto* check = app.add_subcommand("check", "run a built-in invariant suite");
    check->add_option("suite", suite, "one of: all, " +
                      [] {
                          std::string s;
                          for (const auto& name : dropgp::selfcheck_suites())
                              s += (s.empty() ? "" : ", ") + name;
                          return s;
                      }())->required();

    auto* gen = app.add_subcommand("gen-data", "write a synthetic dataset");
    gen->add_option("--kind", kind, "sine-gap or two-moons");
    gen->add_option("--n", gen_n, "number of rows");
    gen->add_option("--noise", noise, "additive noise std");
    gen->add_option("--seed", gen_seed, "generator seed");
    gen->add_option("--out", out_path, "output CSV path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*train) return cmd_train(config_path, data_path, out_path, trace_path,
                                     seed_override);
        if (*predict) return cmd_predict(ckpt_path, config_path, data_path, out_path,
                                         samples_override, seed_override, calib_path,
                                         weight_avg);
        if (*convert) return cmd_convert(conv_l, conv_p1, conv_n, conv_lambda1, conv_tau);
        if (*check) {
            if (suite == "all") {
                int worst = 0;
                for (const auto& name : dropgp::selfcheck_suites()) {
                    std::cout << "== " << name << " ==\n";
                    worst = std::max(worst, dropgp::run_selfcheck(name, std::cout));
                }
                return worst;
            }
            const int rc = dropgp::run_selfcheck(suite, std::cout);
            if (rc == 2) std::cerr << "dropgp: unknown suite '" << suite << "'\n";
            return rc;
        }
        if (*gen) return cmd_gen_data(kind, gen_n, noise, gen_seed, out_path);
    } catch (const CLI::ValidationError& e) {
        std::cerr << "dropgp: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "dropgp: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
