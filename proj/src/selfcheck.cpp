#include "dropgp/selfcheck.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>

#include "dropgp/gp.hpp"
#include "dropgp/klmix.hpp"
#include "dropgp/network.hpp"
#include "dropgp/predict.hpp"

namespace dropgp {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;

struct Reporter {
    std::ostream& os;
    bool all_ok = true;
    void row(const std::string& name, bool ok, double value) {
        all_ok = all_ok && ok;
        os << (ok ? "  [pass] " : "  [FAIL] ") << std::left << std::setw(44) << name
           << std::scientific << std::setprecision(3) << value << "\n";
    }
};

struct RandomInstance {
    NetworkSpec spec;
    ParamSet params;
    Dataset data;
    std::vector<MaskSet> masks;
    std::vector<double> keep_probs;
};

RandomInstance random_instance(RngState& rng, bool classification) {
    RandomInstance ri;
    const std::size_t q = 1 + static_cast<std::size_t>(rng.next_uniform() * 8);
    const std::size_t k = 1 + static_cast<std::size_t>(rng.next_uniform() * 8);
    const std::size_t d = classification
                              ? 2 + static_cast<std::size_t>(rng.next_uniform() * 6)
                              : 1 + static_cast<std::size_t>(rng.next_uniform() * 8);
    const std::size_t n = 1 + static_cast<std::size_t>(rng.next_uniform() * 32);
    ri.spec.widths = {q, k, d};
    ri.spec.nonlinearity = rng.next_uniform() < 0.5 ? Nonlinearity::relu : Nonlinearity::tanh;
    ri.spec.scale_features = true;

    ri.params = zeros_like(ri.spec);
    for (auto& w : ri.params.weights)
        for (std::size_t i = 0; i < w.size(); ++i) w.data()[i] = rng.next_gaussian();
    for (auto& b : ri.params.biases)
        for (double& v : b) v = rng.next_gaussian();

    ri.data.classification = classification;
    ri.data.inputs = sample_gaussian_matrix(n, q, 0.0, 1.0, rng);
    if (classification) {
        ri.data.labels.resize(n);
        for (auto& c : ri.data.labels)
            c = 1 + static_cast<std::size_t>(rng.next_uniform() * static_cast<double>(d));
    } else {
        ri.data.targets = sample_gaussian_matrix(n, d, 0.0, 1.0, rng);
    }

    ri.keep_probs = {0.5 + 0.5 * rng.next_uniform(), 0.5 + 0.5 * rng.next_uniform()};
    for (std::size_t i = 0; i < n; ++i)
        ri.masks.push_back(sample_masks(ri.spec, ri.keep_probs, rng));
    return ri;
}

int check_equivalence(std::ostream& os) {
    Reporter rep{os};
    RngState rng(20240817);
    const double taus[] = {0.1, 1.0, 10.0};

    double worst_reg = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        RandomInstance ri = random_instance(rng, false);
        const double tau = taus[trial % 3];
        const double n = static_cast<double>(ri.data.size());
        HyperParams h = HyperParams::single_hidden(
            tau, ri.keep_probs[0] / (2.0 * tau * n), ri.keep_probs[1] / (2.0 * tau * n),
            1.0 / (2.0 * tau * n));
        const double cost = dropout_cost(ri.spec, ri.params, h, ri.data, ri.masks);
        const double obj = gp_mc_objective_regression(ri.spec, ri.params, h, ri.data, ri.masks);
        worst_reg = std::max(worst_reg, std::abs(cost + obj) / std::max(1e-300, std::abs(cost)));
    }
    rep.row("regression cost == -objective (rel)", worst_reg < 1e-10, worst_reg);

    double worst_cls = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        RandomInstance ri = random_instance(rng, true);
        const double n = static_cast<double>(ri.data.size());
        HyperParams h = HyperParams::single_hidden(
            1.0, ri.keep_probs[0] / (2.0 * n), ri.keep_probs[1] / (2.0 * n), 1.0 / (2.0 * n));
        const double cost = dropout_cost(ri.spec, ri.params, h, ri.data, ri.masks);
        const double obj =
            gp_mc_objective_classification(ri.spec, ri.params, h, ri.data, ri.masks);
        worst_cls = std::max(worst_cls, std::abs(cost + obj) / std::max(1e-300, std::abs(cost)));
    }
    rep.row("classification cost == -objective (rel)", worst_cls < 1e-10, worst_cls);
    return rep.all_ok ? 0 : 1;
}

int check_gradients(std::ostream& os) {
    Reporter rep{os};
    RngState rng(997);
    double worst = 0.0;
    for (int trial = 0; trial < 5; ++trial) {
        RandomInstance ri = random_instance(rng, trial % 2 == 1);
        HyperParams h = HyperParams::single_hidden(1.0, 0.01, 0.02, 0.005);
        ParamSet g = gradients(ri.spec, ri.params, h, ri.data, ri.masks);
        const double eps = 1e-6;
        for (std::size_t layer = 0; layer < g.weights.size(); ++layer) {
            for (std::size_t idx = 0; idx < g.weights[layer].size(); idx += 3) {
                ParamSet p = ri.params;
                p.weights[layer].data()[idx] += eps;
                const double up = dropout_cost(ri.spec, p, h, ri.data, ri.masks);
                p.weights[layer].data()[idx] -= 2.0 * eps;
                const double dn = dropout_cost(ri.spec, p, h, ri.data, ri.masks);
                const double fd = (up - dn) / (2.0 * eps);
                const double an = g.weights[layer].data()[idx];
                const double denom = std::max({std::abs(fd), std::abs(an), 1e-4});
                worst = std::max(worst, std::abs(fd - an) / denom);
            }
        }
    }
    rep.row("analytic vs central differences (rel)", worst < 1e-5, worst);
    return rep.all_ok ? 0 : 1;
}

int check_kl(std::ostream& os) {
    Reporter rep{os};
    RngState rng(4242);
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t k = 1 + static_cast<std::size_t>(rng.next_uniform() * 64);
        Vec mu = sample_gaussian_vector(k, 0.0, 1.0, rng);
        Matrix a = sample_gaussian_matrix(k, k, 0.0, 1.0, rng);
        Matrix sigma = matmul(a, transpose(a));
        for (std::size_t i = 0; i < sigma.size(); ++i)
            sigma.data()[i] /= static_cast<double>(k);
        for (std::size_t i = 0; i < k; ++i) sigma(i, i) += 0.5;

        MixtureSpec q;
        q.weights = {1.0};
        q.means = {mu};
        q.covariances = {Covariance::full(sigma)};
        const double diff = kl_mog_approx(q) -
                            analytic_gaussian_kl(mu, q.covariances[0], 1.0);
        worst = std::max(worst,
                         std::abs(diff + 0.5 * static_cast<double>(k) * kLog2Pi));
    }
    rep.row("L=1: approx - analytic == -(K/2)log 2pi", worst < 1e-12, worst);

    // Length-scale display reduces to the analytic single-Gaussian KL at L=1.
    double worst2 = 0.0;
    for (int trial = 0; trial < 10; ++trial) {
        const std::size_t k = 1 + static_cast<std::size_t>(rng.next_uniform() * 16);
        Vec mu = sample_gaussian_vector(k, 0.0, 1.0, rng);
        Covariance c = Covariance::isotropic(k, 0.3 + rng.next_uniform());
        MixtureSpec q;
        q.weights = {1.0};
        q.means = {mu};
        q.covariances = {c};
        const double l = 0.5 + rng.next_uniform();
        worst2 = std::max(worst2, std::abs(kl_mog_approx_lengthscale(q, l) -
                                           analytic_gaussian_kl(mu, c, l)));
    }
    rep.row("L=1 length-scale form == analytic", worst2 < 1e-12, worst2);
    return rep.all_ok ? 0 : 1;
}

int check_mc_oracle(std::ostream& os) {
    Reporter rep{os};
    NetworkSpec spec;
    spec.widths = {2, 3, 2};
    spec.nonlinearity = Nonlinearity::tanh;
    RngState rng(5150);
    ParamSet params = zeros_like(spec);
    for (auto& w : params.weights)
        for (std::size_t i = 0; i < w.size(); ++i) w.data()[i] = rng.next_gaussian();
    for (auto& b : params.biases)
        for (double& v : b) v = rng.next_gaussian();

    const std::vector<double> keep = {0.7, 0.8};
    const Vec x = {0.4, -1.2};
    const double tau = 4.0;

    const PredictiveSummary oracle = enumerate_masks_oracle(spec, params, keep, tau, x);
    McConfig cfg;
    cfg.samples = 20000;
    cfg.master_seed = 99;
    cfg.keep_probs = keep;
    cfg.tau = tau;
    const PredictiveSummary mc = mc_predict(spec, params, cfg, x);

    double worst = 0.0;
    bool ok = true;
    for (std::size_t d = 0; d < oracle.mean.size(); ++d) {
        const double var = oracle.covariance(d, d) - 1.0 / tau;
        const double se = std::sqrt(std::max(var, 0.0) / static_cast<double>(cfg.samples));
        const double err = std::abs(mc.mean[d] - oracle.mean[d]);
        worst = std::max(worst, err);
        ok = ok && err <= 3.0 * se + 1e-12;
    }
    rep.row("MC mean within 3 std-errors of oracle", ok, worst);
    return rep.all_ok ? 0 : 1;
}

int check_deep_gp(std::ostream& os) {
    Reporter rep{os};
    const std::size_t n = 6, k1 = 4, k2 = 3;
    RngState rng(31);
    const Matrix x = sample_gaussian_matrix(n, 2, 0.0, 1.0, rng);

    // Fixed first-layer draw; redraw W2 and accumulate F1 moments.
    DeepGpSample base =
        deep_two_layer_sample(k1, k2, 1, x, Nonlinearity::relu, Nonlinearity::relu, rng);
    const Matrix cov_target = matmul(base.phi1, transpose(base.phi1));

    const std::size_t draws = 20000;
    Matrix mean_acc(n, k2);
    Matrix cov_acc(n, n);
    Matrix cov_sq_acc(n, n);
    for (std::size_t s = 0; s < draws; ++s) {
        const Matrix w2 = sample_gaussian_matrix(k1, k2, 0.0, 1.0, rng);
        const Matrix f1 = matmul(base.phi1, w2);
        for (std::size_t i = 0; i < f1.size(); ++i) mean_acc.data()[i] += f1.data()[i];
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = 0; b < n; ++b) {
                double v = 0.0;
                for (std::size_t c = 0; c < k2; ++c) v += f1(a, c) * f1(b, c);
                v /= static_cast<double>(k2);
                cov_acc(a, b) += v;
                cov_sq_acc(a, b) += v * v;
            }
    }

    const double s = static_cast<double>(draws);
    bool mean_ok = true, cov_ok = true;
    double worst_mean = 0.0, worst_cov = 0.0;
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t c = 0; c < k2; ++c) {
            const double m = mean_acc(a, c) / s;
            const double se = std::sqrt(cov_target(a, a) / s);
            worst_mean = std::max(worst_mean, std::abs(m));
            mean_ok = mean_ok && std::abs(m) <= 3.0 * se;
        }
        for (std::size_t b = 0; b < n; ++b) {
            const double m = cov_acc(a, b) / s;
            const double var = cov_sq_acc(a, b) / s - m * m;
            const double se = std::sqrt(std::max(var, 0.0) / s);
            worst_cov = std::max(worst_cov, std::abs(m - cov_target(a, b)));
            cov_ok = cov_ok && std::abs(m - cov_target(a, b)) <= 3.0 * se + 1e-12;
        }
    }
    rep.row("E[F1] == 0 within 3 std-errors", mean_ok, worst_mean);
    rep.row("Cov[F1] == Phi1 Phi1^T within 3 std-errors", cov_ok, worst_cov);
    return rep.all_ok ? 0 : 1;
}

} // namespace

std::vector<std::string> selfcheck_suites() {
    return {"equivalence", "kl", "mc-oracle", "gradients", "deep-gp"};
}

int run_selfcheck(const std::string& suite, std::ostream& os) {
    os << "suite: " << suite << "\n";
    if (suite == "equivalence") return check_equivalence(os);
    if (suite == "kl") return check_kl(os);
    if (suite == "mc-oracle") return check_mc_oracle(os);
    if (suite == "gradients") return check_gradients(os);
    if (suite == "deep-gp") return check_deep_gp(os);
    os << "unknown suite\n";
    return 2;
}

} // namespace dropgp
