#include "dropgp/trainer.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace dropgp {

namespace {

// First m entries of a partial Fisher-Yates shuffle over [0, n).
std::vector<std::size_t> sample_indices(std::size_t n, std::size_t m, RngState& rng) {
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    for (std::size_t i = 0; i < m; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng.next_uniform() *
                                                           static_cast<double>(n - i));
        std::swap(idx[i], idx[std::min(j, n - 1)]);
    }
    idx.resize(m);
    return idx;
}

} // namespace

TrainResult sgd_train(const NetworkSpec& spec, const ParamSet& init,
                      const HyperParams& hyper, const Dataset& data,
                      const SgdSchedule& schedule, const TrainOptions& opts,
                      RngState& rng) {
    spec.validate();
    init.validate(spec);
    hyper.validate();
    data.validate(spec.output_dim());

    const std::size_t n = data.size();
    std::size_t m = schedule.batch_size == 0 ? n : schedule.batch_size;
    if (m == 0 || m > n)
        throw std::logic_error("batch size must lie in [1, N]");
    if (opts.keep_probs.size() != spec.num_weight_layers())
        throw std::logic_error("keep-prob count does not match weight layers");

    TrainResult result;
    result.params = init;
    ParamSet velocity = zeros_like(spec);

    for (std::size_t iter = 0; iter < schedule.iterations; ++iter) {
        const double lr = schedule.base_lr *
                          std::pow(1.0 + schedule.gamma * static_cast<double>(iter),
                                   -schedule.power);

        const std::vector<std::size_t> batch = sample_indices(n, m, rng);

        Dataset mini;
        mini.classification = data.classification;
        mini.inputs = Matrix(m, data.inputs.cols());
        if (data.classification) {
            mini.labels.resize(m);
        } else {
            mini.targets = Matrix(m, data.targets.cols());
        }
        for (std::size_t i = 0; i < m; ++i) {
            const std::size_t src = batch[i];
            for (std::size_t j = 0; j < data.inputs.cols(); ++j)
                mini.inputs(i, j) = data.inputs(src, j);
            if (data.classification)
                mini.labels[i] = data.labels[src];
            else
                for (std::size_t j = 0; j < data.targets.cols(); ++j)
                    mini.targets(i, j) = data.targets(src, j);
        }

        std::vector<MaskSet> masks;
        masks.reserve(m);
        for (std::size_t i = 0; i < m; ++i)
            masks.push_back(opts.mask_mode == MaskMode::bernoulli
                                ? sample_masks(spec, opts.keep_probs, rng)
                                : sample_gaussian_masks(spec, opts.gaussian_mask_sigma, rng));

        if (opts.trace_every > 0 && iter % opts.trace_every == 0)
            result.loss_trace.push_back(
                dropout_cost(spec, result.params, hyper, mini, masks));

        const ParamSet grad = gradients(spec, result.params, hyper, mini, masks);

        for (std::size_t i = 0; i < grad.weights.size(); ++i) {
            for (std::size_t j = 0; j < grad.weights[i].size(); ++j) {
                double& v = velocity.weights[i].data()[j];
                v = schedule.momentum * v - lr * grad.weights[i].data()[j];
                result.params.weights[i].data()[j] += v;
            }
            for (std::size_t j = 0; j < grad.biases[i].size(); ++j) {
                double& v = velocity.biases[i][j];
                v = schedule.momentum * v - lr * grad.biases[i][j];
                result.params.biases[i][j] += v;
            }
        }
    }
    return result;
}

} // namespace dropgp
