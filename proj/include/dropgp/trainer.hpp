#pragma once

// Mini-batch momentum SGD on the dropout cost with the learning-rate policy
// base_lr * (1 + gamma * iter)^(-power). Fresh masks per point per iteration;
// deterministic given the RngState.

#include "dropgp/network.hpp"

namespace dropgp {

enum class MaskMode { bernoulli, gaussian };

struct SgdSchedule {
    double base_lr = 0.01;
    double gamma = 0.0001;
    double power = 0.25;
    double momentum = 0.9;
    std::size_t iterations = 10000;
    std::size_t batch_size = 0;  // 0 = full batch
};

struct TrainOptions {
    std::vector<double> keep_probs;  // per weight layer
    MaskMode mask_mode = MaskMode::bernoulli;
    double gaussian_mask_sigma = 0.0;  // used when mask_mode == gaussian
    std::size_t trace_every = 1;       // record the minibatch cost every k iters
};

struct TrainResult {
    ParamSet params;
    std::vector<double> loss_trace;
};

TrainResult sgd_train(const NetworkSpec& spec, const ParamSet& init,
                      const HyperParams& hyper, const Dataset& data,
                      const SgdSchedule& schedule, const TrainOptions& opts,
                      RngState& rng);

} // namespace dropgp
