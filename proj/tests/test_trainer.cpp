#include "doctest.h"

#include <cmath>
#include <stdexcept>

#include "dropgp/trainer.hpp"

using namespace dropgp;

namespace {

Dataset line_data(RngState& rng) {
    Dataset d;
    d.inputs = Matrix(32, 1);
    d.targets = Matrix(32, 1);
    for (std::size_t i = 0; i < 32; ++i) {
        const double x = -1.0 + 2.0 * rng.next_uniform();
        d.inputs(i, 0) = x;
        d.targets(i, 0) = 1.5 * x - 0.3;
    }
    return d;
}

bool params_equal(const ParamSet& a, const ParamSet& b) {
    for (std::size_t i = 0; i < a.weights.size(); ++i) {
        if (max_abs_diff(a.weights[i], b.weights[i]) != 0.0) return false;
        if (a.biases[i] != b.biases[i]) return false;
    }
    return true;
}

} // namespace

TEST_CASE("training a small net reduces the cost") {
    NetworkSpec spec;
    spec.widths = {1, 8, 1};
    spec.nonlinearity = Nonlinearity::tanh;
    RngState rng(71);
    const Dataset data = line_data(rng);
    const ParamSet init = init_params(spec, rng);

    HyperParams h = HyperParams::single_hidden(1.0, 1e-6, 1e-6, 1e-6);
    SgdSchedule sched;
    sched.base_lr = 0.1;
    sched.iterations = 500;
    TrainOptions opts;
    opts.keep_probs = {1.0, 1.0};  // no dropout: the cost trace is noiseless

    const TrainResult r = sgd_train(spec, init, h, data, sched, opts, rng);
    REQUIRE(r.loss_trace.size() == 500);
    CHECK(r.loss_trace.back() < 0.05 * r.loss_trace.front());
}

TEST_CASE("zero learning rate leaves the parameters untouched") {
    NetworkSpec spec;
    spec.widths = {1, 4, 1};
    RngState rng(72);
    const Dataset data = line_data(rng);
    const ParamSet init = init_params(spec, rng);

    HyperParams h = HyperParams::single_hidden(1.0, 0.01, 0.01, 0.01);
    SgdSchedule sched;
    sched.base_lr = 0.0;
    sched.iterations = 50;
    TrainOptions opts;
    opts.keep_probs = {0.8, 0.8};

    const TrainResult r = sgd_train(spec, init, h, data, sched, opts, rng);
    CHECK(params_equal(r.params, init));
}

TEST_CASE("equal seeds give bit-identical runs") {
    NetworkSpec spec;
    spec.widths = {1, 6, 1};
    RngState data_rng(73);
    const Dataset data = line_data(data_rng);

    HyperParams h = HyperParams::single_hidden(1.0, 1e-4, 1e-4, 1e-4);
    SgdSchedule sched;
    sched.base_lr = 0.05;
    sched.iterations = 100;
    sched.batch_size = 8;
    TrainOptions opts;
    opts.keep_probs = {0.9, 0.7};

    RngState r1(99), r2(99);
    const ParamSet init = init_params(spec, r1);
    RngState r1b(99);
    const ParamSet init2 = init_params(spec, r2);
    (void)r1b;
    const TrainResult a = sgd_train(spec, init, h, data, sched, opts, r1);
    const TrainResult b = sgd_train(spec, init2, h, data, sched, opts, r2);
    CHECK(params_equal(a.params, b.params));
    REQUIRE(a.loss_trace.size() == b.loss_trace.size());
    for (std::size_t i = 0; i < a.loss_trace.size(); ++i)
        CHECK(a.loss_trace[i] == b.loss_trace[i]);
}

TEST_CASE("trace_every thins the cost trace") {
    NetworkSpec spec;
    spec.widths = {1, 4, 1};
    RngState rng(74);
    const Dataset data = line_data(rng);
    const ParamSet init = init_params(spec, rng);

    HyperParams h = HyperParams::single_hidden(1.0, 0.0, 0.0, 0.0);
    SgdSchedule sched;
    sched.iterations = 10;
    TrainOptions opts;
    opts.keep_probs = {1.0, 1.0};
    opts.trace_every = 4;  // iterations 0, 4, 8
    const TrainResult r = sgd_train(spec, init, h, data, sched, opts, rng);
    CHECK(r.loss_trace.size() == 3);
}

TEST_CASE("invalid batch size is rejected") {
    NetworkSpec spec;
    spec.widths = {1, 4, 1};
    RngState rng(75);
    const Dataset data = line_data(rng);
    const ParamSet init = init_params(spec, rng);
    HyperParams h = HyperParams::single_hidden(1.0, 0.0, 0.0, 0.0);
    SgdSchedule sched;
    sched.batch_size = 1000;  // > N
    TrainOptions opts;
    opts.keep_probs = {1.0, 1.0};
    CHECK_THROWS_AS(sgd_train(spec, init, h, data, sched, opts, rng), std::logic_error);
}
