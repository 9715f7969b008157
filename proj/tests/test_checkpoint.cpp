#include "doctest.h"

#include <sstream>
#include <stdexcept>

#include "dropgp/checkpoint.hpp"

using namespace dropgp;

namespace {
Checkpoint random_checkpoint(RngState& rng) {
    Checkpoint ck;
    ck.spec.widths = {3, 5, 2};
    ck.spec.nonlinearity = Nonlinearity::tanh;
    ck.spec.scale_features = true;
    ck.params = zeros_like(ck.spec);
    for (auto& w : ck.params.weights)
        for (std::size_t i = 0; i < w.size(); ++i) w.data()[i] = rng.next_gaussian();
    for (auto& b : ck.params.biases)
        for (double& v : b) v = rng.next_gaussian();
    return ck;
}
} // namespace

TEST_CASE("checkpoint round-trips bit-exactly") {
    RngState rng(81);
    const Checkpoint ck = random_checkpoint(rng);

    std::ostringstream os;
    write_checkpoint(os, ck);
    std::istringstream is(os.str());
    const Checkpoint back = read_checkpoint(is);

    CHECK(back.spec.widths == ck.spec.widths);
    CHECK(back.spec.nonlinearity == ck.spec.nonlinearity);
    CHECK(back.spec.scale_features == ck.spec.scale_features);
    CHECK(back.spec.output_bias == ck.spec.output_bias);
    for (std::size_t i = 0; i < 2; ++i) {
        CHECK(max_abs_diff(back.params.weights[i], ck.params.weights[i]) == 0.0);
        CHECK(back.params.biases[i] == ck.params.biases[i]);
    }

    // Serialising the reread state reproduces the bytes.
    std::ostringstream os2;
    write_checkpoint(os2, back);
    CHECK(os2.str() == os.str());
}

TEST_CASE("output_bias layout survives the round trip") {
    RngState rng(82);
    Checkpoint ck = random_checkpoint(rng);
    ck.spec.output_bias = true;
    ck.params = zeros_like(ck.spec);
    ck.params.biases[1] = {0.25, -0.75};

    std::ostringstream os;
    write_checkpoint(os, ck);
    std::istringstream is(os.str());
    const Checkpoint back = read_checkpoint(is);
    CHECK(back.spec.output_bias);
    CHECK(back.params.biases[1] == ck.params.biases[1]);
}

TEST_CASE("foreign content is rejected") {
    std::istringstream is("some other file format\n");
    CHECK_THROWS_AS(read_checkpoint(is), std::runtime_error);
}
