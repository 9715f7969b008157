#pragma once

// Dropout feed-forward network: per-layer multiplicative masks on the inputs
// of every weight layer, regression / classification losses, the weight-decay
// training cost and its exact reverse-mode gradients.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "dropgp/matrix.hpp"
#include "dropgp/rng.hpp"

namespace dropgp {

enum class Nonlinearity { relu, tanh, identity };

Nonlinearity nonlinearity_from_string(const std::string& s);
std::string to_string(Nonlinearity nl);

struct NetworkSpec {
    // widths = (Q, K_1, ..., K_L, D); at least one hidden layer.
    std::vector<std::size_t> widths;
    Nonlinearity nonlinearity = Nonlinearity::relu;
    // Multiply each hidden activation by sqrt(1/K_i) (the GP feature map
    // convention). Off for the plain NN view.
    bool scale_features = false;
    // The output-layer bias is omitted by default (centred outputs).
    bool output_bias = false;

    std::size_t num_weight_layers() const { return widths.size() - 1; }
    std::size_t input_dim() const { return widths.front(); }
    std::size_t output_dim() const { return widths.back(); }
    void validate() const;
};

struct ParamSet {
    std::vector<Matrix> weights;  // weights[i]: widths[i] x widths[i+1]
    std::vector<Vec> biases;      // biases[i]: widths[i+1]; last may be empty

    void validate(const NetworkSpec& spec) const;
};

// One mask vector per weight layer; masks[i] has length widths[i] and
// multiplies that layer's input. Entries are 0/1 for Bernoulli dropout but
// may be any real for the multiplicative-Gaussian variant.
struct MaskSet {
    std::vector<Vec> masks;
    std::vector<double> keep_probs;

    static MaskSet all_ones(const NetworkSpec& spec);
};

struct Dataset {
    Matrix inputs;                 // N x Q
    Matrix targets;                // N x D (regression)
    std::vector<std::size_t> labels;  // per-row class in [1..D] (classification)
    bool classification = false;

    std::size_t size() const { return inputs.rows(); }
    void validate(std::size_t output_dim) const;
};

struct HyperParams {
    double tau = 1.0;                   // observation precision
    std::vector<double> weight_decays;  // one per weight layer
    std::vector<double> bias_decays;    // one per bias vector
    double lengthscale = 1.0;           // l (first-layer prior scale)
    double lengthscale_out = 1.0;       // l' (bias prior scale)
    double sigma = 0.0;                 // variational std

    void validate() const;

    static HyperParams single_hidden(double tau, double lambda1, double lambda2,
                                     double lambda3);
};

// Mask sampling.
MaskSet sample_masks(const NetworkSpec& spec, const std::vector<double>& keep_probs,
                     RngState& rng);
// The N(1, sigma^2) multiplicative-noise variant; sigma = 0 gives all ones.
Vec sample_multiplicative_gaussian_mask(std::size_t dim, double sigma, RngState& rng);
MaskSet sample_gaussian_masks(const NetworkSpec& spec, double sigma, RngState& rng);

// Forward pass. Masks multiply each layer's input, which matches zeroing
// rows of the weight matrices.
Vec forward(const NetworkSpec& spec, const ParamSet& params, const MaskSet& masks,
            const Vec& x);

// Per-layer intermediates kept for the backward pass.
struct ForwardCache {
    std::vector<Vec> masked_inputs;     // input of each weight layer, after mask
    std::vector<Vec> pre_activations;   // affine outputs
    Vec output;
};
ForwardCache forward_cached(const NetworkSpec& spec, const ParamSet& params,
                            const MaskSet& masks, const Vec& x);

// E = 1/(2N) sum_n ||y_n - yhat_n||^2
double euclidean_loss(const Matrix& targets, const Matrix& outputs);
// E = -1/N sum_n log softmax(logits_n)[c_n], via logsumexp.
double softmax_loss(const Matrix& logits, const std::vector<std::size_t>& labels);

// E + sum_i lambda_w,i ||W_i||^2 + sum_i lambda_b,i ||b_i||^2 with one fresh
// MaskSet per data point.
double dropout_cost(const NetworkSpec& spec, const ParamSet& params,
                    const HyperParams& hyper, const Dataset& data,
                    const std::vector<MaskSet>& masks_per_point);

// Exact gradient of dropout_cost w.r.t. every parameter, same masks.
// data_term_weight scales only the data-fit term (1.0 for the plain cost).
ParamSet gradients(const NetworkSpec& spec, const ParamSet& params,
                   const HyperParams& hyper, const Dataset& data,
                   const std::vector<MaskSet>& masks_per_point,
                   double data_term_weight = 1.0);

// W scaled entrywise.
Matrix scale_weights(const Matrix& w, double factor);
// Test-time weight averaging: W_i pre-multiplied by its keep probability.
ParamSet weight_averaged_params(const NetworkSpec& spec, const ParamSet& params,
                                const std::vector<double>& keep_probs);

ParamSet zeros_like(const NetworkSpec& spec);
// Biases at 0, weights uniform on [-sqrt(3/fan_in), +sqrt(3/fan_in)].
ParamSet init_params(const NetworkSpec& spec, RngState& rng);

} // namespace dropgp
