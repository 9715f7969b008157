#include "dropgp/network.hpp"

#include <cmath>
#include <stdexcept>

#include "dropgp/kernels.hpp"
#include "dropgp/numeric.hpp"

namespace dropgp {

namespace {

double apply_nl(Nonlinearity nl, double x) {
    switch (nl) {
        case Nonlinearity::relu: return x > 0.0 ? x : 0.0;
        case Nonlinearity::tanh: return std::tanh(x);
        case Nonlinearity::identity: return x;
    }
    return x;
}

// relu'(0) is defined as 0.
double apply_nl_deriv(Nonlinearity nl, double x) {
    switch (nl) {
        case Nonlinearity::relu: return x > 0.0 ? 1.0 : 0.0;
        case Nonlinearity::tanh: {
            const double t = std::tanh(x);
            return 1.0 - t * t;
        }
        case Nonlinearity::identity: return 1.0;
    }
    return 1.0;
}

void check_masks(const NetworkSpec& spec, const MaskSet& masks) {
    if (masks.masks.size() != spec.num_weight_layers())
        throw std::logic_error("mask count does not match weight layers");
    for (std::size_t i = 0; i < masks.masks.size(); ++i)
        if (masks.masks[i].size() != spec.widths[i])
            throw std::logic_error("mask length does not match layer width");
}

} // namespace

Nonlinearity nonlinearity_from_string(const std::string& s) {
    if (s == "relu") return Nonlinearity::relu;
    if (s == "tanh") return Nonlinearity::tanh;
    if (s == "identity") return Nonlinearity::identity;
    throw std::invalid_argument("unknown nonlinearity: " + s);
}

std::string to_string(Nonlinearity nl) {
    switch (nl) {
        case Nonlinearity::relu: return "relu";
        case Nonlinearity::tanh: return "tanh";
        case Nonlinearity::identity: return "identity";
    }
    return "relu";
}

void NetworkSpec::validate() const {
    if (widths.size() < 3)
        throw std::invalid_argument("network needs at least one hidden layer");
    for (std::size_t w : widths)
        if (w < 1) throw std::invalid_argument("all layer widths must be >= 1");
}

void ParamSet::validate(const NetworkSpec& spec) const {
    const std::size_t l = spec.num_weight_layers();
    if (weights.size() != l || biases.size() != l)
        throw std::logic_error("param count does not match spec");
    for (std::size_t i = 0; i < l; ++i) {
        if (weights[i].rows() != spec.widths[i] || weights[i].cols() != spec.widths[i + 1])
            throw std::logic_error("weight shape does not match spec");
        const bool last = (i + 1 == l);
        const std::size_t expect = (last && !spec.output_bias) ? 0 : spec.widths[i + 1];
        if (biases[i].size() != expect)
            throw std::logic_error("bias length does not match spec");
    }
}

MaskSet MaskSet::all_ones(const NetworkSpec& spec) {
    MaskSet ms;
    for (std::size_t i = 0; i + 1 < spec.widths.size(); ++i) {
        ms.masks.emplace_back(spec.widths[i], 1.0);
        ms.keep_probs.push_back(1.0);
    }
    return ms;
}

void Dataset::validate(std::size_t output_dim) const {
    if (classification) {
        if (labels.size() != inputs.rows())
            throw std::logic_error("label count does not match inputs");
        for (std::size_t c : labels)
            if (c < 1 || c > output_dim)
                throw std::logic_error("class label out of range");
    } else {
        if (targets.rows() != inputs.rows())
            throw std::logic_error("target rows do not match inputs");
        if (targets.cols() != output_dim)
            throw std::logic_error("target width does not match outputs");
    }
}

void HyperParams::validate() const {
    if (tau <= 0.0) throw std::invalid_argument("tau must be > 0");
    for (double l : weight_decays)
        if (l < 0.0) throw std::invalid_argument("weight decay must be >= 0");
    for (double l : bias_decays)
        if (l < 0.0) throw std::invalid_argument("bias decay must be >= 0");
    if (lengthscale <= 0.0 || lengthscale_out <= 0.0)
        throw std::invalid_argument("length-scales must be > 0");
    if (sigma < 0.0) throw std::invalid_argument("sigma must be >= 0");
}

HyperParams HyperParams::single_hidden(double tau, double lambda1, double lambda2,
                                       double lambda3) {
    HyperParams h;
    h.tau = tau;
    h.weight_decays = {lambda1, lambda2};
    h.bias_decays = {lambda3, lambda3};
    return h;
}

MaskSet sample_masks(const NetworkSpec& spec, const std::vector<double>& keep_probs,
                     RngState& rng) {
    if (keep_probs.size() != spec.num_weight_layers())
        throw std::logic_error("keep-prob count does not match weight layers");
    MaskSet ms;
    ms.keep_probs = keep_probs;
    for (std::size_t i = 0; i < keep_probs.size(); ++i)
        ms.masks.push_back(sample_bernoulli_vector(keep_probs[i], spec.widths[i], rng));
    return ms;
}

Vec sample_multiplicative_gaussian_mask(std::size_t dim, double sigma, RngState& rng) {
    if (sigma < 0.0) throw std::invalid_argument("sigma must be >= 0");
    return sample_gaussian_vector(dim, 1.0, sigma, rng);
}

MaskSet sample_gaussian_masks(const NetworkSpec& spec, double sigma, RngState& rng) {
    MaskSet ms;
    for (std::size_t i = 0; i + 1 < spec.widths.size(); ++i) {
        ms.masks.push_back(sample_multiplicative_gaussian_mask(spec.widths[i], sigma, rng));
        ms.keep_probs.push_back(1.0);
    }
    return ms;
}

ForwardCache forward_cached(const NetworkSpec& spec, const ParamSet& params,
                            const MaskSet& masks, const Vec& x) {
    params.validate(spec);
    check_masks(spec, masks);
    if (x.size() != spec.input_dim())
        throw std::logic_error("input length does not match spec");

    const std::size_t l = spec.num_weight_layers();
    ForwardCache cache;
    cache.masked_inputs.resize(l);
    cache.pre_activations.resize(l);

    Vec h = x;
    for (std::size_t i = 0; i < l; ++i) {
        Vec masked(h.size());
        for (std::size_t j = 0; j < h.size(); ++j) masked[j] = h[j] * masks.masks[i][j];
        cache.masked_inputs[i] = masked;

        Vec a = vecmat(masked, params.weights[i]);
        if (!params.biases[i].empty())
            for (std::size_t j = 0; j < a.size(); ++j) a[j] += params.biases[i][j];
        cache.pre_activations[i] = a;

        if (i + 1 < l) {
            const double scale =
                spec.scale_features ? std::sqrt(1.0 / static_cast<double>(spec.widths[i + 1]))
                                    : 1.0;
            h.resize(a.size());
            for (std::size_t j = 0; j < a.size(); ++j)
                h[j] = scale * apply_nl(spec.nonlinearity, a[j]);
        } else {
            h = a;
        }
    }
    cache.output = h;
    return cache;
}

Vec forward(const NetworkSpec& spec, const ParamSet& params, const MaskSet& masks,
            const Vec& x) {
    return forward_cached(spec, params, masks, x).output;
}

double euclidean_loss(const Matrix& targets, const Matrix& outputs) {
    if (targets.rows() != outputs.rows() || targets.cols() != outputs.cols())
        throw std::logic_error("euclidean_loss: shape mismatch");
    const double ss = kernels::sq_diff_sum(targets.data(), outputs.data(), targets.size());
    return ss / (2.0 * static_cast<double>(targets.rows()));
}

double softmax_loss(const Matrix& logits, const std::vector<std::size_t>& labels) {
    if (labels.size() != logits.rows())
        throw std::logic_error("softmax_loss: label count mismatch");
    double total = 0.0;
    for (std::size_t n = 0; n < logits.rows(); ++n) {
        const std::size_t c = labels[n];
        if (c < 1 || c > logits.cols())
            throw std::logic_error("softmax_loss: label out of range");
        total += logsumexp(logits.row(n), logits.cols()) - logits(n, c - 1);
    }
    return total / static_cast<double>(logits.rows());
}

namespace {

double decay_terms(const ParamSet& params, const HyperParams& hyper) {
    double s = 0.0;
    for (std::size_t i = 0; i < params.weights.size(); ++i) {
        const double lw = i < hyper.weight_decays.size() ? hyper.weight_decays[i] : 0.0;
        if (lw != 0.0) s += lw * frobenius_sq(params.weights[i]);
        const double lb = i < hyper.bias_decays.size() ? hyper.bias_decays[i] : 0.0;
        if (lb != 0.0 && !params.biases[i].empty()) s += lb * norm_sq(params.biases[i]);
    }
    return s;
}

Matrix forward_all(const NetworkSpec& spec, const ParamSet& params, const Dataset& data,
                   const std::vector<MaskSet>& masks_per_point) {
    if (masks_per_point.size() != data.size())
        throw std::logic_error("need one MaskSet per data point");
    Matrix out(data.size(), spec.output_dim());
    for (std::size_t n = 0; n < data.size(); ++n) {
        const Vec y = forward(spec, params, masks_per_point[n], data.inputs.row_vec(n));
        for (std::size_t d = 0; d < y.size(); ++d) out(n, d) = y[d];
    }
    return out;
}

} // namespace

double dropout_cost(const NetworkSpec& spec, const ParamSet& params,
                    const HyperParams& hyper, const Dataset& data,
                    const std::vector<MaskSet>& masks_per_point) {
    data.validate(spec.output_dim());
    const Matrix outputs = forward_all(spec, params, data, masks_per_point);
    const double e = data.classification ? softmax_loss(outputs, data.labels)
                                         : euclidean_loss(data.targets, outputs);
    return e + decay_terms(params, hyper);
}

ParamSet gradients(const NetworkSpec& spec, const ParamSet& params,
                   const HyperParams& hyper, const Dataset& data,
                   const std::vector<MaskSet>& masks_per_point,
                   double data_term_weight) {
    data.validate(spec.output_dim());
    if (masks_per_point.size() != data.size())
        throw std::logic_error("need one MaskSet per data point");

    const std::size_t l = spec.num_weight_layers();
    ParamSet grad = zeros_like(spec);
    const double n_inv = 1.0 / static_cast<double>(data.size());

    for (std::size_t n = 0; n < data.size(); ++n) {
        const MaskSet& masks = masks_per_point[n];
        const ForwardCache cache =
            forward_cached(spec, params, masks, data.inputs.row_vec(n));

        // dE/d(output) for this point.
        Vec delta(spec.output_dim());
        if (data.classification) {
            const double lse = logsumexp(cache.output.data(), cache.output.size());
            for (std::size_t d = 0; d < delta.size(); ++d)
                delta[d] = n_inv * std::exp(cache.output[d] - lse);
            delta[data.labels[n] - 1] -= n_inv;
        } else {
            for (std::size_t d = 0; d < delta.size(); ++d)
                delta[d] = n_inv * (cache.output[d] - data.targets(n, d));
        }
        for (double& d : delta) d *= data_term_weight;

        for (std::size_t ii = l; ii-- > 0;) {
            add_outer(grad.weights[ii], 1.0, cache.masked_inputs[ii], delta);
            if (!grad.biases[ii].empty())
                for (std::size_t j = 0; j < delta.size(); ++j)
                    grad.biases[ii][j] += delta[j];
            if (ii == 0) break;

            // Back through the affine map, then the mask, feature scaling
            // and nonlinearity of the previous hidden layer.
            Vec back = matvec(params.weights[ii], delta);
            const double scale =
                spec.scale_features ? std::sqrt(1.0 / static_cast<double>(spec.widths[ii]))
                                    : 1.0;
            const Vec& pre = cache.pre_activations[ii - 1];
            Vec next(pre.size());
            for (std::size_t j = 0; j < pre.size(); ++j)
                next[j] = back[j] * masks.masks[ii][j] * scale *
                          apply_nl_deriv(spec.nonlinearity, pre[j]);
            delta = std::move(next);
        }
    }

    for (std::size_t i = 0; i < l; ++i) {
        const double lw = i < hyper.weight_decays.size() ? hyper.weight_decays[i] : 0.0;
        if (lw != 0.0)
            for (std::size_t j = 0; j < grad.weights[i].size(); ++j)
                grad.weights[i].data()[j] += 2.0 * lw * params.weights[i].data()[j];
        const double lb = i < hyper.bias_decays.size() ? hyper.bias_decays[i] : 0.0;
        if (lb != 0.0)
            for (std::size_t j = 0; j < grad.biases[i].size(); ++j)
                grad.biases[i][j] += 2.0 * lb * params.biases[i][j];
    }
    return grad;
}

Matrix scale_weights(const Matrix& w, double factor) {
    Matrix s = w;
    for (std::size_t i = 0; i < s.size(); ++i) s.data()[i] *= factor;
    return s;
}

ParamSet weight_averaged_params(const NetworkSpec& spec, const ParamSet& params,
                                const std::vector<double>& keep_probs) {
    if (keep_probs.size() != spec.num_weight_layers())
        throw std::logic_error("keep-prob count does not match weight layers");
    ParamSet out = params;
    for (std::size_t i = 0; i < out.weights.size(); ++i)
        out.weights[i] = scale_weights(out.weights[i], keep_probs[i]);
    return out;
}

ParamSet zeros_like(const NetworkSpec& spec) {
    spec.validate();
    const std::size_t l = spec.num_weight_layers();
    ParamSet p;
    for (std::size_t i = 0; i < l; ++i) {
        p.weights.emplace_back(spec.widths[i], spec.widths[i + 1]);
        const bool last = (i + 1 == l);
        p.biases.emplace_back((last && !spec.output_bias) ? 0 : spec.widths[i + 1], 0.0);
    }
    return p;
}

ParamSet init_params(const NetworkSpec& spec, RngState& rng) {
    ParamSet p = zeros_like(spec);
    for (std::size_t i = 0; i < p.weights.size(); ++i) {
        const double bound = std::sqrt(3.0 / static_cast<double>(spec.widths[i]));
        for (std::size_t j = 0; j < p.weights[i].size(); ++j)
            p.weights[i].data()[j] = bound * (2.0 * rng.next_uniform() - 1.0);
    }
    return p;
}

} // namespace dropgp
