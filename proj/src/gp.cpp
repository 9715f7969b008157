#include "dropgp/gp.hpp"

#include <cmath>
#include <stdexcept>

#include "dropgp/kernels.hpp"

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

// Per-layer decay sum: weight layers get coef_w[i] * ||W_i||^2, biases get
// coef_b[i] * ||b_i||^2, everything divided by denom.
double decay_sum(const ParamSet& params, const std::vector<double>& coef_w,
                 const std::vector<double>& coef_b, double denom) {
    double s = 0.0;
    for (std::size_t i = 0; i < params.weights.size(); ++i) {
        s += coef_w[i] * frobenius_sq(params.weights[i]);
        if (!params.biases[i].empty()) s += coef_b[i] * norm_sq(params.biases[i]);
    }
    return s / denom;
}

std::vector<double> keep_probs_of(const std::vector<MaskSet>& masks_per_point,
                                  std::size_t layers) {
    if (masks_per_point.empty() || masks_per_point.front().keep_probs.size() != layers)
        throw std::logic_error("masks missing keep probabilities");
    return masks_per_point.front().keep_probs;
}

} // namespace

Vec feature_map(const Vec& x, const Matrix& w1, const Vec& b, Nonlinearity nl) {
    if (x.size() != w1.rows() || b.size() != w1.cols())
        throw std::logic_error("feature_map: shape mismatch");
    Vec a = vecmat(x, w1);
    const double scale = std::sqrt(1.0 / static_cast<double>(w1.cols()));
    for (std::size_t k = 0; k < a.size(); ++k)
        a[k] = scale * apply_nl(nl, a[k] + b[k]);
    return a;
}

Matrix feature_matrix(const Matrix& x, const Matrix& w1, const Vec& b, Nonlinearity nl) {
    Matrix phi(x.rows(), w1.cols());
    for (std::size_t n = 0; n < x.rows(); ++n) {
        const Vec f = feature_map(x.row_vec(n), w1, b, nl);
        for (std::size_t k = 0; k < f.size(); ++k) phi(n, k) = f[k];
    }
    return phi;
}

Matrix finite_rank_covariance(const Matrix& x, const Matrix& w1, const Vec& b,
                              Nonlinearity nl) {
    if (x.rows() == 0) throw std::logic_error("finite_rank_covariance: empty X");
    const Matrix phi = feature_matrix(x, w1, b, nl);
    Matrix k(x.rows(), x.rows());
    for (std::size_t i = 0; i < x.rows(); ++i)
        for (std::size_t j = 0; j <= i; ++j) {
            const double v = kernels::dot(phi.row(i), phi.row(j), phi.cols());
            k(i, j) = v;
            k(j, i) = v;
        }
    return k;
}

RealisedWeights reparametrise(const Matrix& m1, const Matrix& m2, const Vec& m,
                              const ReparamDraw& draw) {
    if (draw.sigma < 0.0) throw std::invalid_argument("sigma must be >= 0");
    if (draw.masks.masks.size() != 2)
        throw std::logic_error("reparametrise: expected two mask vectors");
    const Vec& z1 = draw.masks.masks[0];
    const Vec& z2 = draw.masks.masks[1];
    if (z1.size() != m1.rows() || z2.size() != m2.rows())
        throw std::logic_error("reparametrise: mask lengths do not match");

    RealisedWeights rw;
    rw.w1 = Matrix(m1.rows(), m1.cols());
    rw.w2 = Matrix(m2.rows(), m2.cols());
    rw.b = m;

    // Row q: z_q (M + sigma eps) + (1 - z_q) sigma eps = z_q M + sigma eps.
    for (std::size_t q = 0; q < m1.rows(); ++q)
        for (std::size_t k = 0; k < m1.cols(); ++k)
            rw.w1(q, k) = z1[q] * m1(q, k) + draw.sigma * draw.eps1(q, k);
    for (std::size_t k = 0; k < m2.rows(); ++k)
        for (std::size_t d = 0; d < m2.cols(); ++d)
            rw.w2(k, d) = z2[k] * m2(k, d) + draw.sigma * draw.eps2(k, d);
    if (draw.sigma != 0.0)
        for (std::size_t k = 0; k < m.size(); ++k)
            rw.b[k] += draw.sigma * draw.eps[k];
    return rw;
}

double gp_mc_objective_regression(const NetworkSpec& spec, const ParamSet& params,
                                  const HyperParams& hyper, const Dataset& data,
                                  const std::vector<MaskSet>& masks_per_point) {
    if (hyper.tau <= 0.0) throw std::invalid_argument("tau must be > 0");
    const std::size_t l = spec.num_weight_layers();
    const std::vector<double> p = keep_probs_of(masks_per_point, l);
    const double n = static_cast<double>(data.size());

    HyperParams no_decay = hyper;
    no_decay.weight_decays.assign(l, 0.0);
    no_decay.bias_decays.assign(l, 0.0);
    const double data_term =
        dropout_cost(spec, params, no_decay, data, masks_per_point);

    const std::vector<double> ones(l, 1.0);
    return -data_term - decay_sum(params, p, ones, 2.0 * hyper.tau * n);
}

double gp_mc_objective_classification(const NetworkSpec& spec, const ParamSet& params,
                                      const HyperParams& hyper, const Dataset& data,
                                      const std::vector<MaskSet>& masks_per_point) {
    const std::size_t l = spec.num_weight_layers();
    const std::vector<double> p = keep_probs_of(masks_per_point, l);
    const double n = static_cast<double>(data.size());

    HyperParams no_decay = hyper;
    no_decay.weight_decays.assign(l, 0.0);
    no_decay.bias_decays.assign(l, 0.0);
    const double data_term =
        dropout_cost(spec, params, no_decay, data, masks_per_point);

    const std::vector<double> ones(l, 1.0);
    return -data_term - decay_sum(params, p, ones, 2.0 * n);
}

double tau_from_weight_decay(double l, double p1, std::size_t n, double lambda1) {
    if (l <= 0.0 || p1 <= 0.0 || p1 > 1.0 || n == 0 || lambda1 <= 0.0)
        throw std::invalid_argument("tau_from_weight_decay: arguments must be positive");
    return l * l * p1 / (2.0 * static_cast<double>(n) * lambda1);
}

double weight_decay_from_tau(double l, double p1, std::size_t n, double tau) {
    if (l <= 0.0 || p1 <= 0.0 || p1 > 1.0 || n == 0 || tau <= 0.0)
        throw std::invalid_argument("weight_decay_from_tau: arguments must be positive");
    return l * l * p1 / (2.0 * static_cast<double>(n) * tau);
}

double lengthscale_objective_regression(const NetworkSpec& spec, const ParamSet& params,
                                        const HyperParams& hyper, const Dataset& data,
                                        const std::vector<MaskSet>& masks_per_point,
                                        double l, double l_prime, bool k_scaling) {
    if (l <= 0.0 || l_prime <= 0.0)
        throw std::invalid_argument("length-scales must be > 0");
    if (hyper.tau <= 0.0) throw std::invalid_argument("tau must be > 0");
    const std::size_t layers = spec.num_weight_layers();
    const std::vector<double> p = keep_probs_of(masks_per_point, layers);
    const double n = static_cast<double>(data.size());

    HyperParams no_decay = hyper;
    no_decay.weight_decays.assign(layers, 0.0);
    no_decay.bias_decays.assign(layers, 0.0);
    const double data_term =
        dropout_cost(spec, params, no_decay, data, masks_per_point);

    std::vector<double> cw(layers), cb(layers, l_prime * l_prime);
    for (std::size_t i = 0; i < layers; ++i) {
        if (i == 0)
            cw[i] = l * l * p[i];
        else
            cw[i] = (k_scaling ? static_cast<double>(spec.widths[i]) : 1.0) * p[i];
    }
    return -data_term - decay_sum(params, cw, cb, 2.0 * hyper.tau * n);
}

DeepGpSample deep_two_layer_sample(std::size_t k1, std::size_t k2, std::size_t d,
                                   const Matrix& x, Nonlinearity nl1, Nonlinearity nl2,
                                   RngState& rng) {
    const std::size_t q = x.cols();
    DeepGpSample s;
    s.w1 = sample_gaussian_matrix(q, k1, 0.0, 1.0, rng);
    s.b1 = sample_gaussian_vector(k1, 0.0, 1.0, rng);
    s.b2 = sample_gaussian_vector(k2, 0.0, 1.0, rng);
    s.w2 = sample_gaussian_matrix(k1, k2, 0.0, 1.0, rng);
    s.w3 = sample_gaussian_matrix(k2, d, 0.0, 1.0, rng);

    s.phi1 = feature_matrix(x, s.w1, s.b1, nl1);
    s.f1 = matmul(s.phi1, s.w2);
    s.phi2 = second_layer_features(s.f1, s.b2, nl2);
    s.f2 = matmul(s.phi2, s.w3);
    return s;
}

Matrix second_layer_features(const Matrix& f1, const Vec& b2, Nonlinearity nl2) {
    if (b2.size() != f1.cols())
        throw std::logic_error("second_layer_features: bias length mismatch");
    Matrix phi2(f1.rows(), f1.cols());
    const double scale = std::sqrt(1.0 / static_cast<double>(f1.cols()));
    for (std::size_t i = 0; i < f1.rows(); ++i)
        for (std::size_t k = 0; k < f1.cols(); ++k)
            phi2(i, k) = scale * apply_nl(nl2, f1(i, k) + b2[k]);
    return phi2;
}

} // namespace dropgp
