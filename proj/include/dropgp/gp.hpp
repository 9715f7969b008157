#pragma once

// Gaussian-process side of the dropout equivalence: the finite-rank feature
// map and covariance, reparametrised weights, the MC variational objectives
// for regression and classification, the precision <-> weight-decay algebra,
// and the two-hidden-layer deep GP generative sampler.

#include "dropgp/network.hpp"

namespace dropgp {

// phi(x) = sqrt(1/K) sigma(W1^T x + b), a length-K row vector.
Vec feature_map(const Vec& x, const Matrix& w1, const Vec& b, Nonlinearity nl);

// Khat(x_i, x_j) = 1/K sum_k sigma(w_k.x_i + b_k) sigma(w_k.x_j + b_k);
// equals Phi Phi^T exactly.
Matrix finite_rank_covariance(const Matrix& x, const Matrix& w1, const Vec& b,
                              Nonlinearity nl);
Matrix feature_matrix(const Matrix& x, const Matrix& w1, const Vec& b, Nonlinearity nl);

struct ReparamDraw {
    Matrix eps1;   // Q x K
    Matrix eps2;   // K x D
    Vec eps;       // K
    MaskSet masks; // z1 (length Q), z2 (length K)
    double sigma = 0.0;
};

struct RealisedWeights {
    Matrix w1;
    Matrix w2;
    Vec b;
};

// W1 = z1 (M1 + sigma eps1) + (1 - z1) sigma eps1, row-wise; likewise W2;
// b = m + sigma eps. sigma = 0 collapses to (z1 M1, z2 M2, m) exactly.
RealisedWeights reparametrise(const Matrix& m1, const Matrix& m2, const Vec& m,
                              const ReparamDraw& draw);

// -(1/2N) sum ||y_n - yhat_n||^2 - (p_i / 2 tau N) ||M_i||^2 terms
// - (1 / 2 tau N) ||m_i||^2 terms, with yhat from the masked forward pass.
double gp_mc_objective_regression(const NetworkSpec& spec, const ParamSet& params,
                                  const HyperParams& hyper, const Dataset& data,
                                  const std::vector<MaskSet>& masks_per_point);

// (1/N) sum log softmax(yhat_n)[c_n] - (p_i / 2N) ||M_i||^2 - (1/2N) ||m_i||^2.
double gp_mc_objective_classification(const NetworkSpec& spec, const ParamSet& params,
                                      const HyperParams& hyper, const Dataset& data,
                                      const std::vector<MaskSet>& masks_per_point);

// tau = l^2 p1 / (2 N lambda1) and its inverse.
double tau_from_weight_decay(double l, double p1, std::size_t n, double lambda1);
double weight_decay_from_tau(double l, double p1, std::size_t n, double tau);

// Length-scale variant of the regression objective: decay weights
// l^2 p1 on M1, (K) p2 on M2, l'^2 on the bias.
double lengthscale_objective_regression(const NetworkSpec& spec, const ParamSet& params,
                                        const HyperParams& hyper, const Dataset& data,
                                        const std::vector<MaskSet>& masks_per_point,
                                        double l, double l_prime, bool k_scaling);

struct DeepGpSample {
    Matrix w1;   // Q x K1
    Vec b1;      // K1
    Vec b2;      // K2 bias of the second covariance
    Matrix w2;   // K1 x K2
    Matrix w3;   // K2 x D
    Matrix phi1; // N x K1
    Matrix f1;   // N x K2, = Phi1 W2
    Matrix phi2; // N x K2
    Matrix f2;   // N x D predictive mean (noise tau^-1 I on top)
};

// Priors: columns of W1, W2, W3 standard normal; b1, b2 standard normal.
DeepGpSample deep_two_layer_sample(std::size_t k1, std::size_t k2, std::size_t d,
                                   const Matrix& x, Nonlinearity nl1, Nonlinearity nl2,
                                   RngState& rng);

// Phi2 entries sqrt(1/K2) sigma2(f1[n,k] + b2[k]).
Matrix second_layer_features(const Matrix& f1, const Vec& b2, Nonlinearity nl2);

} // namespace dropgp
