#pragma once

// KL divergence machinery for Gaussian mixtures against a standard (or
// length-scaled) normal prior: the large-K closed-form approximation, the
// analytic single-Gaussian KL, the dropout-specific per-row terms, and a
// Monte Carlo oracle.

#include <cstddef>
#include <vector>

#include "dropgp/matrix.hpp"
#include "dropgp/rng.hpp"

namespace dropgp {

// Component covariance with isotropic / diagonal fast paths.
class Covariance {
public:
    static Covariance isotropic(std::size_t dim, double variance);
    static Covariance diagonal(Vec variances);
    static Covariance full(Matrix sigma);

    std::size_t dim() const { return dim_; }
    double trace() const;
    double logdet() const;  // throws std::invalid_argument when singular
    // x = mu + L eps with L L^T = Sigma.
    Vec transform(const Vec& eps) const;
    // (x - mu)^T Sigma^-1 (x - mu)
    double mahalanobis_sq(const Vec& diff) const;

private:
    enum class Kind { isotropic, diagonal, full };
    Kind kind_ = Kind::isotropic;
    std::size_t dim_ = 0;
    double iso_var_ = 1.0;
    Vec diag_;
    Matrix full_;
    mutable Matrix chol_;          // cached factor for the full case
    mutable bool chol_ready_ = false;
    const Matrix& chol() const;
};

struct MixtureSpec {
    std::vector<double> weights;
    std::vector<Vec> means;
    std::vector<Covariance> covariances;

    std::size_t dim() const { return means.empty() ? 0 : means.front().size(); }
    void validate() const;  // weights sum to 1, consistent dims
};

// Large-K closed form against N(0, I_K):
//   sum_i p_i/2 (mu_i.mu_i + tr Sigma_i - K(1 + log 2pi) - log|Sigma_i|) - C,
// C = -sum_i p_i log p_i (0 log 0 = 0). True KL plus an unreported constant.
double kl_mog_approx(const MixtureSpec& q);

// Exact KL( N(mu, Sigma) || N(0, l^-2 I) ):
//   1/2 (l^2 mu.mu + tr(l^2 Sigma) - K - log|Sigma| + K log l^-2)
double analytic_gaussian_kl(const Vec& mu, const Covariance& sigma, double prior_scale);

// Length-scale variant matching the closed-form display (constant omitted):
//   sum_i p_i/2 (l^2 mu_i.mu_i + tr(l^2 Sigma_i) - K - log|Sigma_i| + K log l^-2)
double kl_mog_approx_lengthscale(const MixtureSpec& q, double l);

// Per-factor KL terms for the dropout variational family. The sigma parts
// use the 1/2 factor implied by the row-wise closed form; the compatibility
// flag reproduces the constant without the 1/2. sigma = 0 makes the sigma
// parts +infinity while the mean parts stay valid.
struct DropoutKlTerms {
    double w1_mean, w1_sigma;
    double w2_mean, w2_sigma;
    double b_mean, b_sigma;
    double w1() const { return w1_mean + w1_sigma; }
    double w2() const { return w2_mean + w2_sigma; }
    double b() const { return b_mean + b_sigma; }
};
DropoutKlTerms dropout_kl_terms(const Matrix& m1, const Matrix& m2, const Vec& m,
                                double sigma, double p1, double p2,
                                bool main_text_constant = false);

struct McKlEstimate {
    double estimate;
    double std_error;  // batch-means standard error
};

// (1/S) sum_s [log q(x_s) - log p_l(x_s)], x_s ~ q, component log-densities
// combined with logsumexp.
McKlEstimate mc_kl_oracle(const MixtureSpec& q, double prior_scale, std::size_t samples,
                          RngState& rng);

} // namespace dropgp
