#include "dropgp/klmix.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "dropgp/kernels.hpp"
#include "dropgp/linalg.hpp"
#include "dropgp/numeric.hpp"

namespace dropgp {

namespace {
constexpr double kLog2Pi = 1.8378770664093454836;
}

Covariance Covariance::isotropic(std::size_t dim, double variance) {
    if (variance < 0.0) throw std::invalid_argument("variance must be >= 0");
    Covariance c;
    c.kind_ = Kind::isotropic;
    c.dim_ = dim;
    c.iso_var_ = variance;
    return c;
}

Covariance Covariance::diagonal(Vec variances) {
    for (double v : variances)
        if (v < 0.0) throw std::invalid_argument("variance must be >= 0");
    Covariance c;
    c.kind_ = Kind::diagonal;
    c.dim_ = variances.size();
    c.diag_ = std::move(variances);
    return c;
}

Covariance Covariance::full(Matrix sigma) {
    if (sigma.rows() != sigma.cols())
        throw std::logic_error("covariance must be square");
    Covariance c;
    c.kind_ = Kind::full;
    c.dim_ = sigma.rows();
    c.full_ = std::move(sigma);
    return c;
}

const Matrix& Covariance::chol() const {
    if (!chol_ready_) {
        chol_ = cholesky(full_);
        chol_ready_ = true;
    }
    return chol_;
}

double Covariance::trace() const {
    switch (kind_) {
        case Kind::isotropic: return iso_var_ * static_cast<double>(dim_);
        case Kind::diagonal: {
            double s = 0.0;
            for (double v : diag_) s += v;
            return s;
        }
        case Kind::full: {
            double s = 0.0;
            for (std::size_t i = 0; i < dim_; ++i) s += full_(i, i);
            return s;
        }
    }
    return 0.0;
}

double Covariance::logdet() const {
    switch (kind_) {
        case Kind::isotropic:
            if (iso_var_ <= 0.0)
                throw std::invalid_argument("logdet of singular covariance");
            return static_cast<double>(dim_) * std::log(iso_var_);
        case Kind::diagonal: {
            double s = 0.0;
            for (double v : diag_) {
                if (v <= 0.0)
                    throw std::invalid_argument("logdet of singular covariance");
                s += std::log(v);
            }
            return s;
        }
        case Kind::full:
            return logdet_spd(full_);
    }
    return 0.0;
}

Vec Covariance::transform(const Vec& eps) const {
    if (eps.size() != dim_) throw std::logic_error("transform: dimension mismatch");
    switch (kind_) {
        case Kind::isotropic: {
            const double s = std::sqrt(iso_var_);
            Vec x(eps);
            for (double& v : x) v *= s;
            return x;
        }
        case Kind::diagonal: {
            Vec x(dim_);
            for (std::size_t i = 0; i < dim_; ++i) x[i] = std::sqrt(diag_[i]) * eps[i];
            return x;
        }
        case Kind::full: {
            const Matrix& l = chol();
            Vec x(dim_);
            for (std::size_t i = 0; i < dim_; ++i)
                x[i] = kernels::dot(l.row(i), eps.data(), i + 1);
            return x;
        }
    }
    return eps;
}

double Covariance::mahalanobis_sq(const Vec& diff) const {
    if (diff.size() != dim_) throw std::logic_error("mahalanobis: dimension mismatch");
    switch (kind_) {
        case Kind::isotropic:
            return kernels::sum_sq(diff.data(), diff.size()) / iso_var_;
        case Kind::diagonal: {
            double s = 0.0;
            for (std::size_t i = 0; i < dim_; ++i) s += diff[i] * diff[i] / diag_[i];
            return s;
        }
        case Kind::full: {
            const Vec y = forward_solve(chol(), diff);
            return kernels::sum_sq(y.data(), y.size());
        }
    }
    return 0.0;
}

void MixtureSpec::validate() const {
    if (weights.empty() || weights.size() != means.size() ||
        weights.size() != covariances.size())
        throw std::logic_error("mixture: component counts disagree");
    double sum = 0.0;
    for (double w : weights) {
        if (w < 0.0) throw std::invalid_argument("mixture weights must be >= 0");
        sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-12)
        throw std::invalid_argument("mixture weights must sum to 1");
    const std::size_t k = means.front().size();
    for (std::size_t i = 0; i < means.size(); ++i)
        if (means[i].size() != k || covariances[i].dim() != k)
            throw std::logic_error("mixture: dimensions disagree");
}

double kl_mog_approx(const MixtureSpec& q) {
    q.validate();
    const double k = static_cast<double>(q.dim());
    double total = 0.0;
    double entropy_c = 0.0;
    for (std::size_t i = 0; i < q.weights.size(); ++i) {
        const double p = q.weights[i];
        if (p > 0.0) entropy_c -= p * std::log(p);
        if (p == 0.0) continue;
        total += 0.5 * p *
                 (norm_sq(q.means[i]) + q.covariances[i].trace() -
                  k * (1.0 + kLog2Pi) - q.covariances[i].logdet());
    }
    return total - entropy_c;
}

double analytic_gaussian_kl(const Vec& mu, const Covariance& sigma, double prior_scale) {
    if (prior_scale <= 0.0) throw std::invalid_argument("prior scale must be > 0");
    const double l2 = prior_scale * prior_scale;
    const double k = static_cast<double>(mu.size());
    return 0.5 * (l2 * norm_sq(mu) + l2 * sigma.trace() - k - sigma.logdet() +
                  k * std::log(1.0 / l2));
}

double kl_mog_approx_lengthscale(const MixtureSpec& q, double l) {
    q.validate();
    if (l <= 0.0) throw std::invalid_argument("length-scale must be > 0");
    double total = 0.0;
    for (std::size_t i = 0; i < q.weights.size(); ++i) {
        if (q.weights[i] == 0.0) continue;
        total += q.weights[i] *
                 analytic_gaussian_kl(q.means[i], q.covariances[i], l);
    }
    return total;
}

DropoutKlTerms dropout_kl_terms(const Matrix& m1, const Matrix& m2, const Vec& m,
                                double sigma, double p1, double p2,
                                bool main_text_constant) {
    if (sigma < 0.0) throw std::invalid_argument("sigma must be >= 0");
    if (p1 < 0.0 || p1 > 1.0 || p2 < 0.0 || p2 > 1.0)
        throw std::invalid_argument("keep probabilities must lie in [0,1]");

    const double inf = std::numeric_limits<double>::infinity();
    const double s2 = sigma * sigma;
    const double per_dim =
        sigma > 0.0 ? (s2 - std::log(s2) - 1.0) : inf;
    // The row-wise closed form gives the 1/2; the compatibility flag drops it.
    const double factor = main_text_constant ? 1.0 : 0.5;

    DropoutKlTerms t{};
    t.w1_mean = 0.5 * p1 * frobenius_sq(m1);
    t.w1_sigma = factor * static_cast<double>(m1.rows() * m1.cols()) * per_dim;
    t.w2_mean = 0.5 * p2 * frobenius_sq(m2);
    t.w2_sigma = factor * static_cast<double>(m2.rows() * m2.cols()) * per_dim;
    t.b_mean = 0.5 * norm_sq(m);
    t.b_sigma = 0.5 * static_cast<double>(m.size()) * per_dim;
    return t;
}

McKlEstimate mc_kl_oracle(const MixtureSpec& q, double prior_scale, std::size_t samples,
                          RngState& rng) {
    q.validate();
    if (prior_scale <= 0.0) throw std::invalid_argument("prior scale must be > 0");
    if (samples < 1000) throw std::invalid_argument("need at least 1000 samples");

    const std::size_t k = q.dim();
    const std::size_t ncomp = q.weights.size();
    const double l2 = prior_scale * prior_scale;

    // Precompute per-component log-density constants.
    std::vector<double> log_w(ncomp), logdet(ncomp);
    for (std::size_t i = 0; i < ncomp; ++i) {
        log_w[i] = q.weights[i] > 0.0 ? std::log(q.weights[i])
                                      : -std::numeric_limits<double>::infinity();
        logdet[i] = q.covariances[i].logdet();
    }
    const double kd = static_cast<double>(k);
    // log p_l(x) = -K/2 log 2pi + K log l - l^2/2 x.x
    const double log_p_const = -0.5 * kd * kLog2Pi + kd * std::log(prior_scale);

    // Batch means for the standard error.
    const std::size_t nbatch = 100;
    std::vector<double> batch_sum(nbatch, 0.0);
    std::vector<std::size_t> batch_count(nbatch, 0);

    Vec eps(k), x(k), diff(k), comp_logs(ncomp);
    for (std::size_t s = 0; s < samples; ++s) {
        // Pick a component, then x = mu_i + L_i eps.
        const double u = rng.next_uniform();
        std::size_t ci = 0;
        double acc = 0.0;
        for (std::size_t i = 0; i < ncomp; ++i) {
            acc += q.weights[i];
            if (u < acc) { ci = i; break; }
            ci = i;
        }
        for (std::size_t j = 0; j < k; ++j) eps[j] = rng.next_gaussian();
        const Vec noise = q.covariances[ci].transform(eps);
        for (std::size_t j = 0; j < k; ++j) x[j] = q.means[ci][j] + noise[j];

        for (std::size_t i = 0; i < ncomp; ++i) {
            for (std::size_t j = 0; j < k; ++j) diff[j] = x[j] - q.means[i][j];
            comp_logs[i] = log_w[i] - 0.5 * (kd * kLog2Pi + logdet[i] +
                                             q.covariances[i].mahalanobis_sq(diff));
        }
        const double log_q = logsumexp(comp_logs);
        const double log_p =
            log_p_const - 0.5 * l2 * kernels::sum_sq(x.data(), x.size());

        const std::size_t b = s % nbatch;
        batch_sum[b] += log_q - log_p;
        batch_count[b] += 1;
    }

    double grand = 0.0;
    for (std::size_t b = 0; b < nbatch; ++b) grand += batch_sum[b];
    grand /= static_cast<double>(samples);

    double var = 0.0;
    std::size_t used = 0;
    for (std::size_t b = 0; b < nbatch; ++b) {
        if (batch_count[b] == 0) continue;
        const double mb = batch_sum[b] / static_cast<double>(batch_count[b]);
        var += (mb - grand) * (mb - grand);
        used += 1;
    }
    var /= static_cast<double>(used > 1 ? used - 1 : 1);

    return {grand, std::sqrt(var / static_cast<double>(used))};
}

} // namespace dropgp
