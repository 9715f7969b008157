#pragma once

// MC-dropout prediction: T stochastic forward passes give the predictive
// mean, the second moment tau^-1 I + average outer product, and the
// covariance; plus an exhaustive-mask oracle, the log-likelihood of a
// target under the sample mixture, and calibration percentiles.

#include <cstdint>
#include <optional>

#include "dropgp/network.hpp"

namespace dropgp {

struct McConfig {
    std::size_t samples = 1000;          // T
    std::uint64_t master_seed = 0;
    std::uint64_t stream = 0;            // distinct per input point
    std::vector<double> keep_probs;      // per weight layer
    double tau = 1.0;

    void validate() const;
};

struct PredictiveSummary {
    Vec mean;                       // D
    Matrix second_moment;           // D x D, tau^-1 I + E[yhat yhat^T]
    Matrix covariance;              // second_moment - mean mean^T
    Vec std_devs;                   // sqrt of covariance diagonal (clamped at 0)
    std::optional<Matrix> samples;  // T x D when requested
};

PredictiveSummary mc_predict(const NetworkSpec& spec, const ParamSet& params,
                             const McConfig& cfg, const Vec& x,
                             bool keep_samples = false);

// Exact predictive moments by enumerating every mask combination, weighted by
// the Bernoulli product measure. Total mask bits must be <= 24.
PredictiveSummary enumerate_masks_oracle(const NetworkSpec& spec, const ParamSet& params,
                                         const std::vector<double>& keep_probs,
                                         double tau, const Vec& x);

// logsumexp_t(-tau/2 ||y - yhat_t||^2) - log T - D/2 log 2pi - D/2 log tau^-1
double predictive_log_likelihood(const Matrix& samples, const Vec& y, double tau);

// Sorted training-set predictive uncertainty (one scalar per point:
// the mean of the per-output std-devs).
struct CalibrationTable {
    std::vector<double> stds;  // kept sorted ascending

    static CalibrationTable from_values(std::vector<double> values);
    std::size_t count() const { return stds.size(); }
};

// Empirical CDF value with linear interpolation between order statistics.
double calibration_percentile(const CalibrationTable& table, double new_std);

// Per-point uncertainty scalar used for calibration.
double pooled_std(const PredictiveSummary& summary);

} // namespace dropgp
