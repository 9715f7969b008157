#include "dropgp/predict.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "dropgp/kernels.hpp"
#include "dropgp/numeric.hpp"

namespace dropgp {

namespace {
constexpr double kLog2Pi = 1.8378770664093454836;

PredictiveSummary finalize(const Vec& mean, Matrix second_moment) {
    PredictiveSummary s;
    s.mean = mean;
    const std::size_t d = mean.size();
    s.covariance = Matrix(d, d);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j)
            s.covariance(i, j) = second_moment(i, j) - mean[i] * mean[j];
    s.second_moment = std::move(second_moment);
    s.std_devs.resize(d);
    for (std::size_t i = 0; i < d; ++i)
        s.std_devs[i] = std::sqrt(std::max(0.0, s.covariance(i, i)));
    return s;
}

} // namespace

void McConfig::validate() const {
    if (samples < 1) throw std::logic_error("need at least one MC sample");
    if (tau <= 0.0) throw std::invalid_argument("tau must be > 0");
    for (double p : keep_probs)
        if (p < 0.0 || p > 1.0)
            throw std::invalid_argument("keep probabilities must lie in [0,1]");
}

PredictiveSummary mc_predict(const NetworkSpec& spec, const ParamSet& params,
                             const McConfig& cfg, const Vec& x, bool keep_samples) {
    cfg.validate();
    const std::size_t d = spec.output_dim();
    const std::size_t t = cfg.samples;

    Vec mean(d, 0.0);
    Matrix second(d, d);
    Matrix all(keep_samples ? t : 0, d);

    RngState master(cfg.master_seed, cfg.stream);
    for (std::size_t s = 0; s < t; ++s) {
        RngState rng = master.child(s);  // per-sample stream
        const MaskSet masks = sample_masks(spec, cfg.keep_probs, rng);
        const Vec y = forward(spec, params, masks, x);
        for (std::size_t i = 0; i < d; ++i) {
            mean[i] += y[i];
            for (std::size_t j = 0; j < d; ++j) second(i, j) += y[i] * y[j];
        }
        if (keep_samples)
            for (std::size_t i = 0; i < d; ++i) all(s, i) = y[i];
    }

    const double inv_t = 1.0 / static_cast<double>(t);
    for (double& v : mean) v *= inv_t;
    for (std::size_t i = 0; i < second.size(); ++i) second.data()[i] *= inv_t;
    for (std::size_t i = 0; i < d; ++i) second(i, i) += 1.0 / cfg.tau;

    PredictiveSummary out = finalize(mean, std::move(second));
    if (keep_samples) out.samples = std::move(all);
    return out;
}

PredictiveSummary enumerate_masks_oracle(const NetworkSpec& spec, const ParamSet& params,
                                         const std::vector<double>& keep_probs,
                                         double tau, const Vec& x) {
    if (tau <= 0.0) throw std::invalid_argument("tau must be > 0");
    if (keep_probs.size() != spec.num_weight_layers())
        throw std::logic_error("keep-prob count does not match weight layers");

    std::size_t bits = 0;
    for (std::size_t i = 0; i < spec.num_weight_layers(); ++i) bits += spec.widths[i];
    if (bits > 24) throw std::logic_error("mask space too large to enumerate");

    const std::size_t d = spec.output_dim();
    Vec mean(d, 0.0);
    Matrix second(d, d);
    double prob_total = 0.0;

    MaskSet masks;
    masks.keep_probs = keep_probs;
    for (std::size_t i = 0; i < spec.num_weight_layers(); ++i)
        masks.masks.emplace_back(spec.widths[i], 0.0);

    const std::uint64_t combos = 1ull << bits;
    for (std::uint64_t code = 0; code < combos; ++code) {
        double prob = 1.0;
        std::size_t bit = 0;
        for (std::size_t i = 0; i < masks.masks.size(); ++i) {
            for (std::size_t j = 0; j < masks.masks[i].size(); ++j, ++bit) {
                const bool on = (code >> bit) & 1ull;
                masks.masks[i][j] = on ? 1.0 : 0.0;
                prob *= on ? keep_probs[i] : 1.0 - keep_probs[i];
            }
        }
        prob_total += prob;
        if (prob == 0.0) continue;
        const Vec y = forward(spec, params, masks, x);
        for (std::size_t i = 0; i < d; ++i) {
            mean[i] += prob * y[i];
            for (std::size_t j = 0; j < d; ++j) second(i, j) += prob * y[i] * y[j];
        }
    }
    (void)prob_total;  // sums to 1 up to rounding; asserted in tests

    for (std::size_t i = 0; i < d; ++i) second(i, i) += 1.0 / tau;
    return finalize(mean, std::move(second));
}

double predictive_log_likelihood(const Matrix& samples, const Vec& y, double tau) {
    if (tau <= 0.0) throw std::invalid_argument("tau must be > 0");
    if (samples.rows() < 1) throw std::logic_error("need at least one sample");
    if (samples.cols() != y.size())
        throw std::logic_error("sample width does not match target");

    const std::size_t t = samples.rows();
    const double d = static_cast<double>(y.size());
    Vec terms(t);
    for (std::size_t s = 0; s < t; ++s)
        terms[s] = -0.5 * tau *
                   kernels::sq_diff_sum(y.data(), samples.row(s), y.size());
    return logsumexp(terms) - std::log(static_cast<double>(t)) - 0.5 * d * kLog2Pi -
           0.5 * d * std::log(1.0 / tau);
}

CalibrationTable CalibrationTable::from_values(std::vector<double> values) {
    for (double v : values)
        if (v < 0.0) throw std::invalid_argument("std-devs must be >= 0");
    std::sort(values.begin(), values.end());
    return CalibrationTable{std::move(values)};
}

double calibration_percentile(const CalibrationTable& table, double new_std) {
    if (table.stds.empty()) throw std::logic_error("calibration table is empty");
    if (new_std < 0.0) throw std::invalid_argument("std must be >= 0");
    const auto& v = table.stds;
    const double n = static_cast<double>(v.size());
    if (new_std < v.front()) return 0.0;
    if (new_std >= v.back()) return 1.0;
    // Linear interpolation between the order statistics (v[i], (i+1)/n).
    const auto it = std::upper_bound(v.begin(), v.end(), new_std);
    const std::size_t i = static_cast<std::size_t>(it - v.begin()) - 1;
    const double lo = v[i], hi = v[i + 1];
    const double frac = hi > lo ? (new_std - lo) / (hi - lo) : 0.0;
    return (static_cast<double>(i + 1) + frac) / n;
}

double pooled_std(const PredictiveSummary& summary) {
    double s = 0.0;
    for (double v : summary.std_devs) s += v;
    return s / static_cast<double>(summary.std_devs.size());
}

} // namespace dropgp
