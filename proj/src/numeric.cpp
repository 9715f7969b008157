#include "dropgp/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dropgp {

double logsumexp(const double* values, std::size_t n) {
    if (n == 0) throw std::invalid_argument("logsumexp: empty input");
    const double m = *std::max_element(values, values + n);
    if (!std::isfinite(m)) return m;  // all -inf, or a +inf/nan dominates
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += std::exp(values[i] - m);
    return m + std::log(s);
}

double logsumexp(const std::vector<double>& values) {
    return logsumexp(values.data(), values.size());
}

std::vector<double> sample_bernoulli_vector(double p, std::size_t dim, RngState& rng) {
    if (p < 0.0 || p > 1.0)
        throw std::invalid_argument("bernoulli p must lie in [0,1]");
    std::vector<double> v(dim);
    for (double& x : v) x = rng.next_uniform() < p ? 1.0 : 0.0;
    return v;
}

} // namespace dropgp
