#pragma once

#include <cstddef>
#include <vector>

#include "dropgp/rng.hpp"

namespace dropgp {

// log sum_i exp(v[i]), max-shifted so nothing overflows for |v[i]| <= ~700.
double logsumexp(const std::vector<double>& values);
double logsumexp(const double* values, std::size_t n);

// 0/1 entries, each 1 with probability p.
std::vector<double> sample_bernoulli_vector(double p, std::size_t dim, RngState& rng);

} // namespace dropgp
