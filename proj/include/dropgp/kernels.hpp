#pragma once

// Dense inner-loop kernels with a scalar reference implementation and an
// AVX2/FMA variant selected at runtime. All higher-level code goes through
// these entry points so the two backends can be equivalence-tested directly.

#include <cstddef>
#include <string>

namespace dropgp::kernels {

enum class Backend {
    scalar,
    avx2,
};

// Backend chosen at startup: AVX2 when the CPU supports it, unless the
// DROPGP_BACKEND environment variable ("scalar" or "avx2") says otherwise.
Backend active_backend();
const char* backend_name(Backend b);

// Force a backend (throws std::invalid_argument if unsupported on this CPU).
void force_backend(Backend b);

// sum_i a[i] * b[i]
double dot(const double* a, const double* b, std::size_t n);

// y[i] += alpha * x[i]
void axpy(double alpha, const double* x, double* y, std::size_t n);

// sum_i x[i]^2
double sum_sq(const double* x, std::size_t n);

// sum_i (a[i] - b[i])^2
double sq_diff_sum(const double* a, const double* b, std::size_t n);

namespace detail {
double dot_scalar(const double* a, const double* b, std::size_t n);
void axpy_scalar(double alpha, const double* x, double* y, std::size_t n);
double sum_sq_scalar(const double* x, std::size_t n);
double sq_diff_sum_scalar(const double* a, const double* b, std::size_t n);

#if defined(__x86_64__) || defined(_M_X64)
double dot_avx2(const double* a, const double* b, std::size_t n);
void axpy_avx2(double alpha, const double* x, double* y, std::size_t n);
double sum_sq_avx2(const double* x, std::size_t n);
double sq_diff_sum_avx2(const double* a, const double* b, std::size_t n);
#endif
} // namespace detail

} // namespace dropgp::kernels
