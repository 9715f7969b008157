#include "dropgp/kernels.hpp"

#include <cstdlib>
#include <stdexcept>
#include <string>

namespace dropgp::kernels {

namespace detail {

double dot_scalar(const double* a, const double* b, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
    return s;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

double sum_sq_scalar(const double* x, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i] * x[i];
    return s;
}

double sq_diff_sum_scalar(const double* a, const double* b, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

} // namespace detail

namespace {

bool avx2_supported() {
#if defined(__x86_64__) || defined(_M_X64)
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

Backend pick_default() {
    if (const char* env = std::getenv("DROPGP_BACKEND")) {
        const std::string v(env);
        if (v == "scalar") return Backend::scalar;
        if (v == "avx2" && avx2_supported()) return Backend::avx2;
    }
    return avx2_supported() ? Backend::avx2 : Backend::scalar;
}

Backend g_backend = pick_default();

} // namespace

Backend active_backend() { return g_backend; }

const char* backend_name(Backend b) {
    return b == Backend::avx2 ? "avx2" : "scalar";
}

void force_backend(Backend b) {
    if (b == Backend::avx2 && !avx2_supported())
        throw std::invalid_argument("avx2 backend not supported on this CPU");
    g_backend = b;
}

double dot(const double* a, const double* b, std::size_t n) {
#if defined(__x86_64__) || defined(_M_X64)
    if (g_backend == Backend::avx2) return detail::dot_avx2(a, b, n);
#endif
    return detail::dot_scalar(a, b, n);
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
#if defined(__x86_64__) || defined(_M_X64)
    if (g_backend == Backend::avx2) return detail::axpy_avx2(alpha, x, y, n);
#endif
    detail::axpy_scalar(alpha, x, y, n);
}

double sum_sq(const double* x, std::size_t n) {
#if defined(__x86_64__) || defined(_M_X64)
    if (g_backend == Backend::avx2) return detail::sum_sq_avx2(x, n);
#endif
    return detail::sum_sq_scalar(x, n);
}

double sq_diff_sum(const double* a, const double* b, std::size_t n) {
#if defined(__x86_64__) || defined(_M_X64)
    if (g_backend == Backend::avx2) return detail::sq_diff_sum_avx2(a, b, n);
#endif
    return detail::sq_diff_sum_scalar(a, b, n);
}

} // namespace dropgp::kernels
