#include "dropgp/linalg.hpp"

#include <cmath>
#include <stdexcept>

#include "dropgp/kernels.hpp"

namespace dropgp {

Matrix cholesky(const Matrix& a) {
    if (a.rows() != a.cols())
        throw std::logic_error("cholesky: matrix not square");
    const std::size_t n = a.rows();
    double max_diag = 0.0;
    for (std::size_t i = 0; i < n; ++i) max_diag = std::max(max_diag, a(i, i));
    const double floor = 1e-12 * std::max(max_diag, 1.0);

    Matrix l(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            double s = a(i, j) - kernels::dot(l.row(i), l.row(j), j);
            if (i == j) {
                if (s < floor)
                    throw std::invalid_argument("cholesky: matrix not positive definite");
                l(i, i) = std::sqrt(s);
            } else {
                l(i, j) = s / l(j, j);
            }
        }
    }
    return l;
}

double logdet_spd(const Matrix& a) {
    const Matrix l = cholesky(a);
    double s = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i) s += std::log(l(i, i));
    return 2.0 * s;
}

Vec forward_solve(const Matrix& l, const Vec& b) {
    if (l.rows() != b.size())
        throw std::logic_error("forward_solve: dimension mismatch");
    Vec y(b.size());
    for (std::size_t i = 0; i < b.size(); ++i)
        y[i] = (b[i] - kernels::dot(l.row(i), y.data(), i)) / l(i, i);
    return y;
}

} // namespace dropgp
