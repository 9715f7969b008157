#include "dropgp/matrix.hpp"

#include <cmath>
#include <stdexcept>

#include "dropgp/kernels.hpp"

namespace dropgp {

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Matrix Matrix::from_rows(const std::vector<Vec>& rows) {
    if (rows.empty()) return {};
    Matrix m(rows.size(), rows[0].size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != m.cols())
            throw std::logic_error("from_rows: ragged rows");
        for (std::size_t j = 0; j < m.cols(); ++j) m(i, j) = rows[i][j];
    }
    return m;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows())
        throw std::logic_error("matmul: inner dimensions disagree");
    Matrix c(a.rows(), b.cols());
    // ikj order so the inner update is a contiguous axpy over B's rows.
    for (std::size_t i = 0; i < a.rows(); ++i) {
        double* ci = c.row(i);
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            if (aik != 0.0) kernels::axpy(aik, b.row(k), ci, b.cols());
        }
    }
    return c;
}

Matrix transpose(const Matrix& a) {
    Matrix t(a.cols(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
    return t;
}

double frobenius_sq(const Matrix& a) {
    return kernels::sum_sq(a.data(), a.size());
}

double norm_sq(const Vec& v) {
    return kernels::sum_sq(v.data(), v.size());
}

Vec vecmat(const Vec& x, const Matrix& a) {
    if (x.size() != a.rows())
        throw std::logic_error("vecmat: dimension mismatch");
    Vec y(a.cols(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i)
        if (x[i] != 0.0) kernels::axpy(x[i], a.row(i), y.data(), a.cols());
    return y;
}

Vec matvec(const Matrix& a, const Vec& x) {
    if (x.size() != a.cols())
        throw std::logic_error("matvec: dimension mismatch");
    Vec y(a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        y[i] = kernels::dot(a.row(i), x.data(), a.cols());
    return y;
}

void add_outer(Matrix& a, double alpha, const Vec& x, const Vec& y) {
    if (x.size() != a.rows() || y.size() != a.cols())
        throw std::logic_error("add_outer: dimension mismatch");
    for (std::size_t i = 0; i < a.rows(); ++i)
        if (x[i] != 0.0) kernels::axpy(alpha * x[i], y.data(), a.row(i), a.cols());
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw std::logic_error("max_abs_diff: shape mismatch");
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
    return m;
}

Matrix sample_gaussian_matrix(std::size_t rows, std::size_t cols, double mean,
                              double std, RngState& rng) {
    if (std < 0.0) throw std::invalid_argument("gaussian std must be >= 0");
    Matrix m(rows, cols, mean);
    if (std > 0.0)
        for (std::size_t i = 0; i < m.size(); ++i)
            m.data()[i] = mean + std * rng.next_gaussian();
    return m;
}

Vec sample_gaussian_vector(std::size_t dim, double mean, double std, RngState& rng) {
    if (std < 0.0) throw std::invalid_argument("gaussian std must be >= 0");
    Vec v(dim, mean);
    if (std > 0.0)
        for (double& x : v) x = mean + std * rng.next_gaussian();
    return v;
}

} // namespace dropgp
