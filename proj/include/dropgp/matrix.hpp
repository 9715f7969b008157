#pragma once

#include <cstddef>
#include <vector>

#include "dropgp/rng.hpp"

namespace dropgp {

using Vec = std::vector<double>;

// Dense row-major double matrix.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return data_.size(); }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    double* row(std::size_t i) { return data_.data() + i * cols_; }
    const double* row(std::size_t i) const { return data_.data() + i * cols_; }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }

    std::vector<double>& raw() { return data_; }
    const std::vector<double>& raw() const { return data_; }

    static Matrix identity(std::size_t n);
    static Matrix from_rows(const std::vector<Vec>& rows);

    Vec row_vec(std::size_t i) const { return Vec(row(i), row(i) + cols_); }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

Matrix matmul(const Matrix& a, const Matrix& b);
Matrix transpose(const Matrix& a);

// ||A||_F^2, i.e. the sum of squared entries.
double frobenius_sq(const Matrix& a);
double norm_sq(const Vec& v);

// y = x^T A  (x length = A.rows, result length = A.cols)
Vec vecmat(const Vec& x, const Matrix& a);
// y = A x    (x length = A.cols, result length = A.rows)
Vec matvec(const Matrix& a, const Vec& x);

// A += alpha * x y^T
void add_outer(Matrix& a, double alpha, const Vec& x, const Vec& y);

double max_abs_diff(const Matrix& a, const Matrix& b);

// i.i.d. entries mean + std * N(0,1); std = 0 gives the constant matrix.
Matrix sample_gaussian_matrix(std::size_t rows, std::size_t cols, double mean,
                              double std, RngState& rng);
Vec sample_gaussian_vector(std::size_t dim, double mean, double std, RngState& rng);

} // namespace dropgp
