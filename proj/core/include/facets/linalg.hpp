#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace facets {

using Vector = std::vector<double>;

/// Dense row-major matrix of 64-bit reals. Constructors that accept data
/// validate that every entry is finite; element access does not re-check.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols); // zero-filled
    Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);
    Matrix(std::initializer_list<std::initializer_list<double>> rows);

    static Matrix identity(std::size_t n);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool empty() const { return rows_ == 0 || cols_ == 0; }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
    std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

    std::vector<double>& data() { return data_; }
    const std::vector<double>& data() const { return data_; }

    bool operator==(const Matrix&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

double dot(std::span<const double> a, std::span<const double> b);

Matrix matmul(const Matrix& a, const Matrix& b);

/// a * transpose(b). Traverses rows of both operands; preferred in hot paths.
Matrix matmul_nt(const Matrix& a, const Matrix& b);

/// transpose(a) * b.
Matrix matmul_tn(const Matrix& a, const Matrix& b);

Matrix transpose(const Matrix& a);

Vector matvec(const Matrix& a, const Vector& x);

/// w * x + b.
Vector affine_apply(const Matrix& w, const Vector& b, const Vector& x);

/// Minimizes ||a * X - b||_F. Rank-deficient systems get the minimum-norm
/// minimizer via Householder QR with column pivoting followed by a complete
/// orthogonal factorization; pivots below 1e-10 times the largest column
/// norm are treated as zero.
Matrix least_squares(const Matrix& a, const Matrix& b);

double frobenius_norm(const Matrix& a);

void require_finite(std::span<const double> values, const char* what);

} // namespace facets
