#pragma once

#include <cstddef>
#include <initializer_list>
#include <vector>

#include "relucert/errors.hpp"

namespace relucert {

/// Dense column vector of 64-bit floats. Entries are validated to be
/// finite when constructed from data; treat instances as immutable once
/// built and they are safe to share across threads.
class Vector {
public:
    Vector() = default;
    explicit Vector(std::size_t dim) : entries_(dim, 0.0) {}
    Vector(std::initializer_list<double> values);

    static Vector from(std::vector<double> values);

    std::size_t dim() const noexcept { return entries_.size(); }
    double operator[](std::size_t i) const noexcept { return entries_[i]; }
    double& operator[](std::size_t i) noexcept { return entries_[i]; }
    const double* data() const noexcept { return entries_.data(); }
    double* data() noexcept { return entries_.data(); }
    const std::vector<double>& entries() const noexcept { return entries_; }

    double l2_norm() const noexcept;
    double dot(const Vector& other) const;

    bool operator==(const Vector& other) const noexcept { return entries_ == other.entries_; }

private:
    std::vector<double> entries_;
};

/// Dense row-major matrix of 64-bit floats. Shape is fixed at
/// construction; entries constructed from data must be finite.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), entries_(rows * cols, 0.0) {}

    static Matrix from(std::size_t rows, std::size_t cols, std::vector<double> values);
    static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows);
    static Matrix identity(std::size_t n);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    double operator()(std::size_t r, std::size_t c) const noexcept { return entries_[r * cols_ + c]; }
    double& operator()(std::size_t r, std::size_t c) noexcept { return entries_[r * cols_ + c]; }
    const double* row_data(std::size_t r) const noexcept { return entries_.data() + r * cols_; }
    double* row_data(std::size_t r) noexcept { return entries_.data() + r * cols_; }
    const double* data() const noexcept { return entries_.data(); }
    double* data() noexcept { return entries_.data(); }
    const std::vector<double>& entries() const noexcept { return entries_; }

    bool operator==(const Matrix& other) const noexcept {
        return rows_ == other.rows_ && cols_ == other.cols_ && entries_ == other.entries_;
    }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> entries_;
};

/// result_i = sum_j A_ij v_j. Throws DimensionError naming both shapes.
Vector matvec(const Matrix& a, const Vector& v);

/// Dense product A * B.
Matrix matmul(const Matrix& a, const Matrix& b);

/// A * B^T without materializing the transpose.
Matrix matmul_nt(const Matrix& a, const Matrix& b);

/// A^T * B without materializing the transpose.
Matrix matmul_tn(const Matrix& a, const Matrix& b);

Matrix transpose(const Matrix& a);

/// Euclidean norm of row i. Throws IndexError when i is out of range.
double row_l2_norm(const Matrix& a, std::size_t i);

/// Largest singular value, by power iteration on A^T A with a
/// deterministic all-ones start vector. Restarts once with an
/// index-weighted vector if the start lands in the null space. Throws
/// ConvergenceError (carrying the last iterate and residual) when the
/// iteration does not settle within max_iters.
double spectral_norm(const Matrix& a, double tol = 1e-10, std::size_t max_iters = 10000);

} // namespace relucert
