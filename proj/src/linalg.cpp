#include "relucert/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#ifdef RELUCERT_HAVE_EIGEN
#include <Eigen/Core>
#endif

namespace relucert {

namespace {

void require_finite(const std::vector<double>& values, const char* what) {
    for (double v : values) {
        if (!std::isfinite(v)) {
            throw ValidationError(std::string(what) + " contains a non-finite entry");
        }
    }
}

std::string shape_str(std::size_t rows, std::size_t cols) {
    return std::to_string(rows) + "x" + std::to_string(cols);
}

#ifdef RELUCERT_HAVE_EIGEN
using EigenRowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstMap = Eigen::Map<const EigenRowMajor>;
using MutMap = Eigen::Map<EigenRowMajor>;
#endif

} // namespace

Vector::Vector(std::initializer_list<double> values) : entries_(values) {
    require_finite(entries_, "Vector");
}

Vector Vector::from(std::vector<double> values) {
    Vector v;
    v.entries_ = std::move(values);
    require_finite(v.entries_, "Vector");
    return v;
}

double Vector::l2_norm() const noexcept {
    double sum = 0.0;
    for (double v : entries_) sum += v * v;
    return std::sqrt(sum);
}

double Vector::dot(const Vector& other) const {
    if (dim() != other.dim()) {
        throw DimensionError("dot: dimension mismatch " + std::to_string(dim()) + " vs " +
                             std::to_string(other.dim()));
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < entries_.size(); ++i) sum += entries_[i] * other.entries_[i];
    return sum;
}

Matrix Matrix::from(std::size_t rows, std::size_t cols, std::vector<double> values) {
    if (values.size() != rows * cols) {
        throw DimensionError("Matrix::from: expected " + std::to_string(rows * cols) +
                             " entries for shape " + shape_str(rows, cols) + ", got " +
                             std::to_string(values.size()));
    }
    Matrix m;
    m.rows_ = rows;
    m.cols_ = cols;
    m.entries_ = std::move(values);
    require_finite(m.entries_, "Matrix");
    return m;
}

Matrix Matrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
    const std::size_t r = rows.size();
    const std::size_t c = r == 0 ? 0 : rows.begin()->size();
    std::vector<double> flat;
    flat.reserve(r * c);
    for (const auto& row : rows) {
        if (row.size() != c) {
            throw DimensionError("Matrix::from_rows: ragged rows");
        }
        flat.insert(flat.end(), row.begin(), row.end());
    }
    return from(r, c, std::move(flat));
}

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Vector matvec(const Matrix& a, const Vector& v) {
    if (a.cols() != v.dim()) {
        throw DimensionError("matvec: matrix is " + shape_str(a.rows(), a.cols()) +
                             " but vector has dim " + std::to_string(v.dim()));
    }
    Vector out(a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        const double* row = a.row_data(i);
        double sum = 0.0;
        for (std::size_t j = 0; j < a.cols(); ++j) sum += row[j] * v[j];
        out[i] = sum;
    }
    return out;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) {
        throw DimensionError("matmul: " + shape_str(a.rows(), a.cols()) + " times " +
                             shape_str(b.rows(), b.cols()));
    }
    Matrix out(a.rows(), b.cols());
#ifdef RELUCERT_HAVE_EIGEN
    MutMap(out.data(), out.rows(), out.cols()).noalias() =
        ConstMap(a.data(), a.rows(), a.cols()) * ConstMap(b.data(), b.rows(), b.cols());
#else
    for (std::size_t i = 0; i < a.rows(); ++i) {
        double* dst = out.row_data(i);
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            const double* brow = b.row_data(k);
            for (std::size_t j = 0; j < b.cols(); ++j) dst[j] += aik * brow[j];
        }
    }
#endif
    return out;
}

Matrix matmul_nt(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.cols()) {
        throw DimensionError("matmul_nt: " + shape_str(a.rows(), a.cols()) + " times transpose of " +
                             shape_str(b.rows(), b.cols()));
    }
    Matrix out(a.rows(), b.rows());
#ifdef RELUCERT_HAVE_EIGEN
    MutMap(out.data(), out.rows(), out.cols()).noalias() =
        ConstMap(a.data(), a.rows(), a.cols()) * ConstMap(b.data(), b.rows(), b.cols()).transpose();
#else
    for (std::size_t i = 0; i < a.rows(); ++i) {
        const double* arow = a.row_data(i);
        double* dst = out.row_data(i);
        for (std::size_t j = 0; j < b.rows(); ++j) {
            const double* brow = b.row_data(j);
            double sum = 0.0;
            for (std::size_t k = 0; k < a.cols(); ++k) sum += arow[k] * brow[k];
            dst[j] = sum;
        }
    }
#endif
    return out;
}

Matrix matmul_tn(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows()) {
        throw DimensionError("matmul_tn: transpose of " + shape_str(a.rows(), a.cols()) + " times " +
                             shape_str(b.rows(), b.cols()));
    }
    Matrix out(a.cols(), b.cols());
#ifdef RELUCERT_HAVE_EIGEN
    MutMap(out.data(), out.rows(), out.cols()).noalias() =
        ConstMap(a.data(), a.rows(), a.cols()).transpose() * ConstMap(b.data(), b.rows(), b.cols());
#else
    for (std::size_t k = 0; k < a.rows(); ++k) {
        const double* arow = a.row_data(k);
        const double* brow = b.row_data(k);
        for (std::size_t i = 0; i < a.cols(); ++i) {
            const double aki = arow[i];
            if (aki == 0.0) continue;
            double* dst = out.row_data(i);
            for (std::size_t j = 0; j < b.cols(); ++j) dst[j] += aki * brow[j];
        }
    }
#endif
    return out;
}

Matrix transpose(const Matrix& a) {
    Matrix out(a.cols(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) out(j, i) = a(i, j);
    }
    return out;
}

double row_l2_norm(const Matrix& a, std::size_t i) {
    if (i >= a.rows()) {
        throw IndexError("row_l2_norm: row " + std::to_string(i) + " out of range for " +
                         shape_str(a.rows(), a.cols()));
    }
    const double* row = a.row_data(i);
    double sum = 0.0;
    for (std::size_t j = 0; j < a.cols(); ++j) sum += row[j] * row[j];
    return std::sqrt(sum);
}

double spectral_norm(const Matrix& a, double tol, std::size_t max_iters) {
    if (tol <= 0.0) {
        throw ValidationError("spectral_norm: tol must be positive");
    }
    const std::size_t n = a.cols();
    if (n == 0 || a.rows() == 0) return 0.0;

    double frob_sq = 0.0;
    for (double v : a.entries()) frob_sq += v * v;
    if (frob_sq == 0.0) return 0.0;

    // One step of v -> A^T A v, returning the Rayleigh quotient v.(Bv)
    // for the unit-norm input v.
    std::vector<double> av(a.rows()), bv(n);
    auto apply = [&](const std::vector<double>& v) {
        for (std::size_t i = 0; i < a.rows(); ++i) {
            const double* row = a.row_data(i);
            double sum = 0.0;
            for (std::size_t j = 0; j < n; ++j) sum += row[j] * v[j];
            av[i] = sum;
        }
        std::fill(bv.begin(), bv.end(), 0.0);
        for (std::size_t i = 0; i < a.rows(); ++i) {
            const double* row = a.row_data(i);
            const double avi = av[i];
            for (std::size_t j = 0; j < n; ++j) bv[j] += avi * row[j];
        }
        double rayleigh = 0.0;
        for (std::size_t j = 0; j < n; ++j) rayleigh += v[j] * bv[j];
        return rayleigh;
    };

    std::vector<double> v(n, 1.0 / std::sqrt(static_cast<double>(n)));
    bool restarted = false;
    double lambda_prev = 0.0;
    for (std::size_t iter = 0; iter < max_iters; ++iter) {
        const double lambda = apply(v);
        double bv_norm = 0.0;
        for (double x : bv) bv_norm += x * x;
        bv_norm = std::sqrt(bv_norm);
        if (bv_norm == 0.0 || lambda <= 0.0) {
            // Start vector is (numerically) in the null space of A^T A.
            if (!restarted) {
                restarted = true;
                double norm = 0.0;
                for (std::size_t j = 0; j < n; ++j) {
                    v[j] = static_cast<double>(j + 1);
                    norm += v[j] * v[j];
                }
                norm = std::sqrt(norm);
                for (double& x : v) x /= norm;
                lambda_prev = 0.0;
                continue;
            }
            throw ConvergenceError("spectral_norm: power iteration collapsed to the null space twice",
                                   v, bv_norm);
        }
        for (std::size_t j = 0; j < n; ++j) v[j] = bv[j] / bv_norm;
        const double delta = std::abs(lambda - lambda_prev);
        if (iter > 0 && delta <= tol * lambda) {
            return std::sqrt(lambda);
        }
        lambda_prev = lambda;
    }

    const double residual = std::abs(apply(v) - lambda_prev);
    throw ConvergenceError("spectral_norm: no convergence after " + std::to_string(max_iters) +
                               " iterations (relative residual " +
                               std::to_string(residual / (lambda_prev > 0 ? lambda_prev : 1.0)) + ")",
                           v, residual);
}

} // namespace relucert
