#include "podn/matrix.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace podn {

Matrix Matrix::from_rows(const std::vector<std::vector<double>>& rows) {
    if (rows.empty()) {
        return {};
    }
    Matrix m(rows.size(), rows.front().size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != m.cols()) {
            throw std::runtime_error("Matrix::from_rows: ragged input at row " + std::to_string(i));
        }
        for (std::size_t j = 0; j < m.cols(); ++j) {
            m(i, j) = rows[i][j];
        }
    }
    return m;
}

std::string Matrix::shape_str() const {
    return std::to_string(rows_) + "x" + std::to_string(cols_);
}

bool Matrix::all_finite() const {
    for (double v : data_) {
        if (!std::isfinite(v)) {
            return false;
        }
    }
    return true;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) {
        throw std::runtime_error("matmul: incompatible shapes " + a.shape_str() + " and " + b.shape_str());
    }
    Matrix result(a.rows(), b.cols(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            for (std::size_t j = 0; j < b.cols(); ++j) {
                result(i, j) += aik * b(k, j);
            }
        }
    }
    return result;
}

Matrix transpose(const Matrix& m) {
    Matrix result(m.cols(), m.rows());
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) {
            result(j, i) = m(i, j);
        }
    }
    return result;
}

void add_inplace(Matrix& a, const Matrix& b) {
    if (!a.same_shape(b)) {
        throw std::runtime_error("add_inplace: shape mismatch " + a.shape_str() + " vs " + b.shape_str());
    }
    for (std::size_t i = 0; i < a.size(); ++i) {
        a.data()[i] += b.data()[i];
    }
}

void axpy_inplace(Matrix& a, double alpha, const Matrix& b) {
    if (!a.same_shape(b)) {
        throw std::runtime_error("axpy_inplace: shape mismatch " + a.shape_str() + " vs " + b.shape_str());
    }
    for (std::size_t i = 0; i < a.size(); ++i) {
        a.data()[i] += alpha * b.data()[i];
    }
}

Matrix operator+(const Matrix& a, const Matrix& b) {
    Matrix result = a;
    add_inplace(result, b);
    return result;
}

Matrix operator-(const Matrix& a, const Matrix& b) {
    Matrix result = a;
    axpy_inplace(result, -1.0, b);
    return result;
}

Matrix scaled(const Matrix& m, double alpha) {
    Matrix result = m;
    for (double& v : result.data()) {
        v *= alpha;
    }
    return result;
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) {
        throw std::runtime_error("squared_distance: length mismatch " + std::to_string(a.size()) +
                                 " vs " + std::to_string(b.size()));
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        sum += d * d;
    }
    return sum;
}

std::size_t argmax(std::span<const double> values) {
    if (values.empty()) {
        throw std::runtime_error("argmax: empty input");
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i < values.size(); ++i) {
        if (values[i] > values[best]) {
            best = i;
        }
    }
    return best;
}

TopTwo top_two(std::span<const double> values) {
    if (values.size() < 2) {
        throw std::runtime_error("top_two: need at least 2 entries, got " + std::to_string(values.size()));
    }
    const std::size_t top_idx = argmax(values);
    double second = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i != top_idx && values[i] > second) {
            second = values[i];
        }
    }
    return {values[top_idx], second, top_idx};
}

}  // namespace podn
