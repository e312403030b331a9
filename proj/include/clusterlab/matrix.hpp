#pragma once

#include <cassert>
#include <cstddef>
#include <vector>

namespace clusterlab {

// Dense row-major matrix of 64-bit reals. For a network layer the
// orientation is input-neurons (rows) by output-neurons (columns).
class Matrix {
public:
    Matrix() = default;

    // zero-filled
    Matrix(std::size_t rows, std::size_t cols);

    // takes ownership of a row-major buffer; validates the length and
    // rejects NaN/Inf entries
    Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return data_.size(); }

    double operator()(std::size_t i, std::size_t j) const {
        assert(i < rows_ && j < cols_);
        return data_[i * cols_ + j];
    }
    double& operator()(std::size_t i, std::size_t j) {
        assert(i < rows_ && j < cols_);
        return data_[i * cols_ + j];
    }

    const std::vector<double>& data() const { return data_; }
    std::vector<double>& data() { return data_; }

    bool same_shape(const Matrix& other) const {
        return rows_ == other.rows_ && cols_ == other.cols_;
    }

    Matrix transposed() const;
    double frobenius_norm() const;
    double max_abs() const;
    bool all_finite() const;

    // copies row i into a length-cols vector
    std::vector<double> row(std::size_t i) const;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

Matrix identity(std::size_t n);

// a (m x k) times b (k x n)
Matrix matmul(const Matrix& a, const Matrix& b);

}  // namespace clusterlab
