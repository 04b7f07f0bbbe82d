#pragma once

#include "errors.hpp"

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace mbang {

/// Dense row-major matrix of doubles.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0) : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
    std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

    std::span<const double> values() const noexcept { return data_; }
    std::span<double> values() noexcept { return data_; }

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

/// p x n observation matrix: one row per variable, one column per sample.
class Dataset {
public:
    Dataset() = default;

    explicit Dataset(Matrix values, std::vector<std::string> labels = {})
        : values_(std::move(values)), labels_(std::move(labels))
    {
        if (labels_.empty()) {
            for (std::size_t i = 0; i < values_.rows(); ++i) labels_.push_back(std::to_string(i + 1));
        }
        if (labels_.size() != values_.rows()) throw ValidationError("dataset: label count does not match row count");
    }

    Dataset(std::size_t p, std::size_t n) : Dataset(Matrix(p, n)) {}

    std::size_t p() const noexcept { return values_.rows(); }
    std::size_t n() const noexcept { return values_.cols(); }

    double& operator()(std::size_t var, std::size_t sample) { return values_(var, sample); }
    double operator()(std::size_t var, std::size_t sample) const { return values_(var, sample); }

    std::span<double> row(std::size_t var) { return values_.row(var); }
    std::span<const double> row(std::size_t var) const { return values_.row(var); }

    const Matrix& matrix() const noexcept { return values_; }
    const std::vector<std::string>& labels() const noexcept { return labels_; }

    friend bool operator==(const Dataset&, const Dataset&) = default;

private:
    Matrix values_;
    std::vector<std::string> labels_;
};

} // namespace mbang
