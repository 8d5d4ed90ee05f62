#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "mmgenre/errors.hpp"

namespace mmgenre {

// Dense row-major matrix of doubles. Deliberately minimal; the numeric
// kernels in this project are all explicit loops.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    const double* row(std::size_t r) const { return data_.data() + r * cols_; }
    double* row(std::size_t r) { return data_.data() + r * cols_; }

    std::vector<double>& data() { return data_; }
    const std::vector<double>& data() const { return data_; }

    bool operator==(const Matrix&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

// Feature matrix tagged with the descriptor that produced it (e.g. AUDIO-SSD).
struct FeatureMatrix {
    std::string descriptor;
    Matrix values; // m x d
};

// Per-example, per-label scores in [0,1]; the unit of late fusion.
struct ScoreMatrix {
    std::string source; // producing classifier/feature identifier
    Matrix values;      // m x q
};

inline double squared_distance(const double* a, const double* b, std::size_t d) {
    double acc = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
        const double diff = a[i] - b[i];
        acc += diff * diff;
    }
    return acc;
}

} // namespace mmgenre
