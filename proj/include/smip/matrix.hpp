#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace smip {

/// Dense row-major matrix of doubles.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}

    double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

    std::span<const double> row(std::size_t i) const { return {data.data() + i * cols, cols}; }
    std::span<double> row(std::size_t i) { return {data.data() + i * cols, cols}; }

    /// Rows picked by index, in the given order.
    Matrix select_rows(std::span<const std::size_t> idx) const
    {
        Matrix out(idx.size(), cols);
        for (std::size_t k = 0; k < idx.size(); ++k) {
            if (idx[k] >= rows)
                throw std::out_of_range("Matrix::select_rows: row index out of range");
            auto src = row(idx[k]);
            std::copy(src.begin(), src.end(), out.row(k).begin());
        }
        return out;
    }
};

} // namespace smip
