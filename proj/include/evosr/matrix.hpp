#pragma once

#include <cassert>
#include <cstddef>
#include <span>
#include <vector>

namespace evosr {

// Column-major real matrix. Expression evaluation walks whole columns.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill)
    {
    }

    [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
    [[nodiscard]] std::size_t cols() const noexcept { return cols_; }

    double& operator()(std::size_t r, std::size_t c) noexcept
    {
        assert(r < rows_ && c < cols_);
        return data_[c * rows_ + r];
    }
    double operator()(std::size_t r, std::size_t c) const noexcept
    {
        assert(r < rows_ && c < cols_);
        return data_[c * rows_ + r];
    }

    [[nodiscard]] std::span<const double> column(std::size_t c) const noexcept
    {
        return {data_.data() + c * rows_, rows_};
    }
    [[nodiscard]] std::span<double> column(std::size_t c) noexcept { return {data_.data() + c * rows_, rows_}; }

    // Builds a matrix from the given rows of this one, in the given order.
    [[nodiscard]] Matrix select_rows(std::span<const std::size_t> rows) const
    {
        Matrix out(rows.size(), cols_);
        for (std::size_t c = 0; c < cols_; ++c) {
            for (std::size_t i = 0; i < rows.size(); ++i) {
                out(i, c) = (*this)(rows[i], c);
            }
        }
        return out;
    }

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

} // namespace evosr
