// SPDX-License-Identifier: Apache-2.0
//
// wallscan - in-wall impulse radar imaging and material analysis toolkit
// Copyright (C) 2026 The wallscan Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace wallscan
{

/// Dense row-major matrix. Radar data is stored with one A-scan (or one image
/// column along depth) per row, so `row(i)` is the contiguous trace at probe
/// position i.
template <typename T>
class Matrix
{
public:
    using value_type = T;

    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, T fill = T{})
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t size() const noexcept { return data_.size(); }
    bool empty() const noexcept { return data_.empty(); }

    T &operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
    const T &operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }

    T &at(std::size_t r, std::size_t c)
    {
        if (r >= rows_ || c >= cols_)
            throw std::out_of_range("Matrix::at: index out of range");
        return data_[r * cols_ + c];
    }
    const T &at(std::size_t r, std::size_t c) const
    {
        if (r >= rows_ || c >= cols_)
            throw std::out_of_range("Matrix::at: index out of range");
        return data_[r * cols_ + c];
    }

    std::span<T> row(std::size_t r) noexcept { return {data_.data() + r * cols_, cols_}; }
    std::span<const T> row(std::size_t r) const noexcept { return {data_.data() + r * cols_, cols_}; }

    std::span<T> flat() noexcept { return data_; }
    std::span<const T> flat() const noexcept { return data_; }
    T *data() noexcept { return data_.data(); }
    const T *data() const noexcept { return data_.data(); }

    void fill(const T &v) { std::fill(data_.begin(), data_.end(), v); }

    bool operator==(const Matrix &) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<T> data_;
};

/// Copies `src` into a new matrix of another element type.
template <typename To, typename From>
Matrix<To> matrix_cast(const Matrix<From> &src)
{
    Matrix<To> out(src.rows(), src.cols());
    std::transform(src.flat().begin(), src.flat().end(), out.flat().begin(),
                   [](const From &v) { return static_cast<To>(v); });
    return out;
}

/// Sub-block [row0, row0+rows) x [col0, col0+cols); out-of-range cells are zero.
template <typename T>
Matrix<T> crop(const Matrix<T> &src, std::size_t row0, std::size_t col0, std::size_t rows, std::size_t cols)
{
    Matrix<T> out(rows, cols);
    for (std::size_t r = 0; r < rows && row0 + r < src.rows(); ++r)
        for (std::size_t c = 0; c < cols && col0 + c < src.cols(); ++c)
            out(r, c) = src(row0 + r, col0 + c);
    return out;
}

} // namespace wallscan
