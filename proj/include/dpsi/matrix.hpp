#pragma once

#include <span>
#include <vector>

#include "dpsi/field.hpp"

namespace dpsi {

/// Dense rows x cols grid of residues of one field. Row r holds bin j = r + 1.
class FieldMatrix {
public:
    FieldMatrix() = default;
    FieldMatrix(std::size_t rows, std::size_t cols, u64 modulus)
        : rows_(rows), cols_(cols), modulus_(modulus), data_(rows * cols, 0) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    u64 modulus() const { return modulus_; }

    FieldElement at(std::size_t r, std::size_t c) const { return FieldElement::raw(data_[r * cols_ + c], modulus_); }
    void set(std::size_t r, std::size_t c, FieldElement v) { data_[r * cols_ + c] = v.value(); }

    u64& raw(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    u64 raw(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
    std::span<u64> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
    std::span<const u64> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }
    std::span<const u64> data() const { return data_; }

    bool same_shape(const FieldMatrix& o) const { return rows_ == o.rows_ && cols_ == o.cols_; }
    bool operator==(const FieldMatrix&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    u64 modulus_ = 0;
    std::vector<u64> data_;
};

}  // namespace dpsi
