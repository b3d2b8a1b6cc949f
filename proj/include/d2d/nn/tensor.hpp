#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace d2d::nn {

// Dense row-major matrix of doubles. Small helper, value semantics.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool empty() const { return data_.empty(); }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    double* row(std::size_t r) { return data_.data() + r * cols_; }
    const double* row(std::size_t r) const { return data_.data() + r * cols_; }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }
    std::size_t size() const { return data_.size(); }

    void fill(double v) { data_.assign(data_.size(), v); }

    friend bool operator==(const Matrix& a, const Matrix& b) {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
    }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

// Named trainable tensor, flat row-major storage.
struct ParamTensor {
    std::string name;
    std::vector<std::size_t> shape;
    std::vector<double> values;

    std::size_t size() const { return values.size(); }
};

using ParamSet = std::vector<ParamTensor>;

inline std::size_t param_count(const ParamSet& params) {
    std::size_t total = 0;
    for (const auto& t : params) total += t.values.size();
    return total;
}

// Same names/shapes as `like`, all values zero. Used for gradients.
ParamSet zeros_like(const ParamSet& like);

}  // namespace d2d::nn
