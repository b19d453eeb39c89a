#ifndef YCDA_TENSOR_HPP
#define YCDA_TENSOR_HPP

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace ycda {

using Shape = std::vector<std::size_t>;

/// Dense N-dimensional array of 64-bit reals, row-major.
/// Feature maps use channel-first [C,H,W] ordering throughout.
class Tensor {
public:
    Tensor() = default;
    explicit Tensor(Shape shape);
    Tensor(Shape shape, std::vector<double> data);

    static Tensor zeros(const Shape& shape);

    const Shape& shape() const { return shape_; }
    std::size_t ndim() const { return shape_.size(); }
    std::size_t size() const { return data_.size(); }
    std::size_t extent(std::size_t d) const { return shape_.at(d); }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }
    std::vector<double>& values() { return data_; }
    const std::vector<double>& values() const { return data_; }

    double& operator[](std::size_t i) { return data_[i]; }
    double operator[](std::size_t i) const { return data_[i]; }

    // 3-D accessors for [C,H,W] feature maps
    double& at(std::size_t c, std::size_t y, std::size_t x) {
        return data_[(c * shape_[1] + y) * shape_[2] + x];
    }
    double at(std::size_t c, std::size_t y, std::size_t x) const {
        return data_[(c * shape_[1] + y) * shape_[2] + x];
    }

    // 2-D accessor for weight matrices [rows, cols]
    double& at(std::size_t r, std::size_t c) {
        return data_[r * shape_[1] + c];
    }
    double at(std::size_t r, std::size_t c) const {
        return data_[r * shape_[1] + c];
    }

    bool same_shape(const Tensor& other) const { return shape_ == other.shape_; }

private:
    Shape shape_;
    std::vector<double> data_;
};

enum class ElementwiseOp { add, mul };

/// Elementwise add/mul. Shapes must match, or b may be a [C] vector
/// broadcast over a [C,H,W] map (channel-wise scaling of Eq-3 style gating).
Tensor elementwise(const Tensor& a, const Tensor& b, ElementwiseOp op);

enum class SpatialStat { mean, var };

/// Per-channel spatial statistic of a [C,H,W] map. Variance is the
/// population variance (divisor H*W), computed two-pass.
Tensor reduce_spatial(const Tensor& f, SpatialStat stat);

std::string shape_to_string(const Shape& shape);

}  // namespace ycda

#endif  // YCDA_TENSOR_HPP
