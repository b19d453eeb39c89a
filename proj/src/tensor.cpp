#include "ycda/tensor.hpp"

#include <numeric>
#include <sstream>

namespace ycda {

namespace {

std::size_t checked_volume(const Shape& shape) {
    if (shape.empty())
        throw std::invalid_argument("invalid-shape: tensor rank must be >= 1");
    std::size_t n = 1;
    for (std::size_t e : shape) {
        if (e == 0)
            throw std::invalid_argument("invalid-shape: zero extent in " +
                                        shape_to_string(shape));
        n *= e;
    }
    return n;
}

}  // namespace

Tensor::Tensor(Shape shape) : shape_(std::move(shape)) {
    data_.assign(checked_volume(shape_), 0.0);
}

Tensor::Tensor(Shape shape, std::vector<double> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
    if (checked_volume(shape_) != data_.size())
        throw std::invalid_argument("invalid-shape: data length " +
                                    std::to_string(data_.size()) +
                                    " does not match shape " + shape_to_string(shape_));
}

Tensor Tensor::zeros(const Shape& shape) { return Tensor(shape); }

Tensor elementwise(const Tensor& a, const Tensor& b, ElementwiseOp op) {
    if (a.same_shape(b)) {
        Tensor out(a.shape());
        for (std::size_t i = 0; i < a.size(); ++i)
            out[i] = (op == ElementwiseOp::add) ? a[i] + b[i] : a[i] * b[i];
        return out;
    }
    // channel broadcast: b of shape [C] against a of shape [C,H,W]
    if (a.ndim() == 3 && b.ndim() == 1 && b.extent(0) == a.extent(0)) {
        Tensor out(a.shape());
        const std::size_t hw = a.extent(1) * a.extent(2);
        for (std::size_t c = 0; c < a.extent(0); ++c) {
            const double bc = b[c];
            for (std::size_t i = 0; i < hw; ++i) {
                const std::size_t idx = c * hw + i;
                out[idx] = (op == ElementwiseOp::add) ? a[idx] + bc : a[idx] * bc;
            }
        }
        return out;
    }
    throw std::invalid_argument("shape-mismatch: " + shape_to_string(a.shape()) +
                                " vs " + shape_to_string(b.shape()));
}

Tensor reduce_spatial(const Tensor& f, SpatialStat stat) {
    if (f.ndim() != 3)
        throw std::invalid_argument("reduce_spatial expects a [C,H,W] tensor, got " +
                                    shape_to_string(f.shape()));
    const std::size_t channels = f.extent(0);
    const std::size_t hw = f.extent(1) * f.extent(2);
    Tensor out({channels});
    for (std::size_t c = 0; c < channels; ++c) {
        const double* p = f.data() + c * hw;
        double mean = 0.0;
        for (std::size_t i = 0; i < hw; ++i) mean += p[i];
        mean /= static_cast<double>(hw);
        if (stat == SpatialStat::mean) {
            out[c] = mean;
        } else {
            // two-pass population variance, divisor H*W
            double acc = 0.0;
            for (std::size_t i = 0; i < hw; ++i) {
                const double d = p[i] - mean;
                acc += d * d;
            }
            out[c] = acc / static_cast<double>(hw);
        }
    }
    return out;
}

std::string shape_to_string(const Shape& shape) {
    std::ostringstream os;
    os << '[';
    for (std::size_t i = 0; i < shape.size(); ++i) {
        if (i) os << ',';
        os << shape[i];
    }
    os << ']';
    return os.str();
}

}  // namespace ycda
