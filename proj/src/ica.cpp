#include "ycda/ica.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace ycda {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

Tensor linear(const Tensor& w, const Tensor& x, const Tensor* b) {
    if (w.ndim() != 2 || x.ndim() != 1 || w.extent(1) != x.extent(0))
        throw std::invalid_argument("linear: shape mismatch " +
                                    shape_to_string(w.shape()) + " x " +
                                    shape_to_string(x.shape()));
    const std::size_t rows = w.extent(0), cols = w.extent(1);
    Tensor out({rows});
    for (std::size_t r = 0; r < rows; ++r) {
        double acc = b ? (*b)[r] : 0.0;
        for (std::size_t c = 0; c < cols; ++c) acc += w.at(r, c) * x[c];
        out[r] = acc;
    }
    return out;
}

ChannelStats compute_stats(const Tensor& f) {
    return {reduce_spatial(f, SpatialStat::mean), reduce_spatial(f, SpatialStat::var)};
}

Tensor fuse_stats(const ChannelStats& s, const IcaParams& p) {
    const std::size_t channels = s.mean.extent(0);
    if (p.fuse_weight.ndim() != 2 || p.fuse_weight.extent(0) != channels ||
        p.fuse_weight.extent(1) != 2 * channels)
        throw std::invalid_argument("fuse_stats: fuse_weight " +
                                    shape_to_string(p.fuse_weight.shape()) +
                                    " does not match C=" + std::to_string(channels));
    const Tensor* first = &s.mean;
    const Tensor* second = &s.variance;
    if (p.variant == IcaVariant::gap_only) second = &s.mean;
    if (p.variant == IcaVariant::var_only) first = &s.variance;
    // concatenation order is [mean; variance]
    Tensor cat({2 * channels});
    for (std::size_t c = 0; c < channels; ++c) {
        cat[c] = (*first)[c];
        cat[channels + c] = (*second)[c];
    }
    return linear(p.fuse_weight, cat, p.use_bias ? &p.fuse_bias : nullptr);
}

AttentionWeights excite(const Tensor& z, const IcaParams& p) {
    Tensor h = linear(p.w1, z, p.use_bias ? &p.b1 : nullptr);
    for (std::size_t i = 0; i < h.size(); ++i) h[i] = std::max(h[i], 0.0);
    Tensor a = linear(p.w2, h, p.use_bias ? &p.b2 : nullptr);
    for (std::size_t i = 0; i < a.size(); ++i) a[i] = sigmoid(a[i]);
    return {std::move(a)};
}

std::pair<Tensor, AttentionWeights> ica_forward(const Tensor& f, const IcaParams& p) {
    if (f.ndim() != 3 || f.extent(0) != p.channels())
        throw std::invalid_argument("ica_forward: input " +
                                    shape_to_string(f.shape()) +
                                    " does not match params C=" +
                                    std::to_string(p.channels()));
    AttentionWeights w = excite(fuse_stats(compute_stats(f), p), p);
    Tensor out = elementwise(f, w.alpha, ElementwiseOp::mul);
    return {std::move(out), std::move(w)};
}

std::pair<Tensor, AttentionWeights> ycda_forward(const ImageRGB& img,
                                                 const StemConfig& cfg,
                                                 const DWConvParams& sp,
                                                 const IcaParams& ip) {
    return ica_forward(stem_forward(rgb_to_ycbcr(img), cfg, sp), ip);
}

}  // namespace ycda
