#ifndef YCDA_ICA_HPP
#define YCDA_ICA_HPP

#include <utility>

#include "ycda/stem.hpp"
#include "ycda/tensor.hpp"

namespace ycda {

/// Per-channel spatial mean and population variance.
struct ChannelStats {
    Tensor mean;      // [C]
    Tensor variance;  // [C]
};

enum class IcaVariant { ica, gap_only, var_only };

/// Information-aware Channel Attention parameters.
/// fuse projects the concatenated [mean; variance] descriptor back to C,
/// then a bottleneck MLP (reduction r) with ReLU/sigmoid produces the gates.
struct IcaParams {
    Tensor fuse_weight;  // [C, 2C]
    Tensor fuse_bias;    // [C]
    Tensor w1;           // [C/r, C]
    Tensor b1;           // [C/r]
    Tensor w2;           // [C, C/r]
    Tensor b2;           // [C]
    int reduction = 4;
    IcaVariant variant = IcaVariant::ica;
    bool use_bias = true;  // when false, all three biases are held at zero

    std::size_t channels() const { return fuse_weight.extent(0); }
};

/// Sigmoid-gated per-channel multipliers, each strictly in (0,1).
struct AttentionWeights {
    Tensor alpha;  // [C]
};

ChannelStats compute_stats(const Tensor& f);

/// Fused descriptor z. gap_only fuses [mean; mean], var_only [variance; variance].
Tensor fuse_stats(const ChannelStats& s, const IcaParams& p);

/// alpha = sigmoid(w2 * relu(w1 * z + b1) + b2).
AttentionWeights excite(const Tensor& z, const IcaParams& p);

/// Returns (alpha-gated feature map, alpha).
std::pair<Tensor, AttentionWeights> ica_forward(const Tensor& f, const IcaParams& p);

/// Full block: ica_forward(stem_forward(rgb_to_ycbcr(img), cfg, sp), ip).
std::pair<Tensor, AttentionWeights> ycda_forward(const ImageRGB& img,
                                                 const StemConfig& cfg,
                                                 const DWConvParams& sp,
                                                 const IcaParams& ip);

double sigmoid(double x);

/// Dense y = W x (+ b). W is [rows, cols], x is [cols].
Tensor linear(const Tensor& w, const Tensor& x, const Tensor* b);

}  // namespace ycda

#endif  // YCDA_ICA_HPP
