#ifndef YCDA_STEM_HPP
#define YCDA_STEM_HPP

#include <cstdint>

#include "ycda/colorspace.hpp"
#include "ycda/tensor.hpp"

namespace ycda {

enum class Activation { identity, silu };

/// Depthwise convolution parameters: one k x k kernel per output channel,
/// output channel j reading only input channel j / multiplier.
struct DWConvParams {
    Tensor kernels;  // [C_in * multiplier, k, k]
    Tensor bias;     // [C_in * multiplier]
    int multiplier = 2;
    int kernel_size = 3;
};

struct StemConfig {
    int unshuffle_factor = 2;
    Activation activation = Activation::silu;
    int multiplier = 2;
    int kernel_size = 3;
    std::uint64_t seed = 0;

    /// Output channels for a 3-channel input: 3 * r^2 * m (24 by default).
    int output_channels() const {
        return 3 * unshuffle_factor * unshuffle_factor * multiplier;
    }
};

/// Space-to-depth: each r x r spatial block becomes r^2 channels.
/// Output channel c*r^2 + dy*r + dx at (y,x) equals input channel c
/// at (y*r+dy, x*r+dx).
Tensor pixel_unshuffle(const Tensor& f, int r);

/// Exact inverse of pixel_unshuffle.
Tensor pixel_shuffle(const Tensor& f, int r);

/// Stride-1 same-padded (zero fill) depthwise convolution. No activation.
Tensor depthwise_conv(const Tensor& f, const DWConvParams& p);

double silu(double x);
Tensor apply_activation(const Tensor& f, Activation act);

/// activation(depthwise_conv(pixel_unshuffle(img, r), p)).
/// Channel provenance with defaults: outputs 0..7 derive only from Y,
/// 8..15 from Cb, 16..23 from Cr.
Tensor stem_forward(const ImageYCbCr& img, const StemConfig& cfg,
                    const DWConvParams& p);

}  // namespace ycda

#endif  // YCDA_STEM_HPP
