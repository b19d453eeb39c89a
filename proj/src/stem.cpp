#include "ycda/stem.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace ycda {

Tensor pixel_unshuffle(const Tensor& f, int r) {
    if (f.ndim() != 3)
        throw std::invalid_argument("pixel_unshuffle expects [C,H,W], got " +
                                    shape_to_string(f.shape()));
    if (r < 1) throw std::invalid_argument("pixel_unshuffle: factor must be >= 1");
    const std::size_t channels = f.extent(0), height = f.extent(1), width = f.extent(2);
    const auto rr = static_cast<std::size_t>(r);
    if (height % rr != 0 || width % rr != 0)
        throw std::invalid_argument(
            "indivisible-dimensions: H=" + std::to_string(height) +
            ", W=" + std::to_string(width) + " must both be divisible by r=" +
            std::to_string(r));
    const std::size_t oh = height / rr, ow = width / rr;
    Tensor out({channels * rr * rr, oh, ow});
    for (std::size_t c = 0; c < channels; ++c)
        for (std::size_t dy = 0; dy < rr; ++dy)
            for (std::size_t dx = 0; dx < rr; ++dx) {
                const std::size_t oc = c * rr * rr + dy * rr + dx;
                for (std::size_t y = 0; y < oh; ++y)
                    for (std::size_t x = 0; x < ow; ++x)
                        out.at(oc, y, x) = f.at(c, y * rr + dy, x * rr + dx);
            }
    return out;
}

Tensor pixel_shuffle(const Tensor& f, int r) {
    if (f.ndim() != 3)
        throw std::invalid_argument("pixel_shuffle expects [C,H,W], got " +
                                    shape_to_string(f.shape()));
    if (r < 1) throw std::invalid_argument("pixel_shuffle: factor must be >= 1");
    const auto rr = static_cast<std::size_t>(r);
    if (f.extent(0) % (rr * rr) != 0)
        throw std::invalid_argument(
            "indivisible-channels: leading extent " + std::to_string(f.extent(0)) +
            " must be divisible by r^2=" + std::to_string(rr * rr));
    const std::size_t channels = f.extent(0) / (rr * rr);
    const std::size_t h = f.extent(1), w = f.extent(2);
    Tensor out({channels, h * rr, w * rr});
    for (std::size_t c = 0; c < channels; ++c)
        for (std::size_t dy = 0; dy < rr; ++dy)
            for (std::size_t dx = 0; dx < rr; ++dx) {
                const std::size_t ic = c * rr * rr + dy * rr + dx;
                for (std::size_t y = 0; y < h; ++y)
                    for (std::size_t x = 0; x < w; ++x)
                        out.at(c, y * rr + dy, x * rr + dx) = f.at(ic, y, x);
            }
    return out;
}

Tensor depthwise_conv(const Tensor& f, const DWConvParams& p) {
    if (f.ndim() != 3)
        throw std::invalid_argument("depthwise_conv expects [C,H,W], got " +
                                    shape_to_string(f.shape()));
    const std::size_t cin = f.extent(0), height = f.extent(1), width = f.extent(2);
    const auto m = static_cast<std::size_t>(p.multiplier);
    const auto k = static_cast<std::size_t>(p.kernel_size);
    const std::size_t cout = cin * m;
    if (p.kernel_size % 2 == 0)
        throw std::invalid_argument("depthwise_conv: kernel size must be odd");
    if (p.kernels.ndim() != 3 || p.kernels.extent(0) != cout ||
        p.kernels.extent(1) != k || p.kernels.extent(2) != k ||
        p.bias.size() != cout)
        throw std::invalid_argument(
            "channel-count mismatch: input channels " + std::to_string(cin) +
            " x multiplier " + std::to_string(m) + " needs kernels [" +
            std::to_string(cout) + "," + std::to_string(k) + "," +
            std::to_string(k) + "], got " + shape_to_string(p.kernels.shape()));
    const std::ptrdiff_t pad = (p.kernel_size - 1) / 2;
    Tensor out({cout, height, width});
    for (std::size_t j = 0; j < cout; ++j) {
        const std::size_t ic = j / m;
        for (std::size_t y = 0; y < height; ++y)
            for (std::size_t x = 0; x < width; ++x) {
                double acc = p.bias[j];
                for (std::size_t ky = 0; ky < k; ++ky) {
                    const std::ptrdiff_t sy =
                        static_cast<std::ptrdiff_t>(y + ky) - pad;
                    if (sy < 0 || sy >= static_cast<std::ptrdiff_t>(height)) continue;
                    for (std::size_t kx = 0; kx < k; ++kx) {
                        const std::ptrdiff_t sx =
                            static_cast<std::ptrdiff_t>(x + kx) - pad;
                        if (sx < 0 || sx >= static_cast<std::ptrdiff_t>(width))
                            continue;
                        acc += p.kernels.at(j, ky, kx) *
                               f.at(ic, static_cast<std::size_t>(sy),
                                    static_cast<std::size_t>(sx));
                    }
                }
                out.at(j, y, x) = acc;
            }
    }
    return out;
}

double silu(double x) { return x / (1.0 + std::exp(-x)); }

Tensor apply_activation(const Tensor& f, Activation act) {
    if (act == Activation::identity) return f;
    Tensor out(f.shape());
    for (std::size_t i = 0; i < f.size(); ++i) out[i] = silu(f[i]);
    return out;
}

Tensor stem_forward(const ImageYCbCr& img, const StemConfig& cfg,
                    const DWConvParams& p) {
    Tensor u = pixel_unshuffle(img.pixels, cfg.unshuffle_factor);
    Tensor c = depthwise_conv(u, p);
    return apply_activation(c, cfg.activation);
}

}  // namespace ycda
