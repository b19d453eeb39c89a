#ifndef YCDA_COLORSPACE_HPP
#define YCDA_COLORSPACE_HPP

#include "ycda/tensor.hpp"

namespace ycda {

/// RGB image, channels ordered R,G,B, values in [0,1]. pixels is [3,H,W].
struct ImageRGB {
    Tensor pixels;

    ImageRGB() = default;
    explicit ImageRGB(Tensor px);
    ImageRGB(std::size_t height, std::size_t width)
        : pixels(Tensor({3, height, width})) {}

    std::size_t height() const { return pixels.extent(1); }
    std::size_t width() const { return pixels.extent(2); }
};

/// YCbCr image, channels ordered Y,Cb,Cr, all in [0,1] with chroma
/// neutral point 0.5. pixels is [3,H,W].
struct ImageYCbCr {
    Tensor pixels;

    std::size_t height() const { return pixels.extent(1); }
    std::size_t width() const { return pixels.extent(2); }
};

/// Affine color transform: out = M * rgb + offset per pixel.
/// The coefficient set lives in one table so the variant is swappable.
struct ColorMatrix {
    double m[3][3];
    double offset[3];
};

/// Full-range (JPEG-style) BT.601 on [0,1] values, chroma offset +0.5.
const ColorMatrix& bt601_full_range();
/// Exact matrix inverse of bt601_full_range().
const ColorMatrix& bt601_full_range_inverse();

ImageYCbCr rgb_to_ycbcr(const ImageRGB& img);

/// Exact affine inverse; result clamped to [0,1] after conversion.
ImageRGB ycbcr_to_rgb(const ImageYCbCr& img);

}  // namespace ycda

#endif  // YCDA_COLORSPACE_HPP
