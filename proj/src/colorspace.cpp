#include "ycda/colorspace.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace ycda {

namespace {

void apply_matrix(const ColorMatrix& cm, const Tensor& in, Tensor& out) {
    const std::size_t hw = in.extent(1) * in.extent(2);
    const double* c0 = in.data();
    const double* c1 = in.data() + hw;
    const double* c2 = in.data() + 2 * hw;
    for (std::size_t ch = 0; ch < 3; ++ch) {
        double* o = out.data() + ch * hw;
        const double m0 = cm.m[ch][0], m1 = cm.m[ch][1], m2 = cm.m[ch][2];
        const double off = cm.offset[ch];
        for (std::size_t i = 0; i < hw; ++i)
            o[i] = m0 * c0[i] + m1 * c1[i] + m2 * c2[i] + off;
    }
}

// 3x3 inverse by cofactor expansion; exact enough for the 1e-9 round trip.
ColorMatrix invert(const ColorMatrix& cm) {
    const auto& a = cm.m;
    const double det = a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) -
                       a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0]) +
                       a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
    ColorMatrix inv{};
    inv.m[0][0] = (a[1][1] * a[2][2] - a[1][2] * a[2][1]) / det;
    inv.m[0][1] = (a[0][2] * a[2][1] - a[0][1] * a[2][2]) / det;
    inv.m[0][2] = (a[0][1] * a[1][2] - a[0][2] * a[1][1]) / det;
    inv.m[1][0] = (a[1][2] * a[2][0] - a[1][0] * a[2][2]) / det;
    inv.m[1][1] = (a[0][0] * a[2][2] - a[0][2] * a[2][0]) / det;
    inv.m[1][2] = (a[0][2] * a[1][0] - a[0][0] * a[1][2]) / det;
    inv.m[2][0] = (a[1][0] * a[2][1] - a[1][1] * a[2][0]) / det;
    inv.m[2][1] = (a[0][1] * a[2][0] - a[0][0] * a[2][1]) / det;
    inv.m[2][2] = (a[0][0] * a[1][1] - a[0][1] * a[1][0]) / det;
    // rgb = M^-1 * (ycbcr - offset)
    for (int r = 0; r < 3; ++r) {
        inv.offset[r] = 0.0;
        for (int c = 0; c < 3; ++c) inv.offset[r] -= inv.m[r][c] * cm.offset[c];
    }
    return inv;
}

}  // namespace

ImageRGB::ImageRGB(Tensor px) : pixels(std::move(px)) {
    if (pixels.ndim() != 3 || pixels.extent(0) != 3)
        throw std::invalid_argument("ImageRGB expects a [3,H,W] tensor, got " +
                                    shape_to_string(pixels.shape()));
}

const ColorMatrix& bt601_full_range() {
    static const ColorMatrix k = {
        {{0.299, 0.587, 0.114},
         {-0.168736, -0.331264, 0.5},
         {0.5, -0.418688, -0.081312}},
        {0.0, 0.5, 0.5}};
    return k;
}

const ColorMatrix& bt601_full_range_inverse() {
    static const ColorMatrix k = invert(bt601_full_range());
    return k;
}

ImageYCbCr rgb_to_ycbcr(const ImageRGB& img) {
    const Tensor& px = img.pixels;
    const std::size_t hw = px.extent(1) * px.extent(2);
    for (std::size_t ch = 0; ch < 3; ++ch) {
        const double* p = px.data() + ch * hw;
        for (std::size_t i = 0; i < hw; ++i) {
            if (!(p[i] >= 0.0 && p[i] <= 1.0)) {
                const std::size_t y = i / px.extent(2), x = i % px.extent(2);
                throw std::domain_error(
                    "rgb_to_ycbcr: value out of [0,1] at channel " +
                    std::to_string(ch) + ", pixel (" + std::to_string(y) + "," +
                    std::to_string(x) + "): " + std::to_string(p[i]));
            }
        }
    }
    ImageYCbCr out;
    out.pixels = Tensor(px.shape());
    apply_matrix(bt601_full_range(), px, out.pixels);
    return out;
}

ImageRGB ycbcr_to_rgb(const ImageYCbCr& img) {
    Tensor rgb(img.pixels.shape());
    apply_matrix(bt601_full_range_inverse(), img.pixels, rgb);
    for (std::size_t i = 0; i < rgb.size(); ++i)
        rgb[i] = std::clamp(rgb[i], 0.0, 1.0);
    return ImageRGB(std::move(rgb));
}

}  // namespace ycda
