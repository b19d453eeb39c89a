#include <cmath>

#include <doctest.h>

#include "ycda/colorspace.hpp"
#include "ycda/rng.hpp"

using namespace ycda;

namespace {

ImageRGB single_pixel(double r, double g, double b) {
    return ImageRGB(Tensor({3, 1, 1}, {r, g, b}));
}

}  // namespace

TEST_CASE("black, white, and primary red") {
    ImageYCbCr black = rgb_to_ycbcr(single_pixel(0, 0, 0));
    CHECK(black.pixels[0] == doctest::Approx(0.0));
    CHECK(black.pixels[1] == doctest::Approx(0.5));
    CHECK(black.pixels[2] == doctest::Approx(0.5));

    ImageYCbCr white = rgb_to_ycbcr(single_pixel(1, 1, 1));
    CHECK(white.pixels[0] == doctest::Approx(1.0));
    CHECK(white.pixels[1] == doctest::Approx(0.5));
    CHECK(white.pixels[2] == doctest::Approx(0.5));

    // hand application of the full-range BT.601 matrix to pure red
    ImageYCbCr red = rgb_to_ycbcr(single_pixel(1, 0, 0));
    CHECK(red.pixels[0] == doctest::Approx(0.299).epsilon(1e-12));
    CHECK(red.pixels[1] == doctest::Approx(0.331264).epsilon(1e-12));
    CHECK(red.pixels[2] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("inverse on neutral points") {
    ImageYCbCr black;
    black.pixels = Tensor({3, 1, 1}, {0, 0.5, 0.5});
    ImageRGB rgb = ycbcr_to_rgb(black);
    for (int c = 0; c < 3; ++c) CHECK(rgb.pixels[c] == doctest::Approx(0.0));

    ImageYCbCr white;
    white.pixels = Tensor({3, 1, 1}, {1, 0.5, 0.5});
    rgb = ycbcr_to_rgb(white);
    for (int c = 0; c < 3; ++c) CHECK(rgb.pixels[c] == doctest::Approx(1.0));
}

TEST_CASE("round trip on 1000 random pixels < 1e-9") {
    Rng rng(3);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        ImageRGB px = single_pixel(rng.uniform(), rng.uniform(), rng.uniform());
        ImageRGB back = ycbcr_to_rgb(rgb_to_ycbcr(px));
        for (int c = 0; c < 3; ++c)
            worst = std::max(worst, std::abs(back.pixels[c] - px.pixels[c]));
        // produced chroma stays in [0,1] around the 0.5 neutral point
        ImageYCbCr y = rgb_to_ycbcr(px);
        for (int c = 0; c < 3; ++c) {
            CHECK(y.pixels[c] >= -1e-9);
            CHECK(y.pixels[c] <= 1.0 + 1e-9);
        }
    }
    CHECK(worst < 1e-9);
}

TEST_CASE("gray shift moves Y only") {
    Rng rng(5);
    for (int i = 0; i < 100; ++i) {
        const double r = rng.uniform(0, 0.5), g = rng.uniform(0, 0.5),
                     b = rng.uniform(0, 0.5);
        const double delta = rng.uniform(0, 0.5);
        ImageYCbCr base = rgb_to_ycbcr(single_pixel(r, g, b));
        ImageYCbCr shifted = rgb_to_ycbcr(single_pixel(r + delta, g + delta, b + delta));
        CHECK(shifted.pixels[0] - base.pixels[0] == doctest::Approx(delta).epsilon(1e-10));
        CHECK(shifted.pixels[1] == doctest::Approx(base.pixels[1]).epsilon(1e-10));
        CHECK(shifted.pixels[2] == doctest::Approx(base.pixels[2]).epsilon(1e-10));
    }
}

TEST_CASE("affine consistency under convex blends") {
    Rng rng(9);
    for (int i = 0; i < 50; ++i) {
        ImageRGB a = single_pixel(rng.uniform(), rng.uniform(), rng.uniform());
        ImageRGB b = single_pixel(rng.uniform(), rng.uniform(), rng.uniform());
        const double t = rng.uniform();
        ImageRGB blend(1, 1);
        for (int c = 0; c < 3; ++c)
            blend.pixels[c] = t * a.pixels[c] + (1 - t) * b.pixels[c];
        ImageYCbCr ya = rgb_to_ycbcr(a), yb = rgb_to_ycbcr(b),
                   yblend = rgb_to_ycbcr(blend);
        for (int c = 0; c < 3; ++c)
            CHECK(yblend.pixels[c] ==
                  doctest::Approx(t * ya.pixels[c] + (1 - t) * yb.pixels[c])
                      .epsilon(1e-10));
    }
}

TEST_CASE("out-of-range input names the pixel") {
    ImageRGB img(2, 2);
    img.pixels.at(1, 1, 0) = 1.5;
    CHECK_THROWS_WITH_AS(rgb_to_ycbcr(img),
                         doctest::Contains("pixel (1,0)"), std::domain_error);
}
