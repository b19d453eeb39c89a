#include "ycda/synth.hpp"

#include <cmath>
#include <stdexcept>

#include "ycda/rng.hpp"

namespace ycda {

namespace {

constexpr int kNoiseCell = 8;

// Seeded value noise in [-1,1]: uniform lattice values every kNoiseCell
// pixels, bilinearly interpolated.
Tensor value_noise(int size, Rng& rng) {
    const int cells = size / kNoiseCell + 2;
    std::vector<double> lattice(static_cast<std::size_t>(cells) * cells);
    for (auto& v : lattice) v = rng.uniform(-1.0, 1.0);

    Tensor field({static_cast<std::size_t>(size), static_cast<std::size_t>(size)});
    for (int y = 0; y < size; ++y)
        for (int x = 0; x < size; ++x) {
            const int cy = y / kNoiseCell, cx = x / kNoiseCell;
            const double fy = static_cast<double>(y % kNoiseCell) / kNoiseCell;
            const double fx = static_cast<double>(x % kNoiseCell) / kNoiseCell;
            const auto at = [&](int r, int c) {
                return lattice[static_cast<std::size_t>(r) * cells + c];
            };
            const double top = at(cy, cx) * (1 - fx) + at(cy, cx + 1) * fx;
            const double bot = at(cy + 1, cx) * (1 - fx) + at(cy + 1, cx + 1) * fx;
            field[static_cast<std::size_t>(y) * size + x] = top * (1 - fy) + bot * fy;
        }
    return field;
}

struct ObjectMask {
    // inside(x,y) for the object region
    ObjectShape shape;
    double cx, cy, radius;  // radius doubles as half-side for patches

    bool inside(int x, int y) const {
        if (shape == ObjectShape::disk) {
            const double dx = x - cx, dy = y - cy;
            return dx * dx + dy * dy <= radius * radius;
        }
        return std::abs(x - cx) <= radius && std::abs(y - cy) <= radius;
    }
};

}  // namespace

std::pair<ImageRGB, ImageRGB> synth_pair(const SynthSpec& spec) {
    const int size = spec.size;
    if (size < 2 * kNoiseCell)
        throw std::invalid_argument("synth_pair: image size too small");

    Rng rng(spec.seed);
    Tensor bg_lum = value_noise(size, rng);
    Tensor obj_lum = value_noise(size, rng);
    Tensor cb_noise = value_noise(size, rng);
    Tensor cr_noise = value_noise(size, rng);

    // the default fraction keeps the object small enough that the salient
    // chroma offset barely moves the global mean
    ObjectMask mask{spec.shape, size / 2.0, size / 2.0, size * spec.object_fraction};
    if (mask.radius < 1.0)
        throw std::invalid_argument("synth_pair: degenerate object size");

    const auto s = static_cast<std::size_t>(size);
    Tensor ycbcr({3, s, s});
    for (int y = 0; y < size; ++y)
        for (int x = 0; x < size; ++x) {
            const std::size_t i = static_cast<std::size_t>(y) * s + x;
            const bool in = mask.inside(x, y);
            double lum = 0.5 + spec.texture_contrast * bg_lum[i];
            if (in) lum += spec.texture_contrast * obj_lum[i];
            ycbcr.data()[i] = lum;
            ycbcr.data()[s * s + i] = 0.5 + spec.noise_level * cb_noise[i];
            ycbcr.data()[2 * s * s + i] = 0.5 + spec.noise_level * cr_noise[i];
        }

    // camouflaged: object chroma statistics match the background
    ImageYCbCr camo{ycbcr};
    ImageRGB camo_rgb = ycbcr_to_rgb(camo);

    // salient: shift the object's mean chroma by delta_chroma
    Tensor salient = ycbcr;
    for (int y = 0; y < size; ++y)
        for (int x = 0; x < size; ++x) {
            if (!mask.inside(x, y)) continue;
            const std::size_t i = static_cast<std::size_t>(y) * s + x;
            salient.data()[s * s + i] += spec.delta_chroma;
            salient.data()[2 * s * s + i] -= spec.delta_chroma;
        }
    ImageRGB salient_rgb = ycbcr_to_rgb(ImageYCbCr{std::move(salient)});

    return {std::move(salient_rgb), std::move(camo_rgb)};
}

std::vector<LabeledImage> synth_dataset(const SynthSpec& spec, int n_pairs) {
    if (n_pairs < 1) throw std::invalid_argument("synth_dataset: need >= 1 pair");
    Rng seeder(spec.seed);
    std::vector<LabeledImage> out;
    out.reserve(2 * static_cast<std::size_t>(n_pairs));
    for (int i = 0; i < n_pairs; ++i) {
        SynthSpec s = spec;
        s.seed = seeder.below(~0ull);
        auto [salient, camo] = synth_pair(s);
        out.push_back({std::move(salient), 0});
        out.push_back({std::move(camo), 1});
    }
    return out;
}

}  // namespace ycda
