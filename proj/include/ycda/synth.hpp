#ifndef YCDA_SYNTH_HPP
#define YCDA_SYNTH_HPP

#include <utility>
#include <vector>

#include "ycda/autograd.hpp"
#include "ycda/colorspace.hpp"

namespace ycda {

enum class ObjectShape { disk, textured_patch };

/// Salient/camouflaged fixture pair description. The two images share
/// every luminance and noise field; only the object's chroma offset
/// (delta_chroma, salient member only) differs.
struct SynthSpec {
    int size = 64;
    ObjectShape shape = ObjectShape::disk;
    double texture_contrast = 0.08;  // luminance texture amplitude
    double delta_chroma = 0.15;      // object mean-chroma offset, salient image
    double noise_level = 0.01;       // background chroma noise amplitude
    double object_fraction = 0.125;  // object radius as a fraction of size
    std::uint64_t seed = 0;
};

/// Returns (salient, camouflaged). Built in YCbCr and converted back, so
/// the pair's Y channels are pixel-for-pixel identical by construction.
std::pair<ImageRGB, ImageRGB> synth_pair(const SynthSpec& spec);

/// n_pairs pairs with per-pair derived seeds (distinct textures);
/// labels: 0 = salient, 1 = camouflaged.
std::vector<LabeledImage> synth_dataset(const SynthSpec& spec, int n_pairs);

}  // namespace ycda

#endif  // YCDA_SYNTH_HPP
