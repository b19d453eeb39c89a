#ifndef YCDA_IMAGEIO_HPP
#define YCDA_IMAGEIO_HPP

#include <stdexcept>
#include <string>

#include "ycda/colorspace.hpp"

namespace ycda {

struct PpmIoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct PpmFormatError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct PpmMaxValueError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Binary PPM (P6, 8-bit) reader; bytes map to [0,1] by division by 255.
ImageRGB load_ppm(const std::string& path);

/// Writes P6 with maxval 255; values rounded to nearest byte.
void save_ppm(const ImageRGB& img, const std::string& path);

/// Reflect-pads the right/bottom edge so both extents are divisible by r.
/// Reflection excludes the edge pixel (row H-2 fills row H, and so on).
ImageRGB reflect_pad_to_multiple(const ImageRGB& img, int r);

}  // namespace ycda

#endif  // YCDA_IMAGEIO_HPP
