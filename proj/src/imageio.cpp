#include "ycda/imageio.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <vector>

namespace ycda {

namespace {

// PPM header tokens are separated by whitespace; '#' starts a comment
// running to end of line.
std::string next_token(std::istream& is) {
    std::string tok;
    int ch;
    while ((ch = is.get()) != EOF) {
        if (ch == '#') {
            while ((ch = is.get()) != EOF && ch != '\n') {
            }
            continue;
        }
        if (std::isspace(ch)) {
            if (!tok.empty()) break;
            continue;
        }
        tok.push_back(static_cast<char>(ch));
    }
    return tok;
}

std::size_t parse_dim(const std::string& tok, const char* what) {
    if (tok.empty())
        throw PpmFormatError(std::string("malformed header: missing ") + what);
    for (char c : tok)
        if (!std::isdigit(static_cast<unsigned char>(c)))
            throw PpmFormatError(std::string("malformed header: bad ") + what +
                                 " \"" + tok + "\"");
    const unsigned long v = std::stoul(tok);
    if (v == 0)
        throw PpmFormatError(std::string("malformed header: zero ") + what);
    return v;
}

}  // namespace

ImageRGB load_ppm(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw PpmIoError("cannot read file: " + path);

    const std::string magic = next_token(is);
    if (magic != "P6")
        throw PpmFormatError("malformed header: expected \"P6\", got \"" + magic +
                             "\" in " + path);
    const std::size_t width = parse_dim(next_token(is), "width");
    const std::size_t height = parse_dim(next_token(is), "height");
    const std::string maxval_tok = next_token(is);
    const std::size_t maxval = parse_dim(maxval_tok, "maxval");
    if (maxval != 255)
        throw PpmMaxValueError("unsupported max-value " + maxval_tok +
                               " (only 8-bit, maxval 255) in " + path);
    // header terminator already consumed by next_token

    std::vector<unsigned char> raw(width * height * 3);
    if (!is.read(reinterpret_cast<char*>(raw.data()),
                 static_cast<std::streamsize>(raw.size())))
        throw PpmFormatError("malformed file: pixel data truncated in " + path);

    ImageRGB img(height, width);
    const std::size_t hw = height * width;
    for (std::size_t i = 0; i < hw; ++i)
        for (std::size_t c = 0; c < 3; ++c)
            img.pixels[c * hw + i] = static_cast<double>(raw[i * 3 + c]) / 255.0;
    return img;
}

void save_ppm(const ImageRGB& img, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw PpmIoError("cannot write file: " + path);
    const std::size_t h = img.height(), w = img.width(), hw = h * w;
    os << "P6\n" << w << " " << h << "\n255\n";
    std::vector<unsigned char> raw(hw * 3);
    for (std::size_t i = 0; i < hw; ++i)
        for (std::size_t c = 0; c < 3; ++c) {
            const double v = std::clamp(img.pixels[c * hw + i], 0.0, 1.0);
            raw[i * 3 + c] = static_cast<unsigned char>(std::lround(v * 255.0));
        }
    os.write(reinterpret_cast<const char*>(raw.data()),
             static_cast<std::streamsize>(raw.size()));
    if (!os) throw PpmIoError("write failed: " + path);
}

ImageRGB reflect_pad_to_multiple(const ImageRGB& img, int r) {
    const auto rr = static_cast<std::size_t>(r);
    const std::size_t h = img.height(), w = img.width();
    const std::size_t nh = (h + rr - 1) / rr * rr;
    const std::size_t nw = (w + rr - 1) / rr * rr;
    if (nh == h && nw == w) return img;
    if (nh - h >= h || nw - w >= w)
        throw std::invalid_argument("reflect_pad_to_multiple: image too small to pad");
    ImageRGB out(nh, nw);
    for (std::size_t c = 0; c < 3; ++c)
        for (std::size_t y = 0; y < nh; ++y) {
            const std::size_t sy = y < h ? y : 2 * h - 2 - y;
            for (std::size_t x = 0; x < nw; ++x) {
                const std::size_t sx = x < w ? x : 2 * w - 2 - x;
                out.pixels.at(c, y, x) = img.pixels.at(c, sy, sx);
            }
        }
    return out;
}

}  // namespace ycda
