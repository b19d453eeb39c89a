#include "ycda/model.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "ycda/rng.hpp"

namespace ycda {

namespace {

void fill_uniform(Tensor& t, double bound, Rng& rng) {
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = rng.uniform(-bound, bound);
}

// He-style uniform for the conv kernels; the attention projections use the
// smaller classic fan-in scale so their sigmoid stays well-conditioned.
double he_bound(std::size_t fan_in) {
    return std::sqrt(6.0 / static_cast<double>(fan_in));
}

double fan_in_bound(std::size_t fan_in) {
    return 1.0 / std::sqrt(static_cast<double>(fan_in));
}

}  // namespace

std::vector<std::pair<std::string, Tensor*>> parameters(YcdaBlock& block) {
    return {{"stem.kernels", &block.stem.kernels},
            {"stem.bias", &block.stem.bias},
            {"ica.fuse_weight", &block.ica.fuse_weight},
            {"ica.fuse_bias", &block.ica.fuse_bias},
            {"ica.w1", &block.ica.w1},
            {"ica.b1", &block.ica.b1},
            {"ica.w2", &block.ica.w2},
            {"ica.b2", &block.ica.b2}};
}

std::vector<std::pair<std::string, const Tensor*>> parameters(const YcdaBlock& block) {
    std::vector<std::pair<std::string, const Tensor*>> out;
    for (auto& [name, t] : parameters(const_cast<YcdaBlock&>(block)))
        out.emplace_back(name, t);
    return out;
}

YcdaBlock init_block(const StemConfig& config, const IcaOptions& ica,
                     std::uint64_t seed) {
    if (config.unshuffle_factor < 1 || config.multiplier < 1)
        throw std::invalid_argument("init_block: factor and multiplier must be >= 1");
    if (config.kernel_size < 1 || config.kernel_size % 2 == 0)
        throw std::invalid_argument("init_block: kernel size must be odd and >= 1");
    const int channels = config.output_channels();
    if (ica.reduction < 1 || channels % ica.reduction != 0)
        throw std::invalid_argument("init_block: channel count " +
                                    std::to_string(channels) +
                                    " not divisible by reduction " +
                                    std::to_string(ica.reduction));
    if (channels < ica.reduction)
        throw std::invalid_argument("init_block: channel count below reduction, "
                                    "bottleneck width would be zero");

    const auto c = static_cast<std::size_t>(channels);
    const auto k = static_cast<std::size_t>(config.kernel_size);
    const auto cr = c / static_cast<std::size_t>(ica.reduction);

    YcdaBlock block;
    block.config = config;
    block.seed = seed;
    block.stem.multiplier = config.multiplier;
    block.stem.kernel_size = config.kernel_size;
    block.stem.kernels = Tensor({c, k, k});
    block.stem.bias = Tensor({c});
    block.ica.fuse_weight = Tensor({c, 2 * c});
    block.ica.fuse_bias = Tensor({c});
    block.ica.w1 = Tensor({cr, c});
    block.ica.b1 = Tensor({cr});
    block.ica.w2 = Tensor({c, cr});
    block.ica.b2 = Tensor({c});
    block.ica.reduction = ica.reduction;
    block.ica.variant = ica.variant;
    block.ica.use_bias = ica.use_bias;

    // fixed draw order; biases stay zero
    Rng rng(seed);
    fill_uniform(block.stem.kernels, he_bound(k * k), rng);
    fill_uniform(block.ica.fuse_weight, fan_in_bound(2 * c), rng);
    fill_uniform(block.ica.w1, fan_in_bound(c), rng);
    fill_uniform(block.ica.w2, fan_in_bound(cr), rng);
    return block;
}

YcdaBlock zeros_like(const YcdaBlock& block) {
    YcdaBlock z = block;
    for (auto& [name, t] : parameters(z)) *t = Tensor(t->shape());
    return z;
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

namespace {

constexpr char kMagic[4] = {'Y', 'C', 'D', 'A'};

void write_u32(std::ostream& os, std::uint32_t v) {
    unsigned char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    os.write(reinterpret_cast<const char*>(b), 4);
}

void write_u64(std::ostream& os, std::uint64_t v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    os.write(reinterpret_cast<const char*>(b), 8);
}

void write_f64(std::ostream& os, double v) {
    std::uint64_t bits;
    static_assert(sizeof(bits) == sizeof(v));
    std::memcpy(&bits, &v, 8);
    write_u64(os, bits);
}

std::uint32_t read_u32(std::istream& is, const std::string& what) {
    unsigned char b[4];
    if (!is.read(reinterpret_cast<char*>(b), 4))
        throw TruncatedFileError("truncated file while reading " + what);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
    return v;
}

std::uint64_t read_u64(std::istream& is, const std::string& what) {
    unsigned char b[8];
    if (!is.read(reinterpret_cast<char*>(b), 8))
        throw TruncatedFileError("truncated file while reading " + what);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return v;
}

double read_f64(std::istream& is, const std::string& what) {
    const std::uint64_t bits = read_u64(is, what);
    double v;
    std::memcpy(&v, &bits, 8);
    return v;
}

void write_record(std::ostream& os, const std::string& name, const Tensor& t) {
    write_u32(os, static_cast<std::uint32_t>(name.size()));
    os.write(name.data(), static_cast<std::streamsize>(name.size()));
    write_u32(os, static_cast<std::uint32_t>(t.ndim()));
    for (std::size_t e : t.shape()) write_u64(os, e);
    for (std::size_t i = 0; i < t.size(); ++i) write_f64(os, t[i]);
}

std::pair<std::string, Tensor> read_record(std::istream& is) {
    const std::uint32_t name_len = read_u32(is, "record name length");
    std::string name(name_len, '\0');
    if (!is.read(name.data(), name_len))
        throw TruncatedFileError("truncated file while reading record name");
    const std::uint32_t ndim = read_u32(is, "record rank of " + name);
    Shape shape(ndim);
    for (auto& e : shape) e = read_u64(is, "record shape of " + name);
    Tensor t(shape);
    for (std::size_t i = 0; i < t.size(); ++i)
        t[i] = read_f64(is, "record data of " + name);
    return {std::move(name), std::move(t)};
}

void check_magic(std::istream& is) {
    char got[4];
    if (!is.read(got, 4)) throw TruncatedFileError("truncated file: missing magic");
    if (std::memcmp(got, kMagic, 4) != 0)
        throw BadMagicError("bad magic: expected \"YCDA\"");
    const std::uint32_t version = read_u32(is, "format version");
    if (version != kWeightFormatVersion)
        throw VersionMismatchError("format version mismatch: file has " +
                                   std::to_string(version) + ", expected " +
                                   std::to_string(kWeightFormatVersion));
}

void write_manifest(const YcdaBlock& block, const std::string& path) {
    std::ofstream os(path);
    os << "ycda-weight-manifest\n";
    os << "format_version " << kWeightFormatVersion << "\n";
    os << "unshuffle_factor " << block.config.unshuffle_factor << "\n";
    os << "activation "
       << (block.config.activation == Activation::silu ? "silu" : "identity") << "\n";
    os << "multiplier " << block.config.multiplier << "\n";
    os << "kernel_size " << block.config.kernel_size << "\n";
    os << "reduction " << block.ica.reduction << "\n";
    os << "variant "
       << (block.ica.variant == IcaVariant::ica
               ? "ica"
               : block.ica.variant == IcaVariant::gap_only ? "gap_only" : "var_only")
       << "\n";
    os << "use_bias " << (block.ica.use_bias ? 1 : 0) << "\n";
    os << "seed " << block.seed << "\n";
    for (auto& [name, t] : parameters(block))
        os << "param " << name << " " << shape_to_string(t->shape()) << "\n";
}

}  // namespace

void save_block(const YcdaBlock& block, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open for writing: " + path);
    os.write(kMagic, 4);
    write_u32(os, kWeightFormatVersion);
    write_u32(os, static_cast<std::uint32_t>(block.config.unshuffle_factor));
    write_u32(os, static_cast<std::uint32_t>(block.config.activation));
    write_u32(os, static_cast<std::uint32_t>(block.config.multiplier));
    write_u32(os, static_cast<std::uint32_t>(block.config.kernel_size));
    write_u32(os, static_cast<std::uint32_t>(block.ica.reduction));
    write_u32(os, static_cast<std::uint32_t>(block.ica.variant));
    write_u32(os, block.ica.use_bias ? 1u : 0u);
    write_u64(os, block.seed);
    const auto params = parameters(block);
    write_u32(os, static_cast<std::uint32_t>(params.size()));
    for (auto& [name, t] : params) write_record(os, name, *t);
    if (!os) throw std::runtime_error("write failed: " + path);
    write_manifest(block, path + ".manifest.txt");
}

YcdaBlock load_block(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open for reading: " + path);
    check_magic(is);

    StemConfig config;
    config.unshuffle_factor = static_cast<int>(read_u32(is, "unshuffle_factor"));
    config.activation = static_cast<Activation>(read_u32(is, "activation"));
    config.multiplier = static_cast<int>(read_u32(is, "multiplier"));
    config.kernel_size = static_cast<int>(read_u32(is, "kernel_size"));
    IcaOptions opts;
    opts.reduction = static_cast<int>(read_u32(is, "reduction"));
    opts.variant = static_cast<IcaVariant>(read_u32(is, "variant"));
    opts.use_bias = read_u32(is, "use_bias") != 0;
    const std::uint64_t seed = read_u64(is, "seed");
    config.seed = seed;

    YcdaBlock block = init_block(config, opts, seed);
    const std::uint32_t count = read_u32(is, "record count");
    auto params = parameters(block);
    if (count != params.size())
        throw ShapeMismatchError("record count " + std::to_string(count) +
                                 " does not match expected " +
                                 std::to_string(params.size()));
    for (std::uint32_t i = 0; i < count; ++i) {
        auto [name, t] = read_record(is);
        bool found = false;
        for (auto& [pname, pt] : params) {
            if (pname != name) continue;
            if (!pt->same_shape(t))
                throw ShapeMismatchError(
                    "shape mismatch for parameter \"" + name + "\": file has " +
                    shape_to_string(t.shape()) + ", config implies " +
                    shape_to_string(pt->shape()));
            *pt = std::move(t);
            found = true;
            break;
        }
        if (!found)
            throw ShapeMismatchError("unknown parameter record \"" + name + "\"");
    }
    return block;
}

void save_records(const std::vector<std::pair<std::string, const Tensor*>>& records,
                  const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open for writing: " + path);
    os.write(kMagic, 4);
    write_u32(os, kWeightFormatVersion);
    write_u32(os, 0xFFFFFFFFu);  // marks a bare record container (no config)
    write_u32(os, static_cast<std::uint32_t>(records.size()));
    for (auto& [name, t] : records) write_record(os, name, *t);
    if (!os) throw std::runtime_error("write failed: " + path);
}

std::map<std::string, Tensor> load_records(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open for reading: " + path);
    check_magic(is);
    if (read_u32(is, "container marker") != 0xFFFFFFFFu)
        throw std::runtime_error("not a bare record container: " + path);
    const std::uint32_t count = read_u32(is, "record count");
    std::map<std::string, Tensor> out;
    for (std::uint32_t i = 0; i < count; ++i) {
        auto [name, t] = read_record(is);
        out.emplace(std::move(name), std::move(t));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Cost accounting
// ---------------------------------------------------------------------------

namespace {
// per-image stage costs are amortized at this reference resolution
constexpr double kRefPixels = 640.0 * 640.0;
}  // namespace

std::pair<CostReport, CostReport> cost_report(const YcdaBlock& block,
                                              const BaselineConv& baseline) {
    const double c = static_cast<double>(block.channels());
    const double k = static_cast<double>(block.config.kernel_size);
    const double r = static_cast<double>(block.config.unshuffle_factor);
    const double cr = c / static_cast<double>(block.ica.reduction);

    CostReport ycda;
    for (auto& [name, t] : parameters(block)) ycda.params += t->size();
    ycda.macs_per_pixel = {
        {"color_transform", 9.0},
        {"depthwise", c * k * k / (r * r)},
        {"fuse", (2.0 * c * c + c * 2.0) / kRefPixels},  // stats + 1x1 fusion
        {"mlp", 2.0 * c * cr / kRefPixels},
        {"gating", c / (r * r)},
    };
    ycda.next_layer_input_width = static_cast<int>(block.channels());

    CostReport base;
    const double bc = baseline.out_channels, bk = baseline.kernel_size;
    const double bs = baseline.stride;
    base.params = static_cast<std::size_t>(bc * 3.0 * bk * bk + bc);
    base.macs_per_pixel = {{"strided_conv", bc * 3.0 * bk * bk / (bs * bs)}};
    base.next_layer_input_width = baseline.out_channels;

    for (auto* rep : {&ycda, &base}) {
        rep->total_macs_per_pixel = 0.0;
        for (auto& [name, v] : rep->macs_per_pixel) rep->total_macs_per_pixel += v;
    }
    return {ycda, base};
}

std::string cost_report_text(const CostReport& ycda, const CostReport& base) {
    std::ostringstream os;
    os << "stem-scope cost report (per-image stages amortized at 640x640)\n";
    os << "note: whole-detector params/FLOPs require the host backbone and are\n"
       << "out of scope here; this accounts for the first stage only.\n\n";
    auto dump = [&os](const char* title, const CostReport& r) {
        os << title << ": params " << r.params << ", MACs/pixel "
           << r.total_macs_per_pixel << "\n";
        for (auto& [name, v] : r.macs_per_pixel)
            os << "  " << name << ": " << v << "\n";
        os << "  next-layer input width: " << r.next_layer_input_width << "\n";
    };
    dump("ycda", ycda);
    dump("baseline", base);
    return os.str();
}

}  // namespace ycda
