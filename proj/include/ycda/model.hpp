#ifndef YCDA_MODEL_HPP
#define YCDA_MODEL_HPP

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ycda/ica.hpp"
#include "ycda/stem.hpp"

namespace ycda {

struct IcaOptions {
    int reduction = 4;
    IcaVariant variant = IcaVariant::ica;
    bool use_bias = true;
};

/// The assembled block: stem config plus all learnable parameters.
struct YcdaBlock {
    StemConfig config;
    DWConvParams stem;
    IcaParams ica;
    std::uint64_t seed = 0;

    std::size_t channels() const { return ica.channels(); }
};

/// Fixed-order named views over the block's parameter tensors.
std::vector<std::pair<std::string, Tensor*>> parameters(YcdaBlock& block);
std::vector<std::pair<std::string, const Tensor*>> parameters(const YcdaBlock& block);

/// Deterministic init: fan-in-scaled uniform weights, zero biases.
YcdaBlock init_block(const StemConfig& config, const IcaOptions& ica = {},
                     std::uint64_t seed = 0);

/// Zero-filled block with the same shapes (gradient accumulator).
YcdaBlock zeros_like(const YcdaBlock& block);

// ---------------------------------------------------------------------------
// Weight-file container. Layout (all integers little-endian):
//   magic "YCDA" | u32 version | config block (u32 fields) | u32 record count
//   records: u32 name length | name bytes | u32 ndim | u64 extents | f64 data
// ---------------------------------------------------------------------------

struct BadMagicError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct VersionMismatchError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ShapeMismatchError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct TruncatedFileError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline constexpr std::uint32_t kWeightFormatVersion = 1;

/// Writes the weight file plus a human-readable <path>.manifest.txt.
void save_block(const YcdaBlock& block, const std::string& path);
YcdaBlock load_block(const std::string& path);

/// Named tensor records without a config header (feature dumps).
void save_records(const std::vector<std::pair<std::string, const Tensor*>>& records,
                  const std::string& path);
std::map<std::string, Tensor> load_records(const std::string& path);

// ---------------------------------------------------------------------------
// Cost accounting
// ---------------------------------------------------------------------------

/// Conventional first-layer strided convolution, for comparison.
struct BaselineConv {
    int out_channels = 64;
    int kernel_size = 3;
    int stride = 2;
};

struct CostReport {
    std::size_t params = 0;
    // multiply-accumulates per input pixel, by stage
    std::vector<std::pair<std::string, double>> macs_per_pixel;
    double total_macs_per_pixel = 0.0;
    int next_layer_input_width = 0;
};

std::pair<CostReport, CostReport> cost_report(const YcdaBlock& block,
                                              const BaselineConv& baseline = {});

std::string cost_report_text(const CostReport& ycda, const CostReport& base);

}  // namespace ycda

#endif  // YCDA_MODEL_HPP
