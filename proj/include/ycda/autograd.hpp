#ifndef YCDA_AUTOGRAD_HPP
#define YCDA_AUTOGRAD_HPP

#include <string>
#include <utility>
#include <vector>

#include "ycda/model.hpp"

namespace ycda {

/// Recorded forward trace of the full block (training mode).
struct YcdaTrace {
    bool recorded = false;
    Tensor rgb;         // block input [3,H,W]
    Tensor unshuffled;  // after color transform + pixel unshuffle
    Tensor preact;      // depthwise conv output, before activation
    Tensor activated;   // ICA input
    Tensor mean;        // [C]
    Tensor variance;    // [C]
    Tensor fuse_input;  // concatenated descriptor [2C]
    Tensor z;           // fused descriptor [C]
    Tensor h1_pre;      // bottleneck pre-activation [C/r]
    Tensor h1;          // after ReLU
    Tensor alpha;       // gates [C]
    Tensor output;      // gated feature map
};

/// Forward pass recording every intermediate needed by backward().
Tensor ycda_forward_traced(const ImageRGB& img, const YcdaBlock& block,
                           YcdaTrace& tape);

/// Gradients for every parameter tensor plus the block input.
struct BlockGrads {
    Tensor stem_kernels, stem_bias;
    Tensor fuse_weight, fuse_bias;
    Tensor w1, b1, w2, b2;
    Tensor input;  // d loss / d rgb

    /// Same order and names as parameters(), with "input" appended.
    std::vector<std::pair<std::string, Tensor*>> named();
};

/// Reverse-mode gradients through the recorded trace.
/// loss_grad is d loss / d output, same shape as the block output.
BlockGrads backward(const Tensor& loss_grad, const YcdaTrace& tape,
                    const YcdaBlock& block);

/// Scalar probe loss: sum of squared block outputs.
double sum_squares_loss(const YcdaBlock& block, const ImageRGB& input);

struct GradReport {
    // per-parameter maximum relative error, analytic vs central difference
    std::vector<std::pair<std::string, double>> per_param;
    double overall_max = 0.0;
};

/// Compares analytic gradients of sum_squares_loss against central
/// differences for every coordinate (or a seeded subsample of max_coords
/// when a tensor is larger). ReLU pre-activations are nudged away from
/// zero first so the finite differences stay on one side of the kink.
GradReport grad_check(const YcdaBlock& block, const ImageRGB& input,
                      double eps = 1e-4, std::size_t max_coords = 200,
                      std::uint64_t sample_seed = 0);

// ---------------------------------------------------------------------------
// Toy trainer: YCDa block + global mean pool + linear head, 2-class
// softmax cross-entropy, momentum gradient descent.
// ---------------------------------------------------------------------------

struct TrainConfig {
    double step_size = 0.01;
    double momentum = 0.937;
    int steps = 200;
    std::uint64_t seed = 0;
    int batch_size = 32;
};

struct LabeledImage {
    ImageRGB image;
    int label = 0;  // 0 = salient, 1 = camouflaged
};

struct ToyHead {
    Tensor w;  // [2, C]
    Tensor b;  // [2]
};

struct ToyTrainResult {
    YcdaBlock block;
    ToyHead head;
    // [0] is the full-training-set loss before any step; one minibatch
    // loss is appended per step
    std::vector<double> loss_trace;
    double initial_loss = 0.0;  // full-set, before training
    double final_loss = 0.0;    // full-set, after training
    // mean alpha over the camouflaged eval split, per channel group
    double group_alpha[3] = {0, 0, 0};  // Y, Cb, Cr derived groups
    bool luminance_dominant = false;    // alpha(Y) > alpha(Cb) and alpha(Cr)
};

ToyTrainResult train_toy(const std::vector<LabeledImage>& train,
                         const std::vector<LabeledImage>& eval_camouflaged,
                         const YcdaBlock& init, const TrainConfig& cfg);

}  // namespace ycda

#endif  // YCDA_AUTOGRAD_HPP
