#include "ycda/autograd.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "ycda/rng.hpp"

namespace ycda {

// ---------------------------------------------------------------------------
// Traced forward
// ---------------------------------------------------------------------------

Tensor ycda_forward_traced(const ImageRGB& img, const YcdaBlock& block,
                           YcdaTrace& tape) {
    tape.rgb = img.pixels;
    ImageYCbCr ycbcr = rgb_to_ycbcr(img);
    tape.unshuffled = pixel_unshuffle(ycbcr.pixels, block.config.unshuffle_factor);
    tape.preact = depthwise_conv(tape.unshuffled, block.stem);
    tape.activated = apply_activation(tape.preact, block.config.activation);

    const IcaParams& p = block.ica;
    ChannelStats stats = compute_stats(tape.activated);
    tape.mean = stats.mean;
    tape.variance = stats.variance;

    const std::size_t channels = stats.mean.extent(0);
    const Tensor* first = &tape.mean;
    const Tensor* second = &tape.variance;
    if (p.variant == IcaVariant::gap_only) second = &tape.mean;
    if (p.variant == IcaVariant::var_only) first = &tape.variance;
    tape.fuse_input = Tensor({2 * channels});
    for (std::size_t c = 0; c < channels; ++c) {
        tape.fuse_input[c] = (*first)[c];
        tape.fuse_input[channels + c] = (*second)[c];
    }
    tape.z = linear(p.fuse_weight, tape.fuse_input, p.use_bias ? &p.fuse_bias : nullptr);
    tape.h1_pre = linear(p.w1, tape.z, p.use_bias ? &p.b1 : nullptr);
    tape.h1 = tape.h1_pre;
    for (std::size_t i = 0; i < tape.h1.size(); ++i)
        tape.h1[i] = std::max(tape.h1[i], 0.0);
    Tensor alpha_pre = linear(p.w2, tape.h1, p.use_bias ? &p.b2 : nullptr);
    tape.alpha = Tensor({channels});
    for (std::size_t c = 0; c < channels; ++c) tape.alpha[c] = sigmoid(alpha_pre[c]);
    tape.output = elementwise(tape.activated, tape.alpha, ElementwiseOp::mul);
    tape.recorded = true;
    return tape.output;
}

// ---------------------------------------------------------------------------
// Backward
// ---------------------------------------------------------------------------

std::vector<std::pair<std::string, Tensor*>> BlockGrads::named() {
    return {{"stem.kernels", &stem_kernels}, {"stem.bias", &stem_bias},
            {"ica.fuse_weight", &fuse_weight}, {"ica.fuse_bias", &fuse_bias},
            {"ica.w1", &w1}, {"ica.b1", &b1},
            {"ica.w2", &w2}, {"ica.b2", &b2},
            {"input", &input}};
}

namespace {

double silu_derivative(double x) {
    const double s = sigmoid(x);
    return s + x * s * (1.0 - s);
}

// gx = W^T gy; gw += gy x^T; gb += gy
void linear_backward(const Tensor& w, const Tensor& x, const Tensor& gy,
                     Tensor& gw, Tensor& gb, Tensor& gx) {
    const std::size_t rows = w.extent(0), cols = w.extent(1);
    gx = Tensor({cols});
    for (std::size_t r = 0; r < rows; ++r) {
        gb[r] += gy[r];
        for (std::size_t c = 0; c < cols; ++c) {
            gw.at(r, c) += gy[r] * x[c];
            gx[c] += w.at(r, c) * gy[r];
        }
    }
}

}  // namespace

BlockGrads backward(const Tensor& loss_grad, const YcdaTrace& tape,
                    const YcdaBlock& block) {
    if (!tape.recorded)
        throw std::logic_error("missing-trace: backward requires a trace "
                               "recorded by ycda_forward_traced");
    if (!loss_grad.same_shape(tape.output))
        throw std::invalid_argument("backward: loss_grad shape " +
                                    shape_to_string(loss_grad.shape()) +
                                    " does not match output " +
                                    shape_to_string(tape.output.shape()));

    const IcaParams& p = block.ica;
    const std::size_t channels = tape.alpha.extent(0);
    const std::size_t h = tape.activated.extent(1), w = tape.activated.extent(2);
    const std::size_t hw = h * w;

    BlockGrads g;
    g.stem_kernels = Tensor(block.stem.kernels.shape());
    g.stem_bias = Tensor(block.stem.bias.shape());
    g.fuse_weight = Tensor(p.fuse_weight.shape());
    g.fuse_bias = Tensor(p.fuse_bias.shape());
    g.w1 = Tensor(p.w1.shape());
    g.b1 = Tensor(p.b1.shape());
    g.w2 = Tensor(p.w2.shape());
    g.b2 = Tensor(p.b2.shape());

    // gating: out = alpha (.) a
    Tensor galpha({channels});
    Tensor ga(tape.activated.shape());
    for (std::size_t c = 0; c < channels; ++c) {
        double acc = 0.0;
        for (std::size_t i = 0; i < hw; ++i) {
            const std::size_t idx = c * hw + i;
            acc += loss_grad[idx] * tape.activated[idx];
            ga[idx] = loss_grad[idx] * tape.alpha[c];
        }
        galpha[c] = acc;
    }

    // sigmoid
    Tensor galpha_pre({channels});
    for (std::size_t c = 0; c < channels; ++c)
        galpha_pre[c] = galpha[c] * tape.alpha[c] * (1.0 - tape.alpha[c]);

    // bottleneck MLP
    Tensor gh1;
    linear_backward(p.w2, tape.h1, galpha_pre, g.w2, g.b2, gh1);
    Tensor gh1_pre(gh1.shape());
    for (std::size_t i = 0; i < gh1.size(); ++i)
        gh1_pre[i] = tape.h1_pre[i] > 0.0 ? gh1[i] : 0.0;  // ReLU'(0) := 0
    Tensor gz;
    linear_backward(p.w1, tape.z, gh1_pre, g.w1, g.b1, gz);
    Tensor gcat;
    linear_backward(p.fuse_weight, tape.fuse_input, gz, g.fuse_weight, g.fuse_bias,
                    gcat);
    if (!p.use_bias) {
        g.fuse_bias = Tensor(g.fuse_bias.shape());
        g.b1 = Tensor(g.b1.shape());
        g.b2 = Tensor(g.b2.shape());
    }

    // split the concatenated descriptor back onto mean / variance
    Tensor gmean({channels}), gvar({channels});
    for (std::size_t c = 0; c < channels; ++c) {
        switch (p.variant) {
            case IcaVariant::ica:
                gmean[c] = gcat[c];
                gvar[c] = gcat[channels + c];
                break;
            case IcaVariant::gap_only:
                gmean[c] = gcat[c] + gcat[channels + c];
                gvar[c] = 0.0;
                break;
            case IcaVariant::var_only:
                gmean[c] = 0.0;
                gvar[c] = gcat[c] + gcat[channels + c];
                break;
        }
    }

    // stats: d mean / d a = 1/HW ; d var / d a = 2 (a - mean) / HW
    const double inv_hw = 1.0 / static_cast<double>(hw);
    for (std::size_t c = 0; c < channels; ++c) {
        const double gm = gmean[c] * inv_hw;
        const double gv = 2.0 * gvar[c] * inv_hw;
        for (std::size_t i = 0; i < hw; ++i) {
            const std::size_t idx = c * hw + i;
            ga[idx] += gm + gv * (tape.activated[idx] - tape.mean[c]);
        }
    }

    // activation
    Tensor gpre(tape.preact.shape());
    if (block.config.activation == Activation::identity) {
        gpre = ga;
    } else {
        for (std::size_t i = 0; i < ga.size(); ++i)
            gpre[i] = ga[i] * silu_derivative(tape.preact[i]);
    }

    // depthwise conv
    const Tensor& u = tape.unshuffled;
    const auto m = static_cast<std::size_t>(block.stem.multiplier);
    const auto k = static_cast<std::size_t>(block.stem.kernel_size);
    const std::ptrdiff_t pad = (block.stem.kernel_size - 1) / 2;
    Tensor gu(u.shape());
    const std::size_t uh = u.extent(1), uw = u.extent(2);
    for (std::size_t j = 0; j < channels; ++j) {
        const std::size_t ic = j / m;
        for (std::size_t y = 0; y < uh; ++y)
            for (std::size_t x = 0; x < uw; ++x) {
                const double gout = gpre.at(j, y, x);
                g.stem_bias[j] += gout;
                for (std::size_t ky = 0; ky < k; ++ky) {
                    const std::ptrdiff_t sy = static_cast<std::ptrdiff_t>(y + ky) - pad;
                    if (sy < 0 || sy >= static_cast<std::ptrdiff_t>(uh)) continue;
                    for (std::size_t kx = 0; kx < k; ++kx) {
                        const std::ptrdiff_t sx =
                            static_cast<std::ptrdiff_t>(x + kx) - pad;
                        if (sx < 0 || sx >= static_cast<std::ptrdiff_t>(uw)) continue;
                        const auto ssy = static_cast<std::size_t>(sy);
                        const auto ssx = static_cast<std::size_t>(sx);
                        g.stem_kernels.at(j, ky, kx) += gout * u.at(ic, ssy, ssx);
                        gu.at(ic, ssy, ssx) += gout * block.stem.kernels.at(j, ky, kx);
                    }
                }
            }
    }

    // pixel unshuffle is a permutation; its backward is pixel shuffle
    Tensor gycbcr = pixel_shuffle(gu, block.config.unshuffle_factor);

    // color transform backward: transpose of the forward matrix
    const ColorMatrix& cm = bt601_full_range();
    g.input = Tensor(tape.rgb.shape());
    const std::size_t img_hw = tape.rgb.extent(1) * tape.rgb.extent(2);
    for (std::size_t ch = 0; ch < 3; ++ch)
        for (std::size_t i = 0; i < img_hw; ++i) {
            double acc = 0.0;
            for (std::size_t oc = 0; oc < 3; ++oc)
                acc += cm.m[oc][ch] * gycbcr[oc * img_hw + i];
            g.input[ch * img_hw + i] = acc;
        }
    return g;
}

// ---------------------------------------------------------------------------
// Finite-difference checking
// ---------------------------------------------------------------------------

double sum_squares_loss(const YcdaBlock& block, const ImageRGB& input) {
    auto [out, weights] = ycda_forward(input, block.config, block.stem, block.ica);
    double acc = 0.0;
    for (std::size_t i = 0; i < out.size(); ++i) acc += out[i] * out[i];
    return acc;
}

namespace {

// L(+) − L(−) for the sum-of-squares loss, formed per element as
// (o⁺−o⁻)(o⁺+o⁻) with compensated summation. Algebraically identical to
// differencing the two loss sums, but the large common part cancels per
// element instead of after accumulation, which keeps the finite-difference
// quotient from drowning in roundoff when the loss is much larger than the
// per-coordinate gradient.
double loss_difference(const Tensor& op, const Tensor& om) {
    double sum = 0.0, comp = 0.0;
    for (std::size_t i = 0; i < op.size(); ++i) {
        const double term = (op[i] - om[i]) * (op[i] + om[i]);
        const double y = term - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    return sum;
}

// Push every bottleneck pre-activation at least `margin` away from the
// ReLU kink by adjusting b1, so eps-sized perturbations stay one-sided.
void nudge_relu_preacts(YcdaBlock& block, const ImageRGB& input, double margin) {
    if (!block.ica.use_bias) return;
    YcdaTrace tape;
    ycda_forward_traced(input, block, tape);
    for (std::size_t i = 0; i < tape.h1_pre.size(); ++i) {
        const double pre = tape.h1_pre[i];
        if (std::abs(pre) >= margin) continue;
        block.ica.b1[i] += (pre >= 0.0) ? (margin - pre) : (-margin - pre);
    }
}

std::vector<std::size_t> sample_coords(std::size_t n, std::size_t max_coords,
                                       Rng& rng) {
    std::vector<std::size_t> coords;
    if (n <= max_coords) {
        coords.resize(n);
        for (std::size_t i = 0; i < n; ++i) coords[i] = i;
    } else {
        std::set<std::size_t> seen;
        while (seen.size() < max_coords)
            seen.insert(static_cast<std::size_t>(rng.below(n)));
        coords.assign(seen.begin(), seen.end());
    }
    return coords;
}

}  // namespace

GradReport grad_check(const YcdaBlock& block_in, const ImageRGB& input, double eps,
                      std::size_t max_coords, std::uint64_t sample_seed) {
    if (!(eps > 0.0)) throw std::invalid_argument("grad_check: eps must be > 0");
    YcdaBlock block = block_in;
    nudge_relu_preacts(block, input, 2e-2);

    YcdaTrace tape;
    Tensor out = ycda_forward_traced(input, block, tape);
    Tensor loss_grad(out.shape());
    for (std::size_t i = 0; i < out.size(); ++i) loss_grad[i] = 2.0 * out[i];
    BlockGrads analytic = backward(loss_grad, tape, block);

    Rng rng(sample_seed);
    GradReport report;

    auto check_tensor = [&](const std::string& name, const Tensor& grads,
                            Tensor& target) {
        const auto coords = sample_coords(target.size(), max_coords, rng);
        double worst = 0.0;
        for (std::size_t idx : coords) {
            const double saved = target[idx];
            target[idx] = saved + eps;
            Tensor op = ycda_forward(input, block.config, block.stem, block.ica).first;
            target[idx] = saved - eps;
            Tensor om = ycda_forward(input, block.config, block.stem, block.ica).first;
            target[idx] = saved;
            const double fd = loss_difference(op, om) / (2.0 * eps);
            const double an = grads[idx];
            const double rel = std::abs(an - fd) /
                               std::max({std::abs(an), std::abs(fd), 1e-8});
            worst = std::max(worst, rel);
        }
        report.per_param.emplace_back(name, worst);
        report.overall_max = std::max(report.overall_max, worst);
    };

    auto params = parameters(block);
    auto grads = analytic.named();
    for (std::size_t i = 0; i < params.size(); ++i) {
        // skip biases that are frozen at zero in no-bias mode
        if (!block.ica.use_bias &&
            (params[i].first == "ica.fuse_bias" || params[i].first == "ica.b1" ||
             params[i].first == "ica.b2"))
            continue;
        check_tensor(params[i].first, *grads[i].second, *params[i].second);
    }
    // input gradient, perturbing the image in place
    ImageRGB img = input;
    {
        const auto coords = sample_coords(img.pixels.size(), max_coords, rng);
        double worst = 0.0;
        for (std::size_t idx : coords) {
            const double saved = img.pixels[idx];
            img.pixels[idx] = saved + eps;
            Tensor op = ycda_forward(img, block.config, block.stem, block.ica).first;
            img.pixels[idx] = saved - eps;
            Tensor om = ycda_forward(img, block.config, block.stem, block.ica).first;
            img.pixels[idx] = saved;
            const double fd = loss_difference(op, om) / (2.0 * eps);
            const double an = analytic.input[idx];
            const double rel = std::abs(an - fd) /
                               std::max({std::abs(an), std::abs(fd), 1e-8});
            worst = std::max(worst, rel);
        }
        report.per_param.emplace_back("input", worst);
        report.overall_max = std::max(report.overall_max, worst);
    }
    return report;
}

// ---------------------------------------------------------------------------
// Toy trainer
// ---------------------------------------------------------------------------

namespace {

struct HeadGrads {
    Tensor w, b;
};

// softmax cross-entropy through the pooled head; accumulates parameter
// gradients and returns the sample loss
double head_loss_and_backward(const YcdaBlock& block, const ToyHead& head,
                              const LabeledImage& sample, BlockGrads& bg,
                              HeadGrads& hg, bool accumulate) {
    YcdaTrace tape;
    Tensor out = ycda_forward_traced(sample.image, block, tape);
    const std::size_t channels = out.extent(0);
    const std::size_t hw = out.extent(1) * out.extent(2);

    Tensor pooled({channels});
    for (std::size_t c = 0; c < channels; ++c) {
        double acc = 0.0;
        for (std::size_t i = 0; i < hw; ++i) acc += out[c * hw + i];
        pooled[c] = acc / static_cast<double>(hw);
    }
    Tensor logits = linear(head.w, pooled, &head.b);
    const double mx = std::max(logits[0], logits[1]);
    const double e0 = std::exp(logits[0] - mx), e1 = std::exp(logits[1] - mx);
    const double zsum = e0 + e1;
    const double p[2] = {e0 / zsum, e1 / zsum};
    const double loss = -std::log(std::max(p[sample.label], 1e-300));
    if (!accumulate) return loss;

    Tensor dlogits({2});
    dlogits[0] = p[0] - (sample.label == 0 ? 1.0 : 0.0);
    dlogits[1] = p[1] - (sample.label == 1 ? 1.0 : 0.0);
    Tensor dpooled;
    linear_backward(head.w, pooled, dlogits, hg.w, hg.b, dpooled);

    Tensor dout(out.shape());
    for (std::size_t c = 0; c < channels; ++c) {
        const double v = dpooled[c] / static_cast<double>(hw);
        for (std::size_t i = 0; i < hw; ++i) dout[c * hw + i] = v;
    }
    BlockGrads sample_grads = backward(dout, tape, block);
    auto dst = bg.named();
    auto src = sample_grads.named();
    for (std::size_t i = 0; i < dst.size(); ++i) {
        if (dst[i].first == "input") continue;
        if (dst[i].second->size() == 0) *dst[i].second = Tensor(src[i].second->shape());
        for (std::size_t j = 0; j < src[i].second->size(); ++j)
            (*dst[i].second)[j] += (*src[i].second)[j];
    }
    return loss;
}

double full_set_loss(const YcdaBlock& block, const ToyHead& head,
                     const std::vector<LabeledImage>& data) {
    BlockGrads bg;
    HeadGrads hg;
    double acc = 0.0;
    for (const auto& s : data) acc += head_loss_and_backward(block, head, s, bg, hg, false);
    return acc / static_cast<double>(data.size());
}

}  // namespace

ToyTrainResult train_toy(const std::vector<LabeledImage>& train,
                         const std::vector<LabeledImage>& eval_camouflaged,
                         const YcdaBlock& init, const TrainConfig& cfg) {
    if (train.empty()) throw std::invalid_argument("train_toy: empty dataset");
    if (!(cfg.step_size > 0.0))
        throw std::invalid_argument("train_toy: step_size must be > 0");
    if (!(cfg.momentum >= 0.0 && cfg.momentum < 1.0))
        throw std::invalid_argument("train_toy: momentum must be in [0,1)");
    if (cfg.steps < 0) throw std::invalid_argument("train_toy: negative step count");

    ToyTrainResult result;
    result.block = init;
    const std::size_t channels = init.channels();
    result.head.w = Tensor({2, channels});
    result.head.b = Tensor({2});
    Rng rng(cfg.seed);
    const double bound = 1.0 / std::sqrt(static_cast<double>(channels));
    for (std::size_t i = 0; i < result.head.w.size(); ++i)
        result.head.w[i] = rng.uniform(-bound, bound);

    result.initial_loss = full_set_loss(result.block, result.head, train);
    result.loss_trace.push_back(result.initial_loss);

    // momentum buffers, one per parameter tensor
    auto params = parameters(result.block);
    std::vector<Tensor> velocity;
    for (auto& [name, t] : params) velocity.emplace_back(t->shape());
    Tensor vel_hw(result.head.w.shape()), vel_hb(result.head.b.shape());

    const std::size_t batch =
        std::min<std::size_t>(static_cast<std::size_t>(std::max(cfg.batch_size, 1)),
                              train.size());
    for (int step = 0; step < cfg.steps; ++step) {
        BlockGrads bg;
        HeadGrads hg;
        hg.w = Tensor(result.head.w.shape());
        hg.b = Tensor(result.head.b.shape());
        double batch_loss = 0.0;
        for (std::size_t i = 0; i < batch; ++i) {
            const auto& sample = train[rng.below(train.size())];
            batch_loss +=
                head_loss_and_backward(result.block, result.head, sample, bg, hg, true);
        }
        const double scale = 1.0 / static_cast<double>(batch);
        batch_loss *= scale;
        result.loss_trace.push_back(batch_loss);

        auto grads = bg.named();
        for (std::size_t i = 0; i < params.size(); ++i) {
            Tensor& g = *grads[i].second;
            Tensor& v = velocity[i];
            Tensor& t = *params[i].second;
            for (std::size_t j = 0; j < t.size(); ++j) {
                v[j] = cfg.momentum * v[j] + g[j] * scale;
                t[j] -= cfg.step_size * v[j];
            }
        }
        for (std::size_t j = 0; j < result.head.w.size(); ++j) {
            vel_hw[j] = cfg.momentum * vel_hw[j] + hg.w[j] * scale;
            result.head.w[j] -= cfg.step_size * vel_hw[j];
        }
        for (std::size_t j = 0; j < result.head.b.size(); ++j) {
            vel_hb[j] = cfg.momentum * vel_hb[j] + hg.b[j] * scale;
            result.head.b[j] -= cfg.step_size * vel_hb[j];
        }
    }

    result.final_loss = cfg.steps == 0
                            ? result.initial_loss
                            : full_set_loss(result.block, result.head, train);

    // mean alpha per Y/Cb/Cr-derived channel group on the camouflaged split
    if (!eval_camouflaged.empty()) {
        const std::size_t group = channels / 3;
        double sums[3] = {0, 0, 0};
        for (const auto& s : eval_camouflaged) {
            auto [out, weights] = ycda_forward(s.image, result.block.config,
                                               result.block.stem, result.block.ica);
            for (std::size_t c = 0; c < channels; ++c) sums[c / group] += weights.alpha[c];
        }
        const double denom =
            static_cast<double>(group * eval_camouflaged.size());
        for (int gi = 0; gi < 3; ++gi) result.group_alpha[gi] = sums[gi] / denom;
        result.luminance_dominant = result.group_alpha[0] > result.group_alpha[1] &&
                                    result.group_alpha[0] > result.group_alpha[2];
    }
    return result;
}

}  // namespace ycda
