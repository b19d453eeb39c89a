// ycda: command-line front end for the YCDa block — weight management,
// forward runs, YCbCr statistics, synthetic fixtures, gradient checking,
// cost accounting, and the toy trainer.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "ycda/autograd.hpp"
#include "ycda/imageio.hpp"
#include "ycda/model.hpp"
#include "ycda/rng.hpp"
#include "ycda/stats.hpp"
#include "ycda/synth.hpp"

namespace {

struct BlockFlags {
    ycda::StemConfig stem;
    ycda::IcaOptions ica;
    std::uint64_t seed = 0;
    std::string activation = "silu";
    std::string variant = "ica";
    bool no_bias = false;
};

void add_block_flags(CLI::App* cmd, BlockFlags& f) {
    cmd->add_option("--seed", f.seed, "RNG seed");
    cmd->add_option("--factor", f.stem.unshuffle_factor, "pixel-unshuffle factor");
    cmd->add_option("--multiplier", f.stem.multiplier, "depthwise kernel multiplier");
    cmd->add_option("--kernel-size", f.stem.kernel_size, "depthwise kernel size (odd)");
    cmd->add_option("--activation", f.activation, "stem activation: identity|silu");
    cmd->add_option("--reduction", f.ica.reduction, "attention bottleneck reduction");
    cmd->add_option("--variant", f.variant, "attention variant: ica|gap_only|var_only");
    cmd->add_flag("--no-bias", f.no_bias, "disable fuse/MLP biases");
}

ycda::YcdaBlock make_block(BlockFlags& f) {
    if (f.activation == "identity")
        f.stem.activation = ycda::Activation::identity;
    else if (f.activation == "silu")
        f.stem.activation = ycda::Activation::silu;
    else
        throw CLI::ValidationError("--activation", "unknown activation " + f.activation);
    if (f.variant == "ica")
        f.ica.variant = ycda::IcaVariant::ica;
    else if (f.variant == "gap_only")
        f.ica.variant = ycda::IcaVariant::gap_only;
    else if (f.variant == "var_only")
        f.ica.variant = ycda::IcaVariant::var_only;
    else
        throw CLI::ValidationError("--variant", "unknown variant " + f.variant);
    f.ica.use_bias = !f.no_bias;
    f.stem.seed = f.seed;
    return ycda::init_block(f.stem, f.ica, f.seed);
}

int run_forward(const std::string& image_path, const std::string& weights_path,
                const std::string& out_prefix) {
    ycda::YcdaBlock block = ycda::load_block(weights_path);
    ycda::ImageRGB img = ycda::load_ppm(image_path);
    const std::size_t orig_h = img.height(), orig_w = img.width();
    img = ycda::reflect_pad_to_multiple(img, block.config.unshuffle_factor);
    const bool padded = img.height() != orig_h || img.width() != orig_w;

    auto [features, weights] =
        ycda::ycda_forward(img, block.config, block.stem, block.ica);
    ycda::save_records({{"features", &features}}, out_prefix + ".features.bin");

    std::ofstream os(out_prefix + ".alpha.txt");
    os << "# alpha per channel, grouped by source channel\n";
    os << "# input " << orig_w << "x" << orig_h
       << (padded ? " (reflect-padded to " + std::to_string(img.width()) + "x" +
                        std::to_string(img.height()) + ")"
                  : "")
       << "\n";
    const char* names[3] = {"Y", "Cb", "Cr"};
    const std::size_t group = block.channels() / 3;
    for (std::size_t c = 0; c < block.channels(); ++c)
        os << names[c / group] << c % group << " "
           << ycda::format_double(weights.alpha[c]) << "\n";
    std::cout << "wrote " << out_prefix << ".features.bin and " << out_prefix
              << ".alpha.txt\n";
    return 0;
}

int run_gradcheck(BlockFlags& flags, int input_size, double eps) {
    ycda::YcdaBlock block = make_block(flags);
    const auto n = static_cast<std::size_t>(input_size);
    ycda::ImageRGB img(n, n);
    ycda::Rng rng(flags.seed + 1);
    for (std::size_t i = 0; i < img.pixels.size(); ++i)
        img.pixels[i] = rng.uniform(0.1, 0.9);

    ycda::GradReport report = ycda::grad_check(block, img, eps);
    for (const auto& [name, err] : report.per_param)
        std::cout << name << " max_rel_err " << ycda::format_double(err) << "\n";
    std::cout << "overall_max " << ycda::format_double(report.overall_max) << "\n";
    const bool ok = report.overall_max < 1e-6;
    std::cout << (ok ? "PASS" : "FAIL") << " (threshold 1e-6)\n";
    return ok ? 0 : 1;
}

int run_train_toy(BlockFlags& flags, ycda::SynthSpec spec, ycda::TrainConfig tc,
                  int pairs, const std::string& report_path) {
    ycda::YcdaBlock block = make_block(flags);
    spec.seed = tc.seed;
    std::vector<ycda::LabeledImage> train = ycda::synth_dataset(spec, pairs);
    ycda::SynthSpec eval_spec = spec;
    eval_spec.seed = tc.seed + 1;
    std::vector<ycda::LabeledImage> eval_camo;
    for (auto& s : ycda::synth_dataset(eval_spec, std::max(pairs / 4, 1)))
        if (s.label == 1) eval_camo.push_back(std::move(s));

    ycda::ToyTrainResult res = ycda::train_toy(train, eval_camo, block, tc);

    std::ostringstream report;
    report << "toy training report\n";
    report << "pairs " << pairs << " steps " << tc.steps << " seed " << tc.seed
           << "\n";
    report << "initial_loss " << ycda::format_double(res.initial_loss) << "\n";
    report << "final_loss " << ycda::format_double(res.final_loss) << "\n";
    report << "mean_alpha_Y " << ycda::format_double(res.group_alpha[0]) << "\n";
    report << "mean_alpha_Cb " << ycda::format_double(res.group_alpha[1]) << "\n";
    report << "mean_alpha_Cr " << ycda::format_double(res.group_alpha[2]) << "\n";
    if (res.luminance_dominant) {
        report << "attention_shift: Y-group attention exceeds both chroma groups "
                  "on camouflaged inputs\n";
    } else {
        report << "attention_shift: not observed; measured ordering Y="
               << ycda::format_double(res.group_alpha[0])
               << " Cb=" << ycda::format_double(res.group_alpha[1])
               << " Cr=" << ycda::format_double(res.group_alpha[2]) << "\n";
    }
    report << "loss_trace";
    for (double v : res.loss_trace) report << " " << ycda::format_double(v);
    report << "\n";

    std::cout << report.str();
    if (!report_path.empty()) {
        std::ofstream os(report_path);
        os << report.str();
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"YCDa early-stage feature block tools"};
    app.require_subcommand(1);

    // init-weights
    auto* init_cmd = app.add_subcommand("init-weights", "create a weight file");
    BlockFlags init_flags;
    std::string init_out;
    add_block_flags(init_cmd, init_flags);
    init_cmd->add_option("--out", init_out, "output weight file")->required();

    // forward
    auto* fwd_cmd = app.add_subcommand("forward", "run the block on one image");
    std::string fwd_image, fwd_weights, fwd_out = "forward_out";
    fwd_cmd->add_option("--image", fwd_image, "input PPM (P6)")->required();
    fwd_cmd->add_option("--weights", fwd_weights, "weight file")->required();
    fwd_cmd->add_option("--out", fwd_out, "output prefix");

    // stats
    auto* stats_cmd = app.add_subcommand("stats", "per-image YCbCr statistics CSV");
    std::vector<std::string> stats_images;
    std::vector<std::string> stats_labels;
    std::string stats_out;
    stats_cmd->add_option("images", stats_images, "input PPM files")->required();
    stats_cmd
        ->add_option("--labels", stats_labels,
                     "comma-separated labels aligned with images")
        ->delimiter(',');
    stats_cmd->add_option("--out", stats_out, "output CSV file (default stdout)");

    // synth
    auto* synth_cmd = app.add_subcommand("synth", "generate a salient/camouflaged pair");
    ycda::SynthSpec synth_spec;
    std::string synth_prefix = "synth", synth_shape = "disk";
    std::uint64_t synth_seed = 0;
    synth_cmd->add_option("--out", synth_prefix, "output prefix");
    synth_cmd->add_option("--seed", synth_seed, "RNG seed");
    synth_cmd->add_option("--size", synth_spec.size, "image size");
    synth_cmd->add_option("--shape", synth_shape, "object shape: disk|patch");
    synth_cmd->add_option("--contrast", synth_spec.texture_contrast,
                          "luminance texture amplitude");
    synth_cmd->add_option("--delta-chroma", synth_spec.delta_chroma,
                          "object chroma offset in the salient image");
    synth_cmd->add_option("--noise", synth_spec.noise_level,
                          "background chroma noise amplitude");
    synth_cmd->add_option("--object-fraction", synth_spec.object_fraction,
                          "object radius as a fraction of the image size");

    // gradcheck
    auto* gc_cmd = app.add_subcommand("gradcheck", "finite-difference gradient check");
    BlockFlags gc_flags;
    gc_flags.activation = "identity";
    int gc_size = 8;
    double gc_eps = 1e-4;
    add_block_flags(gc_cmd, gc_flags);
    gc_cmd->add_option("--size", gc_size, "square input extent");
    gc_cmd->add_option("--eps", gc_eps, "central-difference step");

    // train-toy
    auto* toy_cmd = app.add_subcommand("train-toy", "train on synthetic pairs");
    BlockFlags toy_flags;
    ycda::TrainConfig toy_tc;
    ycda::SynthSpec toy_spec;
    // trainer fixture: a larger, more strongly colored object than the
    // statistics fixture, so the class signal survives global mean pooling
    toy_spec.size = 32;
    toy_spec.object_fraction = 0.35;
    toy_spec.delta_chroma = 0.30;
    int toy_pairs = 256;
    std::string toy_report;
    add_block_flags(toy_cmd, toy_flags);
    toy_cmd->add_option("--pairs", toy_pairs, "training pair count");
    toy_cmd->add_option("--steps", toy_tc.steps, "gradient steps");
    toy_cmd->add_option("--lr", toy_tc.step_size, "step size");
    toy_cmd->add_option("--momentum", toy_tc.momentum, "momentum");
    toy_cmd->add_option("--batch", toy_tc.batch_size, "minibatch size");
    toy_cmd->add_option("--image-size", toy_spec.size, "synthetic image size");
    toy_cmd->add_option("--object-fraction", toy_spec.object_fraction,
                        "object radius as a fraction of the image size");
    toy_cmd->add_option("--delta-chroma", toy_spec.delta_chroma,
                        "object chroma offset in the salient image");
    toy_cmd->add_option("--report", toy_report, "write the summary here too");

    // cost
    auto* cost_cmd = app.add_subcommand("cost", "stem-scope cost report");
    BlockFlags cost_flags;
    ycda::BaselineConv baseline;
    add_block_flags(cost_cmd, cost_flags);
    cost_cmd->add_option("--baseline-channels", baseline.out_channels,
                         "baseline conv output channels");
    cost_cmd->add_option("--baseline-kernel", baseline.kernel_size,
                         "baseline conv kernel size");
    cost_cmd->add_option("--baseline-stride", baseline.stride, "baseline conv stride");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (init_cmd->parsed()) {
            ycda::YcdaBlock block = make_block(init_flags);
            ycda::save_block(block, init_out);
            std::cout << "wrote " << init_out << " (" << block.channels()
                      << " channels)\n";
            return 0;
        }
        if (fwd_cmd->parsed()) return run_forward(fwd_image, fwd_weights, fwd_out);
        if (stats_cmd->parsed()) {
            if (!stats_labels.empty() && stats_labels.size() != stats_images.size())
                throw CLI::ValidationError("--labels",
                                           "label count must match image count");
            std::vector<ycda::StatsRow> rows;
            for (std::size_t i = 0; i < stats_images.size(); ++i)
                rows.push_back(ycda::image_stats(
                    stats_images[i],
                    stats_labels.empty() ? std::string() : stats_labels[i],
                    ycda::load_ppm(stats_images[i])));
            const std::string csv = ycda::stats_csv(rows);
            if (stats_out.empty()) {
                std::cout << csv;
            } else {
                std::ofstream os(stats_out);
                os << csv;
            }
            return 0;
        }
        if (synth_cmd->parsed()) {
            if (synth_shape == "patch")
                synth_spec.shape = ycda::ObjectShape::textured_patch;
            else if (synth_shape != "disk")
                throw CLI::ValidationError("--shape", "unknown shape " + synth_shape);
            synth_spec.seed = synth_seed;
            auto [salient, camo] = ycda::synth_pair(synth_spec);
            ycda::save_ppm(salient, synth_prefix + "_salient.ppm");
            ycda::save_ppm(camo, synth_prefix + "_camouflaged.ppm");
            std::cout << "wrote " << synth_prefix << "_salient.ppm and "
                      << synth_prefix << "_camouflaged.ppm\n";
            return 0;
        }
        if (gc_cmd->parsed()) return run_gradcheck(gc_flags, gc_size, gc_eps);
        if (toy_cmd->parsed()) {
            toy_tc.seed = toy_flags.seed;
            return run_train_toy(toy_flags, toy_spec, toy_tc, toy_pairs, toy_report);
        }
        if (cost_cmd->parsed()) {
            ycda::YcdaBlock block = make_block(cost_flags);
            auto [ycda_cost, base_cost] = ycda::cost_report(block, baseline);
            std::cout << ycda::cost_report_text(ycda_cost, base_cost);
            return 0;
        }
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
