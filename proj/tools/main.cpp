#include <CLI11.hpp>

#include <json.hpp>

#include <iostream>
#include <optional>
#include <string>

#include "actgram/cli.hpp"
#include "actgram/error.hpp"

using namespace actgram;

namespace {

struct Overrides {
    std::string config;
    std::optional<std::string> data, calibration, model, out, profile;
    std::optional<std::uint64_t> seed;
    std::optional<int> arms;
    std::optional<double> r2_min;
    std::optional<std::size_t> min_window;
    bool pooled = false;
    std::optional<std::string> encoding, classifier, kernel;
    std::optional<double> C, gamma, lifetime;
    std::optional<std::size_t> trees, batches, batch_size, train, validation, step, trials;
    std::optional<std::string> level;
    std::vector<std::string> axes;
};

void add_common(CLI::App* cmd, Overrides& o) {
    cmd->add_option("-c,--config", o.config, "JSON run configuration");
    cmd->add_option("--seed", o.seed, "seed for every random choice");
    cmd->add_option("--arms", o.arms, "arms per trial index (1 or 2)");
}

void add_pipeline(CLI::App* cmd, Overrides& o) {
    cmd->add_option("--data", o.data, "trial directory");
    cmd->add_option("--calibration", o.calibration, "calibration file");
    cmd->add_option("--r2-min", o.r2_min, "segment fit gate");
    cmd->add_option("--min-window", o.min_window, "minimum segment length in samples");
    cmd->add_flag("--pooled", o.pooled, "one threshold set for all axes");
    cmd->add_option("--encoding", o.encoding, "ordinal or onehot");
}

void add_classifier(CLI::App* cmd, Overrides& o) {
    cmd->add_option("--kernel", o.kernel, "svm kernel: rbf, linear, poly");
    cmd->add_option("--C", o.C, "svm penalty");
    cmd->add_option("--gamma", o.gamma, "rbf gamma (<= 0: automatic)");
    cmd->add_option("--trees", o.trees, "forest size");
    cmd->add_option("--lifetime", o.lifetime, "Mondrian lifetime (default unbounded)");
}

RunConfig build_config(const Overrides& o) {
    RunConfig cfg;
    if (!o.config.empty()) cfg = run_config_from_json(read_text(o.config));
    if (o.data) cfg.data_dir = *o.data;
    if (o.calibration) cfg.calibration = *o.calibration;
    if (o.model) cfg.model = *o.model;
    if (o.out) cfg.output_dir = *o.out;
    if (o.profile) cfg.profile = *o.profile;
    if (o.seed) cfg.seed = *o.seed;
    if (o.arms) cfg.arms = *o.arms;
    if (o.r2_min) cfg.pipeline.encode.segment.r2_min = *o.r2_min;
    if (o.min_window) cfg.pipeline.encode.segment.min_window = *o.min_window;
    if (o.pooled) cfg.pipeline.pooled_calibration = true;
    // reuse the JSON parsers for the enumerated flags
    nlohmann::json j;
    if (o.encoding) j["encoding"] = *o.encoding;
    if (o.classifier) j["classifier"] = *o.classifier;
    if (o.kernel) j["svm"]["kernel"] = *o.kernel;
    if (o.C) j["svm"]["C"] = *o.C;
    if (o.gamma) j["svm"]["gamma"] = *o.gamma;
    if (o.trees) j["mondrian"]["trees"] = *o.trees;
    if (o.lifetime) j["mondrian"]["lifetime"] = *o.lifetime;
    if (o.batches) j["mondrian"]["batches"] = *o.batches;
    if (o.batch_size) j["mondrian"]["batch_size"] = *o.batch_size;
    if (o.train) j["eval"]["train"] = *o.train;
    if (o.validation) j["eval"]["validation"] = *o.validation;
    if (o.step) j["eval"]["step"] = *o.step;
    if (o.trials) j["synth"]["trials"] = *o.trials;
    if (o.level) j["plot"]["level"] = *o.level;
    if (!o.axes.empty()) j["plot"]["axes"] = o.axes;
    if (!j.empty()) cfg = run_config_from_json(j.dump(), cfg);
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"actgram: force/torque action grammars and task-phase classification"};
    app.require_subcommand(1);
    Overrides o;

    auto* calibrate = app.add_subcommand("calibrate", "derive per-axis gradient thresholds from a trial corpus");
    add_common(calibrate, o);
    add_pipeline(calibrate, o);

    auto* encode = app.add_subcommand("encode", "encode trials into grammars and a feature dataset");
    add_common(encode, o);
    add_pipeline(encode, o);
    encode->add_option("-o,--out", o.out, "output directory");

    auto* train = app.add_subcommand("train", "train a phase classifier on a trial corpus");
    add_common(train, o);
    add_pipeline(train, o);
    add_classifier(train, o);
    train->add_option("--classifier", o.classifier, "svm or mondrian");
    train->add_option("--model", o.model, "model file to write");
    train->add_option("--batches", o.batches, "forest mini-batch count");
    train->add_option("--batch-size", o.batch_size, "forest mini-batch size (overrides --batches)");

    auto* predict = app.add_subcommand("predict", "label the phases of trials with a trained model");
    add_common(predict, o);
    predict->add_option("--data", o.data, "trial directory");
    predict->add_option("--model", o.model, "model file");
    predict->add_option("-o,--out", o.out, "output directory");

    auto* eval = app.add_subcommand("eval", "learning curves for both classifiers on a held-out split");
    add_common(eval, o);
    add_pipeline(eval, o);
    add_classifier(eval, o);
    eval->add_option("--train", o.train, "training trials");
    eval->add_option("--validation", o.validation, "validation trials");
    eval->add_option("--step", o.step, "trials added per step");
    eval->add_option("-o,--out", o.out, "output directory");

    auto* plot = app.add_subcommand("plot", "colour-coded grammar grid per axis");
    add_common(plot, o);
    add_pipeline(plot, o);
    plot->add_option("--level", o.level, "primitive, composition or behavior");
    plot->add_option("--axes", o.axes, "axes to draw (default all)");
    plot->add_option("-o,--out", o.out, "output directory");

    auto* synth = app.add_subcommand("synth", "synthetic data");
    synth->require_subcommand(1);
    auto* gen = synth->add_subcommand("gen", "generate a synthetic trial corpus");
    add_common(gen, o);
    gen->add_option("--trials", o.trials, "trial indices to generate");
    gen->add_option("--profile", o.profile, "task profile JSON (default built in)");
    gen->add_option("-o,--out", o.out, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitUsage;
    }

    try {
        const auto cfg = build_config(o);
        if (calibrate->parsed()) cmd_calibrate(cfg, std::cout);
        else if (encode->parsed()) cmd_encode(cfg, std::cout);
        else if (train->parsed()) cmd_train(cfg, std::cout);
        else if (predict->parsed()) cmd_predict(cfg, std::cout);
        else if (eval->parsed()) cmd_eval(cfg, std::cout);
        else if (plot->parsed()) cmd_plot(cfg, std::cout);
        else if (gen->parsed()) cmd_synth_gen(cfg, std::cout);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_code_for(e.kind());
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return kExitInternal;
    }
    return kExitOk;
}
