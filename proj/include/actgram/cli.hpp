#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "actgram/error.hpp"
#include "actgram/pipeline.hpp"
#include "actgram/synth.hpp"

namespace actgram {

enum class ClassifierKind { Svm, Mondrian };

struct RunConfig {
    std::filesystem::path data_dir = "data";
    std::filesystem::path calibration = "calibration.json";
    std::filesystem::path model = "model.json";
    std::filesystem::path output_dir = "out";
    std::optional<std::filesystem::path> profile;  // synth gen

    int arms = 1;
    std::uint64_t seed = 0;
    PipelineConfig pipeline;
    ClassifierKind classifier = ClassifierKind::Svm;
    SvmParams svm;
    ForestParams forest;
    std::size_t batches = 12;
    std::size_t batch_size = 0;  // > 0 overrides `batches`
    EvalConfig eval;

    // plot
    Level plot_level = Level::Behavior;
    std::vector<Axis> plot_axes{kAllAxes.begin(), kAllAxes.end()};

    // synth gen
    std::size_t synth_trials = 38;

    /// Throws Usage.
    void validate() const;
};

/// Reads a JSON config; keys absent from the file keep their defaults.
RunConfig run_config_from_json(const std::string& text, RunConfig base = {});
std::string run_config_to_json(const RunConfig& cfg);

/// exit codes
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;
inline constexpr int kExitInternal = 3;

int exit_code_for(ErrorKind kind);

struct CorpusEntry {
    std::string trial_id;
    Arm arm = Arm::Right;
    std::filesystem::path csv;
    std::filesystem::path phases;
};

/// `manifest.json` when present, else every *.csv except *.phases.csv in name order.
std::vector<CorpusEntry> list_corpus(const std::filesystem::path& dir);
std::vector<Trial> load_corpus(const std::filesystem::path& dir);
void write_manifest(const std::filesystem::path& dir, const std::vector<CorpusEntry>& entries);

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

/// Calibration, feature space and classifier in one file.
struct ModelBundle {
    PipelineConfig pipeline;
    Calibration calibration;
    FeatureSpace features;
    ClassifierKind classifier = ClassifierKind::Svm;
    std::optional<SvmModel> svm;
    std::optional<MondrianForest> forest;
};

std::string bundle_to_json(const ModelBundle& bundle);
ModelBundle bundle_from_json(const std::string& text);

// Subcommands. Each writes its files under the configured paths and a short
// human-readable summary to `out`.
void cmd_calibrate(const RunConfig& cfg, std::ostream& out);
void cmd_encode(const RunConfig& cfg, std::ostream& out);
void cmd_train(const RunConfig& cfg, std::ostream& out);
void cmd_predict(const RunConfig& cfg, std::ostream& out);
EvalReport cmd_eval(const RunConfig& cfg, std::ostream& out);
void cmd_plot(const RunConfig& cfg, std::ostream& out);
void cmd_synth_gen(const RunConfig& cfg, std::ostream& out);

}  // namespace actgram
