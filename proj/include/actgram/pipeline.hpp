#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "actgram/grammar.hpp"
#include "actgram/mondrian.hpp"
#include "actgram/svm.hpp"

namespace actgram {

struct PipelineConfig {
    EncodeConfig encode;
    CutFractions cuts;
    bool pooled_calibration = false;  // one threshold set shared by all axes
    WordEncoding encoding = WordEncoding::Ordinal;
};

/// Per-axis thresholds from the whole-trial series of every trial.
Calibration calibrate_corpus(const std::vector<Trial>& trials, const SegmentConfig& seg, const CutFractions& cuts,
                             bool pooled = false);

/// Encodes trials on worker threads; output order follows input order.
std::vector<GrammarMatrix> encode_corpus(const std::vector<Trial>& trials, const Calibration& cal,
                                         const EncodeConfig& cfg);

/// The arms recorded for one trial index, right arm first.
using TrialGroup = std::vector<GrammarMatrix>;

/// Groups consecutive matrices `arms` at a time. Throws Usage when the count
/// or the arm order does not fit.
std::vector<TrialGroup> group_trials(const std::vector<GrammarMatrix>& matrices, int arms);

/// One layout per arm; vectors are the arms' features side by side.
struct FeatureSpace {
    std::vector<FeatureLayout> arms;

    std::size_t dimension() const;
    bool operator==(const FeatureSpace&) const = default;
};

FeatureSpace fit_feature_space(const std::vector<TrialGroup>& training, WordEncoding encoding);
PhaseDataset featurize(const std::vector<TrialGroup>& groups, const FeatureSpace& space);

std::string feature_space_to_json(const FeatureSpace& space);
FeatureSpace feature_space_from_json(const std::string& text);

struct EvalConfig {
    std::size_t n_train = 30;
    std::size_t n_validation = 8;
    std::size_t svm_start = 1;       // trials in the first SVM step
    std::size_t mondrian_start = 3;  // trials in the first Mondrian step
    std::size_t step = 1;            // trials added per step
    std::size_t steady_steps = 5;
    bool shuffle = true;
    std::uint64_t seed = 0;
    SvmParams svm;
    ForestParams forest;
};

struct CurvePoint {
    std::size_t train_trials = 0;
    std::size_t train_samples = 0;
    std::optional<double> svm;
    std::optional<double> mondrian;
};

struct EvalReport {
    std::vector<CurvePoint> curve;
    double svm_steady = 0.0;
    double mondrian_steady = 0.0;
    std::size_t feature_dim = 0;
    std::vector<std::string> validation_ids;
};

/// Learning curves over trial groups. The SVM is retrained from scratch at
/// every step; the forest is grown with partial_fit on the newly added trials.
/// Calibration, codebook and layout come from the training split only.
EvalReport evaluate_corpus(const std::vector<Trial>& trials, int arms, const PipelineConfig& pipe,
                           const EvalConfig& eval);

std::string curve_to_csv(const EvalReport& report);

}  // namespace actgram
