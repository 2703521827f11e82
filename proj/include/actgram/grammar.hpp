#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "actgram/behaviors.hpp"
#include "actgram/refinement.hpp"
#include "actgram/signal_io.hpp"

namespace actgram {

enum class Level { Primitive = 0, Composition, Behavior };
inline constexpr std::size_t kNumLevels = 3;
inline constexpr std::array<Level, kNumLevels> kAllLevels{Level::Primitive, Level::Composition, Level::Behavior};

std::string_view to_string(Level level);  // "primitive", "composition", "behavior"
std::optional<Level> parse_level(std::string_view s);
std::size_t alphabet_size(Level level);    // 9, 6, 7
std::string_view word_name(Level level, int word);
std::optional<int> parse_word(Level level, std::string_view name);

/// A word is the ordinal of a label within its level's alphabet.
using WordSeq = std::vector<int>;

struct GrammarMatrix {
    std::string trial_id;
    Arm arm = Arm::Right;
    std::array<std::array<std::array<WordSeq, kNumPhases>, kNumAxes>, kNumLevels> words{};

    WordSeq& at(Level l, Axis a, Phase p) {
        return words[static_cast<std::size_t>(l)][static_cast<std::size_t>(a)][static_cast<std::size_t>(p)];
    }
    const WordSeq& at(Level l, Axis a, Phase p) const {
        return words[static_cast<std::size_t>(l)][static_cast<std::size_t>(a)][static_cast<std::size_t>(p)];
    }
    bool operator==(const GrammarMatrix&) const = default;
};

struct EncodeConfig {
    SegmentConfig segment;
    FilterConfig filter;
};

/// Unit counts on one (axis, phase) cell before and after each refinement.
struct LayerCounts {
    std::size_t primitives_raw = 0;
    std::size_t primitives = 0;
    std::size_t compositions_raw = 0;
    std::size_t compositions = 0;
    std::size_t behaviors_raw = 0;
    std::size_t behaviors = 0;
};

struct EncodedCell {
    std::vector<Primitive> primitives;
    std::vector<MotionComposition> compositions;
    std::vector<LowLevelBehavior> behaviors;
    LayerCounts counts;
};

/// primitives -> refine -> compositions -> refine -> behaviors -> refine on one series.
EncodedCell encode_series(const AxisSeries& series, const GradientThresholds& th, const EncodeConfig& cfg);

struct EncodeTrace {
    std::array<std::array<LayerCounts, kNumPhases>, kNumAxes> counts{};
};

/// Encodes every phase present in the trial on all six axes. Errors from the
/// layers are re-thrown tagged with the axis and phase.
GrammarMatrix encode_trial(const Trial& trial, const Calibration& cal, const EncodeConfig& cfg = {},
                           EncodeTrace* trace = nullptr);

/// Nearest-neighbour stretch: slot j takes word round(j*(n-1)/(W-1)).
WordSeq stretch(const WordSeq& seq, std::size_t width);

using LevelPhaseWidths = std::array<std::array<std::size_t, kNumPhases>, kNumLevels>;

/// Max word count over the six axes for each (level, phase) of one matrix.
LevelPhaseWidths word_counts(const GrammarMatrix& m);

/// Stretches every axis to its (level, phase) maximum within this matrix.
GrammarMatrix resample_words(const GrammarMatrix& m);

/// Element-wise maximum of word_counts over many matrices.
LevelPhaseWidths dataset_widths(const std::vector<GrammarMatrix>& matrices);

enum class WordEncoding { Ordinal, OneHot };

/// Per-level word -> code maps. Codes start at 1; 0 is reserved for unseen
/// and padding words.
struct Codebook {
    std::array<std::map<int, int>, kNumLevels> codes;

    int code(Level level, int word) const;  // 0 when unseen
    std::size_t size(Level level) const { return codes[static_cast<std::size_t>(level)].size(); }
    bool operator==(const Codebook&) const = default;
};

Codebook build_codebook(const std::vector<GrammarMatrix>& training);

/// Column layout shared by training and test vectors. Each (level, axis) block
/// holds `slots[level]` word slots; a phase's sequence is stretched to
/// widths[level][phase] slots and padded with code 0 up to the block size.
struct FeatureLayout {
    LevelPhaseWidths widths{};
    std::array<std::size_t, kNumLevels> slots{};
    Codebook codebook;
    WordEncoding encoding = WordEncoding::Ordinal;

    std::size_t columns_per_slot(Level level) const;
    std::size_t dimension() const;
    /// First column of (level, axis, slot).
    std::size_t column(Level level, Axis axis, std::size_t slot) const;
    bool operator==(const FeatureLayout&) const = default;
};

FeatureLayout make_layout(const LevelPhaseWidths& widths, Codebook codebook,
                          WordEncoding encoding = WordEncoding::Ordinal);

struct SampleId {
    std::string trial_id;
    Phase phase = Phase::Approach;
    bool operator==(const SampleId&) const = default;
};

struct PhaseDataset {
    std::vector<std::vector<double>> X;
    std::vector<int> y;  // phase ordinal, 0..K-1
    std::vector<SampleId> ids;
    std::size_t unknown_words = 0;

    std::size_t size() const { return X.size(); }
    std::size_t dimension() const { return X.empty() ? 0 : X.front().size(); }
};

/// One row per (trial, phase), in trial order then phase order.
PhaseDataset vectorize(const std::vector<GrammarMatrix>& matrices, const FeatureLayout& layout);

/// Row-wise concatenation of datasets built over the same (trial, phase) rows,
/// e.g. the right and left arm of a two-arm corpus.
PhaseDataset concat_features(const std::vector<PhaseDataset>& parts);

std::string grammar_to_json(const GrammarMatrix& m);
GrammarMatrix grammar_from_json(const std::string& text);
std::string layout_to_json(const FeatureLayout& layout);
FeatureLayout layout_from_json(const std::string& text);
std::string dataset_to_csv(const PhaseDataset& ds);

}  // namespace actgram
